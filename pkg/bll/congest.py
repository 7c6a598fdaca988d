"""
Couche métier (BLL) - Simulateur synchrone du modèle CONGEST.

Chaque tour, chaque sommet actif exécute une étape locale : il lit les
messages envoyés par ses voisins au tour précédent et écrit au plus un
message par port. Le moteur livre ensuite les messages (exactement une
fois, au voisin du port, au tour suivant) et vérifie la bande passante
de chaque message au moment de l'envoi.

Conventions :
- les boîtes sont indexées par port 0..d(v)-1 ; le voisin d'un port est
  inconnu du programme tant qu'il ne l'a pas appris par message ;
  le degré est une entrée locale gratuite ;
- tours utilisés = indice du dernier tour où un message a été envoyé ou
  qu'un programme a marqué comme tour de vérification (marquer_tour) ;
  un calcul final non marqué qui ne fait que lire la dernière boîte n'est pas un tour ;
- l'aléa d'un sommet passe exclusivement par derive_vertex_rng(graine,
  sommet, tour), ce qui rend l'ordre d'exécution des étapes sans effet.
"""

import enum
import logging
from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Set, Tuple

import numpy as np

from bll.erreurs import ErreurBandePassante, ErreurConfiguration, ErreurToursMax
from config.parametres import TOURS_MAX_DEFAUT
from dal.graphe import Graphe

logger = logging.getLogger(__name__)

_MASQUE_GRAINE = (1 << 128) - 1


class Verdict(enum.Enum):
    """Verdict local d'un sommet (LocalVerdict)."""
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


class TypeChamp(enum.Enum):
    SOMMET = "sommet"  # identifiant, ⌈log2 n⌉ bits
    ENTIER = "entier"  # petit entier < n², ⌈log2 n²⌉ bits
    BIT = "bit"
    ETIQUETTE = "etiquette"  # étiquette de motif < k, ⌈log2 k⌉ bits


def largeur_identifiant(n: int) -> int:
    return max(1, (n - 1).bit_length())


def largeur_entier(n: int) -> int:
    return max(1, (n * n - 1).bit_length())


def largeur_etiquette(k: int) -> int:
    return max(1, (k - 1).bit_length())


def limite_bande_defaut(n: int) -> int:
    """Limite par défaut : 4·⌈log2 n⌉ + 8 bits."""
    return 4 * largeur_identifiant(n) + 8


@dataclass(frozen=True)
class Champ:
    type: TypeChamp
    valeur: int
    borne: int = 0  # nombre d'étiquettes (champ ETIQUETTE seulement)

    def largeur(self, n: int) -> int:
        if self.type == TypeChamp.SOMMET:
            return largeur_identifiant(n)
        if self.type == TypeChamp.ENTIER:
            return largeur_entier(n)
        if self.type == TypeChamp.ETIQUETTE:
            return largeur_etiquette(self.borne)
        return 1


def sommet(v: int) -> Champ:
    return Champ(TypeChamp.SOMMET, int(v))


def entier(x: int) -> Champ:
    return Champ(TypeChamp.ENTIER, int(x))


def bit(b: bool) -> Champ:
    return Champ(TypeChamp.BIT, 1 if b else 0)


def etiquette(i: int, k: int) -> Champ:
    """Étiquette i d'un motif à k sommets : largeur fixée par k, indépendante de n."""
    return Champ(TypeChamp.ETIQUETTE, int(i), int(k))


class Message:
    """
    Message CONGEST : suite de champs (identifiant, petit entier ou bit).

    La taille en bits est la somme des largeurs des champs.
    """

    __slots__ = ('champs',)

    def __init__(self, *champs: Champ):
        self.champs: Tuple[Champ, ...] = champs

    @property
    def valeurs(self) -> Tuple[int, ...]:
        return tuple(c.valeur for c in self.champs)

    def taille_bits(self, n: int) -> int:
        """
        Taille du message pour un réseau à n sommets.

        Raises:
            ErreurBandePassante: une valeur ne tient pas dans la largeur de son champ
        """
        total = 0
        for champ in self.champs:
            largeur = champ.largeur(n)
            if not 0 <= champ.valeur < (1 << largeur):
                raise ErreurBandePassante(
                    f"Champ {champ.type.value}={champ.valeur} hors de ses {largeur} bits (n={n})."
                )
            total += largeur
        return total

    def __eq__(self, autre: object) -> bool:
        return isinstance(autre, Message) and self.champs == autre.champs

    def __hash__(self) -> int:
        return hash(self.champs)

    def __repr__(self):
        return f"<Message{self.valeurs}>"


def derive_vertex_rng(graine: int, sommet_id: int, tour: int) -> np.random.Generator:
    """
    Flux aléatoire du sommet pour un tour donné.

    Séparation de domaine par (graine, sommet, tour) via SeedSequence :
    flux reproductibles et statistiquement indépendants.
    """
    sequence = np.random.SeedSequence(entropy=graine & _MASQUE_GRAINE, spawn_key=(sommet_id, tour))
    return np.random.default_rng(sequence)


def deriver_graine(graine: int, *cle: int) -> int:
    """Graine dérivée (64 bits) de (graine, cle...) : essais, redémarrages, grappes."""
    sequence = np.random.SeedSequence(entropy=graine & _MASQUE_GRAINE, spawn_key=tuple(cle))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


@dataclass
class ContexteInitial:
    """Entrées locales d'un sommet avant le premier tour (tour 0)."""
    sommet: int
    degre: int
    n: int
    entree: Any
    rng: np.random.Generator


class ContexteTour:
    """
    Contexte d'une étape (RoundContext).

    recus : port -> message envoyé par ce voisin au tour précédent
    (un port absent modélise le message vide) ; envois : port -> message.
    """

    __slots__ = ('tour', 'degre', 'recus', 'envois', 'reveil', 'compte', '_graine', '_sommet', '_rng')

    def __init__(self, tour: int, degre: int, recus: Mapping[int, Message], graine: int, sommet_id: int):
        self.tour = tour
        self.degre = degre
        self.recus: Mapping[int, Message] = recus
        self.envois: Dict[int, Message] = {}
        self.reveil: Optional[int] = None
        self.compte = False
        self._graine = graine
        self._sommet = sommet_id
        self._rng: Optional[np.random.Generator] = None

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            self._rng = derive_vertex_rng(self._graine, self._sommet, self.tour)
        return self._rng

    def envoyer(self, port: int, message: Message) -> None:
        if not 0 <= port < self.degre:
            raise IndexError(f"Port {port} inexistant (degré {self.degre}).")
        if port in self.envois:
            raise ValueError(f"Deux messages sur le port {port} au tour {self.tour}.")
        self.envois[port] = message

    def diffuser(self, message: Message, sauf: Optional[Set[int]] = None) -> None:
        for port in range(self.degre):
            if not sauf or port not in sauf:
                self.envoyer(port, message)

    def dormir_jusqua(self, tour: int) -> None:
        """Ne pas être exécuté avant `tour`, sauf si un message arrive."""
        if tour <= self.tour:
            raise ValueError(f"Réveil au tour {tour} déjà passé (tour courant {self.tour}).")
        self.reveil = tour

    def marquer_tour(self) -> None:
        """Compte ce tour comme utilisé même sans envoi (tour de vérification locale)."""
        self.compte = True


class ProgrammeSommet(ABC):
    """
    Programme de sommet (VertexProgram).

    init et step retournent (état, verdict éventuel). Un sommet qui a
    rendu son verdict n'est plus exécuté.
    """

    nom = "programme"

    @abstractmethod
    def init(self, ctx: ContexteInitial) -> Tuple[Any, Optional[Verdict]]:
        ...

    @abstractmethod
    def step(self, etat: Any, ctx: ContexteTour) -> Tuple[Any, Optional[Verdict]]:
        ...

    def sortie(self, etat: Any) -> Any:
        """Sortie locale en fin d'exécution (grappe, arêtes supprimées, ...)."""
        return None


@dataclass(frozen=True)
class ConfigurationExecution:
    """Configuration d'une exécution : limite de bande (bits), tours max, graine."""
    graine: int = 0
    limite_bande: Optional[int] = None
    tours_max: int = TOURS_MAX_DEFAUT
    arret_au_rejet: bool = False


@dataclass
class RapportEssai:
    """
    Rapport d'un essai (TrialReport).

    Le verdict global est REJECT si et seulement si un sommet rejette.
    Un sommet sans verdict (arrêt anticipé au premier rejet) vaut None.
    """
    verdicts: Dict[int, Optional[Verdict]]
    tours: int
    bits_max: int
    graine: int
    sorties: Dict[int, Any] = field(default_factory=dict, compare=False)

    @property
    def verdict(self) -> Verdict:
        if any(v == Verdict.REJECT for v in self.verdicts.values()):
            return Verdict.REJECT
        return Verdict.ACCEPT

    def rejetants(self) -> List[int]:
        return sorted(v for v, verdict in self.verdicts.items() if verdict == Verdict.REJECT)

    def vers_ligne_csv(self, propriete: str, epsilon: Any, n: int, m: int) -> List[str]:
        """seed, verdict, rounds, max_bits, property, epsilon, n, m."""
        return [
            str(self.graine), self.verdict.value, str(self.tours), str(self.bits_max),
            propriete, str(epsilon), str(n), str(m),
        ]


ENTETE_CSV = ['seed', 'verdict', 'rounds', 'max_bits', 'property', 'epsilon', 'n', 'm']


def _ports_retour(graphe: Graphe) -> List[Tuple[int, ...]]:
    """retour[v][p] = port de v chez son voisin du port p."""
    index = [{u: p for p, u in enumerate(graphe.voisins(v))} for v in graphe.sommets()]
    return [
        tuple(index[u][v] for u in graphe.voisins(v))
        for v in graphe.sommets()
    ]


def run(
    graphe: Graphe,
    programme: ProgrammeSommet,
    config: ConfigurationExecution,
    entrees: Optional[Mapping[int, Any]] = None
) -> RapportEssai:
    """
    Exécute le programme sur tous les sommets jusqu'à ce que chacun ait
    rendu son verdict (ou jusqu'au premier rejet si arret_au_rejet).

    Args:
        graphe: Réseau (et objet testé)
        programme: Programme de sommet
        config: Limite de bande, tours max, graine
        entrees: Entrée locale par sommet (sorties d'une phase précédente)

    Returns:
        RapportEssai

    Raises:
        ErreurBandePassante: message trop gros (bug du programme)
        ErreurToursMax: tours_max atteint sans verdict de tous les sommets
        ErreurConfiguration: limite de bande inférieure à un identifiant
    """
    n = graphe.n
    limite = config.limite_bande if config.limite_bande is not None else limite_bande_defaut(n)
    if limite < largeur_identifiant(n):
        raise ErreurConfiguration(
            f"Limite de bande {limite} bits inférieure à un identifiant ({largeur_identifiant(n)} bits)."
        )
    graine = config.graine
    retour = _ports_retour(graphe)
    entrees = entrees or {}

    etats: List[Any] = [None] * n
    verdicts: Dict[int, Optional[Verdict]] = {v: None for v in graphe.sommets()}
    actifs: Set[int] = set()
    eveilles: Set[int] = set()
    for v in graphe.sommets():
        ctx0 = ContexteInitial(v, graphe.degre(v), n, entrees.get(v), derive_vertex_rng(graine, v, 0))
        etats[v], verdict = programme.init(ctx0)
        if verdict is None:
            actifs.add(v)
            eveilles.add(v)
        else:
            verdicts[v] = verdict

    boites: Dict[int, Dict[int, Message]] = {}
    reveil_de: Dict[int, int] = {}
    a_reveiller: Dict[int, Set[int]] = defaultdict(set)
    tour = 0
    tours_utilises = 0
    bits_max = 0

    while actifs:
        tour += 1
        if not eveilles and not boites:
            # Tout le monde dort : avancer jusqu'au prochain réveil
            prochain = min(r for r, dormeurs in a_reveiller.items() if dormeurs and r >= tour)
            tour = max(tour, prochain)
        if tour > config.tours_max:
            raise ErreurToursMax(
                f"{programme.nom} : {len(actifs)} sommet(s) sans verdict après {config.tours_max} tours."
            )

        for v in a_reveiller.pop(tour, ()):
            if reveil_de.get(v) == tour:
                del reveil_de[v]
                eveilles.add(v)
        for v in boites:
            if v in reveil_de:
                del reveil_de[v]
            eveilles.add(v)

        nouvelles: Dict[int, Dict[int, Message]] = defaultdict(dict)
        envoi = False
        rejet = False
        for v in sorted(eveilles):
            ctx = ContexteTour(tour, graphe.degre(v), boites.get(v, {}), graine, v)
            etats[v], verdict = programme.step(etats[v], ctx)

            for port, message in ctx.envois.items():
                taille = message.taille_bits(n)
                if taille > limite:
                    raise ErreurBandePassante(
                        f"{programme.nom} : message de {taille} bits du sommet {v} au tour {tour} "
                        f"(limite {limite} bits) : {message!r}."
                    )
                bits_max = max(bits_max, taille)
                u = graphe.voisins(v)[port]
                nouvelles[u][retour[v][port]] = message
                envoi = True
            envoi = envoi or ctx.compte

            if verdict is not None:
                verdicts[v] = verdict
                actifs.discard(v)
                rejet = rejet or verdict == Verdict.REJECT
            elif ctx.reveil is not None:
                reveil_de[v] = ctx.reveil
                a_reveiller[ctx.reveil].add(v)

        eveilles = {v for v in eveilles if v in actifs and v not in reveil_de}
        boites = {u: recus for u, recus in nouvelles.items() if u in actifs}
        if envoi:
            tours_utilises = tour
        if rejet and config.arret_au_rejet:
            logger.debug("%s : arrêt au premier rejet (tour %d)", programme.nom, tour)
            break

    logger.debug(
        "%s : %d tours, %d bits max, graine %d", programme.nom, tours_utilises, bits_max, graine
    )
    return RapportEssai(
        verdicts=verdicts,
        tours=tours_utilises,
        bits_max=bits_max,
        graine=graine,
        sorties={v: programme.sortie(etats[v]) for v in graphe.sommets()},
    )


def rejouer(graphe: Graphe, programme: ProgrammeSommet, rapport: RapportEssai,
            config: ConfigurationExecution, entrees: Optional[Mapping[int, Any]] = None) -> RapportEssai:
    """Rejoue un essai à partir de la graine de son rapport."""
    config_rejeu = ConfigurationExecution(
        graine=rapport.graine,
        limite_bande=config.limite_bande,
        tours_max=config.tours_max,
        arret_au_rejet=config.arret_au_rejet,
    )
    return run(graphe, programme, config_rejeu, entrees)
