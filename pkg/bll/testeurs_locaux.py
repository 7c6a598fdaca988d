"""
Couche métier (BLL) - Testeurs locaux en O(1/ε) tours.

- Triangle : après l'échange des identifiants, chaque itération envoie à
  chaque voisin u un tirage uniforme dans N(v) \\ {u} ; le récepteur rejette
  si le sommet reçu est son voisin. Tours : 1 + t.
- C4 et motifs hamiltoniens à 4 sommets : chaque itération échange les
  valeurs B puis les chemins (v, a, b) : le milieu a est tiré avec un poids
  deg(a) - 1 et b est la valeur B de a pour v, si bien que le chemin est
  uniforme sur les chemins de longueur 2 issus de v.
  Tours : 1 + 3t (valeurs B, chemins, vérification).
- Motifs décidés par le degré (K2, P3, K1,3) : aucun tour de communication.

Les tirages sont indépendants par arête orientée et par itération.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from bll.congest import (
    ContexteInitial, ContexteTour, Message, ProgrammeSommet, TypeChamp, Verdict,
    bit, entier, sommet,
)
from bll.erreurs import ErreurInvariant
from bll.oracles import copies_du_motif
from bll.proprietes import est_connexe, nom_du_motif
from dal.graphe import Arete, Graphe

logger = logging.getLogger(__name__)

VARIANTE_MOINS_UN = "moins-un"
VARIANTE_DEGRE = "degre"


def iterations_triangle(epsilon: Fraction) -> int:
    return math.ceil(Fraction(4) / Fraction(epsilon))


def iterations_chemins(epsilon: Fraction) -> int:
    return math.ceil(Fraction(16) / Fraction(epsilon))


@dataclass(frozen=True)
class ConnaissanceVoisins:
    """NeighborKnowledge : (identifiant, degré) de chaque voisin, dans l'ordre des ports."""
    voisins: Tuple[Tuple[int, int], ...]

    @property
    def ids(self) -> Tuple[int, ...]:
        return tuple(v for v, _ in self.voisins)

    @property
    def degres(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self.voisins)

    @staticmethod
    def depuis_graphe(graphe: Graphe, v: int) -> "ConnaissanceVoisins":
        return ConnaissanceVoisins(tuple((u, graphe.degre(u)) for u in graphe.voisins(v)))


@dataclass(frozen=True)
class RapportChemin:
    """TwoPathReport : chemin ⟨origine, milieu, extrémité⟩ et bit d'adjacence origine-extrémité."""
    origine: int
    milieu: int
    extremite: int
    adjacent: Optional[bool] = None


def pi_v_distribution(
    connaissance: ConnaissanceVoisins,
    variante: str = VARIANTE_MOINS_UN
) -> Optional[np.ndarray]:
    """
    Distribution de tirage du milieu sur les voisins : poids deg(w) - 1 (ou deg(w) en
    variante "degre"). None si tous les poids sont nuls.

    Raises:
        ErreurInvariant: voisinage vide
    """
    if not connaissance.voisins:
        raise ErreurInvariant("Aucune distribution de tirage sur un voisinage vide.")
    degres = np.array(connaissance.degres, dtype=float)
    poids = degres - 1 if variante == VARIANTE_MOINS_UN else degres
    total = poids.sum()
    if total <= 0:
        return None
    return poids / total


def _tirages_hors_cible(degre: int, rng: np.random.Generator) -> np.ndarray:
    """Pour chaque port p, un port uniforme parmi les autres (-1 si aucun)."""
    if degre < 2:
        return np.full(degre, -1, dtype=np.int64)
    tirages = rng.integers(0, degre - 1, size=degre)
    return tirages + (tirages >= np.arange(degre))


def _tirer_chemin(
    origine: int,
    ids: Sequence[int],
    pi: Optional[np.ndarray],
    valeurs_b: Sequence[Optional[int]],
    rng: np.random.Generator,
    adjacence: Optional[FrozenSet[int]] = None
) -> Optional[RapportChemin]:
    if pi is None:
        return None
    index = int(rng.choice(len(ids), p=pi))
    extremite = valeurs_b[index]
    if extremite is None:
        return None
    adjacent = None if adjacence is None else extremite in adjacence
    return RapportChemin(origine, ids[index], extremite, adjacent)


def sample_2path(
    v: int,
    cible: int,
    connaissance: ConnaissanceVoisins,
    valeurs_b: Sequence[Optional[int]],
    rng: np.random.Generator,
    variante: str = VARIANTE_MOINS_UN,
    avec_bit: bool = False
) -> Optional[RapportChemin]:
    """
    Tire le chemin (v, milieu, extrémité) destiné au voisin `cible`.

    valeurs_b[i] est le tirage B du i-ème voisin pour v (None : aucun candidat).
    Retourne None sous la distribution nulle.
    """
    if cible not in connaissance.ids:
        raise ErreurInvariant(f"{cible} n'est pas un voisin de {v}.")
    pi = pi_v_distribution(connaissance, variante)
    adjacence = frozenset(connaissance.ids) if avec_bit else None
    return _tirer_chemin(v, connaissance.ids, pi, valeurs_b, rng, adjacence)


def chemins_deux(graphe: Graphe, v: int) -> List[Tuple[int, int, int]]:
    """Chemins de longueur 2 (v, a, b) avec a ∈ N(v), b ∈ N(a) \\ {v}."""
    return [(v, a, b) for a in graphe.voisins(v) for b in graphe.voisins(a) if b != v]


def probabilite_detection_triangle(graphe: Graphe, v: int, u: int) -> Fraction:
    """P(le tirage de v pour u tombe dans N(u)) sur une itération."""
    if graphe.degre(v) < 2:
        return Fraction(0)
    communs = set(graphe.voisins(v)) & set(graphe.voisins(u))
    return Fraction(len(communs), graphe.degre(v) - 1)


def probabilite_detection_chemin(
    graphe: Graphe, v: int, u: int, variante: str = VARIANTE_MOINS_UN
) -> Fraction:
    """
    Probabilité exacte que le chemin envoyé par v à u ferme un C4 avec u.

    Somme sur les milieux a (pondérés) et les extrémités b (uniformes dans N(a) \\ {v}).
    """
    voisins = graphe.voisins(v)
    poids = [
        graphe.degre(a) - 1 if variante == VARIANTE_MOINS_UN else graphe.degre(a)
        for a in voisins
    ]
    total = sum(poids)
    if total == 0:
        return Fraction(0)
    probabilite = Fraction(0)
    for a, p in zip(voisins, poids):
        autres = [b for b in graphe.voisins(a) if b != v]
        if p == 0 or not autres:
            continue
        bons = sum(1 for b in autres if len({u, v, a, b}) == 4 and graphe.a_arete(b, u))
        probabilite += Fraction(p, total) * Fraction(bons, len(autres))
    return probabilite


# --- programmes de sommet -------------------------------------------------------

@dataclass
class _EtatLocal:
    sommet: int
    degre: int
    voisins: Tuple[int, ...] = ()
    adjacence: FrozenSet[int] = frozenset()
    pi: Optional[np.ndarray] = None
    valeurs_b: Tuple[Optional[int], ...] = ()


class TesteurTriangle(ProgrammeSommet):
    """Test de l'absence de triangle en 1 + t tours, t = ⌈4/ε⌉."""

    nom = "triangle"

    def __init__(self, epsilon: Fraction, iterations: Optional[int] = None):
        self.iterations = iterations if iterations is not None else iterations_triangle(epsilon)

    def init(self, ctx: ContexteInitial):
        etat = _EtatLocal(sommet=ctx.sommet, degre=ctx.degre)
        if ctx.degre == 0:
            return etat, Verdict.ACCEPT
        return etat, None

    def step(self, etat: _EtatLocal, ctx: ContexteTour):
        if ctx.tour == 1:
            ctx.diffuser(Message(sommet(etat.sommet)))
            return etat, None
        if ctx.tour == 2:
            voisins = [0] * etat.degre
            for port, message in ctx.recus.items():
                voisins[port] = message.valeurs[0]
            etat.voisins = tuple(voisins)
            etat.adjacence = frozenset(voisins)
        else:
            for message in ctx.recus.values():
                champ = message.champs[0]
                if champ.type == TypeChamp.SOMMET and champ.valeur in etat.adjacence:
                    return etat, Verdict.REJECT

        if ctx.tour > self.iterations + 1:
            return etat, Verdict.ACCEPT
        for port, choisi in enumerate(_tirages_hors_cible(etat.degre, ctx.rng)):
            if choisi < 0:
                ctx.envoyer(port, Message(bit(False)))  # aucun candidat
            else:
                ctx.envoyer(port, Message(sommet(etat.voisins[choisi])))
        return etat, None


class TesteurChemins(ProgrammeSommet):
    """
    Test par 2-chemins en 1 + 3t tours, t = ⌈16/ε⌉ : chaque itération envoie
    les valeurs B, puis les chemins, puis vérifie les chemins reçus.

    Sans motif : absence de C4 (le récepteur u rejette sur ⟨w, a, b⟩ si
    u, w, a, b sont distincts et b ∈ N(u)). Avec un motif à 4 sommets :
    le chemin porte le bit w~b et le récepteur rejette si le motif est
    sous-graphe du graphe reconstruit sur {u, w, a, b}.
    """

    def __init__(
        self,
        epsilon: Fraction,
        iterations: Optional[int] = None,
        motif: Optional[Graphe] = None,
        variante: str = VARIANTE_MOINS_UN
    ):
        self.iterations = iterations if iterations is not None else iterations_chemins(epsilon)
        self.motif = motif
        self.variante = variante
        self.nom = "c4" if motif is None else f"h4:{nom_du_motif(motif)}"
        self._contient: Dict[FrozenSet[Arete], bool] = {}

    def init(self, ctx: ContexteInitial):
        etat = _EtatLocal(sommet=ctx.sommet, degre=ctx.degre)
        if ctx.degre == 0:
            return etat, Verdict.ACCEPT
        return etat, None

    def _motif_present(self, aretes: FrozenSet[Arete]) -> bool:
        if aretes not in self._contient:
            assert self.motif is not None
            self._contient[aretes] = bool(copies_du_motif(Graphe(4, aretes), self.motif, limite=1))
        return self._contient[aretes]

    def _rejette(self, etat: _EtatLocal, message: Message) -> bool:
        valeurs = message.valeurs
        w, a, b = valeurs[0], valeurs[1], valeurs[2]
        u = etat.sommet
        if len({u, w, a, b}) != 4:
            return False
        if self.motif is None:
            return b in etat.adjacence
        # Sommets locaux : u=0, w=1, a=2, b=3
        paires = [(0, 1), (1, 2), (2, 3)]
        if a in etat.adjacence:
            paires.append((0, 2))
        if b in etat.adjacence:
            paires.append((0, 3))
        if valeurs[3]:
            paires.append((1, 3))
        return self._motif_present(frozenset(paires))

    def _envoyer_b(self, etat: _EtatLocal, ctx: ContexteTour) -> None:
        for port, choisi in enumerate(_tirages_hors_cible(etat.degre, ctx.rng)):
            if choisi < 0:
                ctx.envoyer(port, Message(bit(False)))
            else:
                ctx.envoyer(port, Message(sommet(etat.voisins[choisi])))

    def step(self, etat: _EtatLocal, ctx: ContexteTour):
        tour = ctx.tour
        if tour == 1:
            ctx.diffuser(Message(sommet(etat.sommet), entier(etat.degre)))
            return etat, None

        if tour == 2:
            connus = [(0, 0)] * etat.degre
            for port, message in ctx.recus.items():
                connus[port] = (message.valeurs[0], message.valeurs[1])
            connaissance = ConnaissanceVoisins(tuple(connus))
            etat.voisins = connaissance.ids
            etat.adjacence = frozenset(etat.voisins)
            etat.pi = pi_v_distribution(connaissance, self.variante)

        etape = (tour - 2) % 3
        if etape == 0:
            self._envoyer_b(etat, ctx)
            return etat, None

        if etape == 1:
            # Tour des chemins : les valeurs B de l'itération sont arrivées
            valeurs_b: List[Optional[int]] = [None] * etat.degre
            for port, message in ctx.recus.items():
                champ = message.champs[0]
                if champ.type == TypeChamp.SOMMET:
                    valeurs_b[port] = champ.valeur
            etat.valeurs_b = tuple(valeurs_b)
            adjacence = etat.adjacence if self.motif is not None else None
            for port in range(etat.degre):
                chemin = _tirer_chemin(etat.sommet, etat.voisins, etat.pi, etat.valeurs_b, ctx.rng, adjacence)
                if chemin is None:
                    continue
                champs = [sommet(chemin.origine), sommet(chemin.milieu), sommet(chemin.extremite)]
                if self.motif is not None:
                    champs.append(bit(bool(chemin.adjacent)))
                ctx.envoyer(port, Message(*champs))
            return etat, None

        # Tour de vérification des chemins reçus
        ctx.marquer_tour()
        for message in ctx.recus.values():
            if self._rejette(etat, message):
                return etat, Verdict.REJECT
        if (tour - 1) // 3 >= self.iterations:
            return etat, Verdict.ACCEPT
        return etat, None


class TesteurDegre(ProgrammeSommet):
    """Étoile K1,s : présente dès qu'un sommet a au moins s voisins (0 tour)."""

    def __init__(self, seuil: int, nom: str):
        self.seuil = seuil
        self.nom = nom

    def init(self, ctx: ContexteInitial):
        return None, Verdict.REJECT if ctx.degre >= self.seuil else Verdict.ACCEPT

    def step(self, etat, ctx: ContexteTour):
        return etat, Verdict.ACCEPT


def triangle_tester(epsilon: Fraction, iterations: Optional[int] = None) -> TesteurTriangle:
    return TesteurTriangle(epsilon, iterations)


def c4_tester(
    epsilon: Fraction, iterations: Optional[int] = None, variante: str = VARIANTE_MOINS_UN
) -> TesteurChemins:
    return TesteurChemins(epsilon, iterations, None, variante)


def h4_tester(
    motif: Graphe,
    epsilon: Fraction,
    iterations: Optional[int] = None,
    variante: str = VARIANTE_MOINS_UN
) -> ProgrammeSommet:
    """
    Testeur de H-absence pour H connexe à 2, 3 ou 4 sommets.

    Raises:
        ErreurInvariant: motif non connexe ou de taille non supportée
    """
    if not 2 <= motif.n <= 4 or not est_connexe(motif):
        raise ErreurInvariant(f"Motif non supporté : {motif!r} (connexe, 2 à 4 sommets).")
    nom = f"h4:{nom_du_motif(motif)}"
    degre_max = max(motif.degre(v) for v in motif.sommets())
    if motif.m == motif.n - 1 and degre_max == motif.n - 1:
        # K2, P3 et K1,3 sont des étoiles
        return TesteurDegre(motif.n - 1, nom)
    if motif.n == 3:
        testeur = TesteurTriangle(epsilon, iterations)
        testeur.nom = nom
        return testeur
    return TesteurChemins(epsilon, iterations, motif, variante)
