"""
Couche métier (BLL) - Testeur d'absence d'un arbre T à k sommets.

Version globale (modèle à requêtes) : à chaque itération, une arête et
une extrémité v sont tirées uniformément, puis T est plongé récursivement
depuis v en tirant, pour chaque étiquette v_i, autant de voisins (avec
remise) que v_i a d'enfants. Toute seconde visite d'un sommet fait
abandonner la tentative.

Version distribuée : phases de 2k tours. Au premier tour d'une phase,
chaque sommet tire un rang dans [0, n²) et lance sa propre tentative ;
pendant k tours, chaque sommet ne garde que l'étiquette venant du rang
le plus élevé ; pendant les k tours suivants, les succès remontent vers
la racine, qui rejette si tout son arbre a réussi.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np

from bll.congest import (
    ContexteInitial, ContexteTour, Message, ProgrammeSommet, Verdict, entier,
    etiquette as champ_etiquette,
)
from bll.erreurs import ErreurInvariant
from bll.proprietes import MotifArbre
from config.parametres import CONSTANTE_ITERATIONS_ARBRE, PLAFOND_PHASES_ARBRE
from dal.graphe import Arete, Graphe

logger = logging.getLogger(__name__)


def iterations_arbre(
    k: int,
    epsilon: Fraction,
    constante: float = CONSTANTE_ITERATIONS_ARBRE,
    plafond: int = PLAFOND_PHASES_ARBRE
) -> int:
    """min(⌈c·k^(k²)/ε^k⌉, plafond)."""
    brut = constante * float(k) ** (k * k) / float(epsilon) ** k
    return max(1, min(math.ceil(brut), plafond))


def budget_requetes(k: int, iterations: int) -> int:
    """
    Requêtes maximales : 1 arête aléatoire plus, par sommet plongé, une
    requête de degré et une requête de voisin par enfant, soit 2k par tentative.
    """
    return 2 * k * iterations


class OracleRequetes:
    """
    Oracle du modèle à requêtes (QueryOracle) sur un graphe fixé.

    Chaque requête incrémente le compteur.
    """

    def __init__(self, graphe: Graphe, rng: np.random.Generator):
        self.graphe = graphe
        self.rng = rng
        self.requetes = 0
        self._aretes: List[Arete] = graphe.aretes_triees()

    def degre(self, v: int) -> int:
        self.requetes += 1
        return self.graphe.degre(v)

    def voisin(self, v: int, i: int) -> int:
        self.requetes += 1
        return self.graphe.voisins(v)[i]

    def arete_aleatoire(self) -> Arete:
        self.requetes += 1
        if not self._aretes:
            raise ErreurInvariant("Requête d'arête aléatoire sur un graphe sans arête.")
        return self._aretes[int(self.rng.integers(len(self._aretes)))]


def recursive_tree_exclusion(
    arbre: MotifArbre,
    i: int,
    v: int,
    etiquettes: Dict[int, int],
    oracle: OracleRequetes,
    rng: np.random.Generator
) -> bool:
    """
    Étiquette v par i puis plonge les sous-arbres des enfants de v_i.

    Retourne False dès qu'un sommet est revisité ou qu'un sommet sans
    voisin doit avoir des enfants.
    """
    if v in etiquettes:
        return False
    etiquettes[v] = i
    enfants = arbre.enfants[i]
    if not enfants:
        return True
    degre = oracle.degre(v)
    if degre == 0:
        return False
    tirages = [oracle.voisin(v, int(rng.integers(degre))) for _ in enfants]
    for enfant, u in zip(enfants, tirages):
        if not recursive_tree_exclusion(arbre, enfant, u, etiquettes, oracle, rng):
            return False
    return True


@dataclass
class ResultatArbreGlobal:
    verdict: Verdict
    tentatives: int
    requetes: int
    budget: int


def global_tree_tester(
    oracle: OracleRequetes,
    arbre: MotifArbre,
    epsilon: Fraction,
    rng: np.random.Generator,
    iterations: Optional[int] = None,
    toutes_racines: bool = False
) -> ResultatArbreGlobal:
    """
    Testeur global à erreur unilatérale, arrêt au premier plongement trouvé.

    toutes_racines : essayer les k enracinements de T à chaque itération.
    """
    if arbre.k < 2:
        raise ErreurInvariant("Le motif d'arbre doit avoir au moins 2 sommets.")
    if not 0 < epsilon <= 1:
        raise ErreurInvariant(f"ε doit être dans (0, 1], reçu {epsilon}.")
    iterations = iterations if iterations is not None else iterations_arbre(arbre.k, epsilon)
    motifs = arbre.enracinements() if toutes_racines else [arbre]
    budget = budget_requetes(arbre.k, iterations) * len(motifs)

    if oracle.graphe.m == 0:
        return ResultatArbreGlobal(Verdict.ACCEPT, 0, oracle.requetes, budget)

    for tentative in range(1, iterations + 1):
        for motif in motifs:
            arete = oracle.arete_aleatoire()
            v = arete[int(rng.integers(2))]
            if recursive_tree_exclusion(motif, 0, v, {}, oracle, rng):
                logger.debug("Arbre trouvé depuis %d (tentative %d)", v, tentative)
                return ResultatArbreGlobal(Verdict.REJECT, tentative, oracle.requetes, budget)
    return ResultatArbreGlobal(Verdict.ACCEPT, iterations, oracle.requetes, budget)


Racine = Union[None, str, int]


def probabilite_tentative_exacte(graphe: Graphe, arbre: MotifArbre, racine: Racine = None) -> Fraction:
    """
    Probabilité exacte qu'une tentative plonge T.

    racine : None (arête puis extrémité uniformes), "sommet" (sommet
    uniforme) ou un sommet fixé.
    """
    voisins = graphe.adjacence

    def succes(taches: Tuple[Tuple[int, int], ...], etiquetes: FrozenSet[int]) -> Fraction:
        if not taches:
            return Fraction(1)
        (i, v), reste = taches[0], taches[1:]
        if v in etiquetes:
            return Fraction(0)
        etiquetes = etiquetes | {v}
        enfants = arbre.enfants[i]
        if not enfants:
            return succes(reste, etiquetes)
        if not voisins[v]:
            return Fraction(0)
        total = Fraction(0)
        for tirage in product(voisins[v], repeat=len(enfants)):
            total += succes(tuple(zip(enfants, tirage)) + reste, etiquetes)
        return total / len(voisins[v]) ** len(enfants)

    def depuis(v: int) -> Fraction:
        return succes(((0, v),), frozenset())

    if isinstance(racine, int):
        return depuis(racine)
    if racine == "sommet":
        return sum((depuis(v) for v in graphe.sommets()), Fraction(0)) / graphe.n
    if graphe.m == 0:
        return Fraction(0)
    return sum(
        (Fraction(graphe.degre(v), 2 * graphe.m) * depuis(v) for v in graphe.sommets()),
        Fraction(0),
    )


# --- simulation distribuée -------------------------------------------------------

@dataclass
class _EtatArbre:
    sommet: int
    degre: int
    n: int
    rang: int = -1
    etiquette: int = 0
    port_parent: Optional[int] = None
    ports_enfants: Tuple[int, ...] = ()
    empoisonne: bool = False
    echec: bool = False
    rapports: Dict[int, int] = field(default_factory=dict)


class TesteurArbreDistribue(ProgrammeSommet):
    """Simulation CONGEST du testeur d'arbres, phases de 2k tours."""

    nom = "tree"

    def __init__(self, arbre: MotifArbre, epsilon: Fraction, phases: Optional[int] = None):
        if arbre.k < 2:
            raise ErreurInvariant("Le motif d'arbre doit avoir au moins 2 sommets.")
        self.arbre = arbre
        self.k = arbre.k
        self.phases = phases if phases is not None else iterations_arbre(arbre.k, epsilon)

    @property
    def duree_phase(self) -> int:
        return 2 * self.k

    def init(self, ctx: ContexteInitial):
        etat = _EtatArbre(sommet=ctx.sommet, degre=ctx.degre, n=ctx.n)
        if ctx.degre == 0:
            return etat, Verdict.ACCEPT
        return etat, None

    def _etiqueter(self, etat: _EtatArbre, ctx: ContexteTour, etiquette: int, rang: int,
                   port_parent: Optional[int]) -> None:
        """Adopte (étiquette, rang) et envoie les étiquettes des enfants."""
        etat.rang = rang
        etat.etiquette = etiquette
        etat.port_parent = port_parent
        etat.empoisonne = False
        etat.rapports = {}
        enfants = self.arbre.enfants[etiquette]
        etat.echec = bool(enfants) and etat.degre == 0
        ports = [int(p) for p in ctx.rng.integers(0, etat.degre, size=len(enfants))] if enfants else []
        # Deux enfants sur le même port : sommet revisité
        etat.echec = etat.echec or len(set(ports)) != len(ports)
        etat.ports_enfants = tuple(ports)
        for enfant, port in zip(enfants, ports):
            if port not in ctx.envois:
                ctx.envoyer(port, Message(champ_etiquette(enfant, self.k), entier(rang)))

    def step(self, etat: _EtatArbre, ctx: ContexteTour):
        j = (ctx.tour - 1) % self.duree_phase + 1
        phase = (ctx.tour - 1) // self.duree_phase + 1

        if j == 1:
            rang = int(ctx.rng.integers(etat.n * etat.n))
            self._etiqueter(etat, ctx, 0, rang, None)
            return etat, None

        if j <= self.k:
            # Compétition : le rang le plus élevé l'emporte
            if not ctx.recus:
                return etat, None
            recus = [(message.valeurs[1], message.valeurs[0], port) for port, message in ctx.recus.items()]
            rang_max = max(rang for rang, _, _ in recus)
            if any(rang == etat.rang for rang, _, _ in recus):
                # Étiqueté deux fois sous le même rang
                etat.empoisonne = True
            if rang_max > etat.rang:
                gagnants = [(etiquette, port) for rang, etiquette, port in recus if rang == rang_max]
                if len(gagnants) == 1:
                    etiquette, port = gagnants[0]
                    self._etiqueter(etat, ctx, etiquette, rang_max, port)
                else:
                    etat.rang = rang_max
                    etat.port_parent = gagnants[0][1]
                    etat.etiquette = gagnants[0][0]
                    etat.ports_enfants = ()
                    etat.rapports = {}
                    etat.empoisonne = True
            return etat, None

        # Vérification : le sommet de profondeur d parle au tour 2k - d
        for port, message in ctx.recus.items():
            etat.rapports[port] = message.valeurs[0]
        profondeur = self.arbre.profondeur[etat.etiquette]
        if j == self.duree_phase:
            # Décision de la racine : dernier tour de la phase
            ctx.marquer_tour()
        if j == self.duree_phase - profondeur:
            reussi = (
                not etat.echec
                and not etat.empoisonne
                and all(etat.rapports.get(p) == etat.rang for p in etat.ports_enfants)
            )
            if profondeur == 0:
                if reussi and etat.port_parent is None:
                    logger.debug("Arbre trouvé depuis %d (phase %d)", etat.sommet, phase)
                    return etat, Verdict.REJECT
            elif reussi and etat.port_parent is not None:
                ctx.envoyer(etat.port_parent, Message(entier(etat.rang)))

        if j == self.duree_phase and phase >= self.phases:
            return etat, Verdict.ACCEPT
        return etat, None


def distributed_tree_tester(
    arbre: MotifArbre, epsilon: Fraction, phases: Optional[int] = None
) -> TesteurArbreDistribue:
    return TesteurArbreDistribue(arbre, epsilon, phases)
