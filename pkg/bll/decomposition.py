"""
Couche métier (BLL) - Décomposition en grappes de faible diamètre.

Décalages exponentiels : chaque sommet v tire δ_v ~ Exp(β) et démarre un
parcours en largeur au temps plafond - ⌊δ_v⌋ s'il n'a pas déjà été
capturé. Un sommet rejoint la première vague qui l'atteint (à égalité,
le plus petit identifiant de centre, puis le plus petit émetteur comme
parent). Le rayon d'une grappe est donc au plus ⌊δ_centre⌋ <= plafond.

Déroulement en tours :
- tour 1 : échange des identifiants ;
- tour 2 + τ : vagues du temps τ (0 <= τ <= plafond) ;
- tour plafond + 3 : chaque sommet connaît sa grappe, son parent, ses
  enfants et les grappes de ses voisins, donc ses arêtes coupées.
"""

import enum
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Set, Tuple, Type

from bll.congest import (
    ConfigurationExecution, ContexteInitial, ContexteTour, Message, ProgrammeSommet,
    RapportEssai, Verdict, bit, deriver_graine, run, sommet,
)
from bll.erreurs import ErreurInvariant, ErreurToursMax
from config.parametres import CONSTANTE_TOURS_DECOMPOSITION
from dal.graphe import Arete, Graphe, normaliser_arete

logger = logging.getLogger(__name__)

TENTATIVES_MAX = 20


@dataclass(frozen=True)
class ParametresDecalage:
    """Paramètres des décalages exponentiels (ShiftParams)."""
    beta: float
    plafond: int
    departage: str = "centre-min"

    def __post_init__(self):
        if not self.beta > 0:
            raise ErreurInvariant(f"Le taux β doit être strictement positif, reçu {self.beta}.")
        if self.plafond < 1:
            raise ErreurInvariant(f"Le plafond doit être >= 1, reçu {self.plafond}.")

    @staticmethod
    def depuis_epsilon(epsilon: Fraction, n: int) -> "ParametresDecalage":
        """β = ε/3 et plafond = ⌈2·ln(n)/β⌉ : P(δ_v > plafond) <= 1/n²."""
        if not 0 < epsilon <= 1:
            raise ErreurInvariant(f"ε doit être dans (0, 1], reçu {epsilon}.")
        beta = float(epsilon) / 3
        plafond = max(1, math.ceil(2 * math.log(max(n, 1)) / beta))
        return ParametresDecalage(beta=beta, plafond=plafond)


def borne_tours_decomposition(n: int, epsilon: Fraction) -> float:
    """Borne C·max(1, log2 n)/ε + 3 sur les tours d'une tentative."""
    return CONSTANTE_TOURS_DECOMPOSITION * max(1.0, math.log2(max(n, 1))) / float(epsilon) + 3


@dataclass(frozen=True)
class SortieDecomposition:
    """Ce que chaque sommet sait à la fin de la décomposition."""
    sommet: int
    centre: int
    parent: Optional[int]
    voisins: Tuple[int, ...]
    grappes_voisins: Tuple[int, ...]
    enfants: FrozenSet[int]
    borne: int
    depasse: bool = False

    @property
    def est_centre(self) -> bool:
        return self.parent is None

    def ports_internes(self) -> List[int]:
        return [p for p, c in enumerate(self.grappes_voisins) if c == self.centre]

    def aretes_coupees(self) -> Set[Arete]:
        return {
            normaliser_arete(self.sommet, u)
            for u, c in zip(self.voisins, self.grappes_voisins) if c != self.centre
        }


@dataclass
class _EtatDecomposition:
    sommet: int
    degre: int
    depart: int
    depasse: bool
    voisins: Tuple[int, ...] = ()
    centre: Optional[int] = None
    port_parent: Optional[int] = None
    grappes_voisins: List[Optional[int]] = field(default_factory=list)
    ports_enfants: Set[int] = field(default_factory=set)


class ProgrammeDecomposition(ProgrammeSommet):
    """Programme de sommet de la décomposition par décalages exponentiels."""

    nom = "decomposition"

    def __init__(self, parametres: ParametresDecalage):
        self.parametres = parametres

    @property
    def tour_final(self) -> int:
        return self.parametres.plafond + 3

    def init(self, ctx: ContexteInitial):
        plafond = self.parametres.plafond
        delta = float(ctx.rng.exponential(1.0 / self.parametres.beta))
        decalage = min(math.floor(delta), plafond)
        etat = _EtatDecomposition(
            sommet=ctx.sommet,
            degre=ctx.degre,
            depart=plafond - decalage,
            depasse=delta > plafond and ctx.degre > 0,
            grappes_voisins=[None] * ctx.degre,
        )
        if ctx.degre == 0:
            etat.centre = ctx.sommet
            return etat, Verdict.ACCEPT
        return etat, None

    def step(self, etat: _EtatDecomposition, ctx: ContexteTour):
        if ctx.tour == 1:
            ctx.diffuser(Message(sommet(etat.sommet)))
            return etat, None

        candidats: List[Tuple[int, int, Optional[int]]] = []
        if ctx.tour == 2:
            voisins = [0] * etat.degre
            for port, message in ctx.recus.items():
                voisins[port] = message.valeurs[0]
            etat.voisins = tuple(voisins)
        else:
            for port, message in ctx.recus.items():
                centre, est_parent = message.valeurs
                etat.grappes_voisins[port] = centre
                if est_parent:
                    etat.ports_enfants.add(port)
                candidats.append((centre, etat.voisins[port], port))

        if etat.centre is None:
            if etat.depart == ctx.tour - 2:
                candidats.append((etat.sommet, etat.sommet, None))
            if candidats:
                centre, _, port = min(candidats, key=lambda c: (c[0], c[1]))
                etat.centre = centre
                etat.port_parent = port
                for p in range(etat.degre):
                    ctx.envoyer(p, Message(sommet(centre), bit(p == port)))

        if ctx.tour >= self.tour_final:
            return etat, Verdict.ACCEPT
        if etat.centre is None:
            ctx.dormir_jusqua(2 + etat.depart)
        else:
            ctx.dormir_jusqua(self.tour_final)
        return etat, None

    def sortie(self, etat: _EtatDecomposition) -> SortieDecomposition:
        assert etat.centre is not None
        return SortieDecomposition(
            sommet=etat.sommet,
            centre=etat.centre,
            parent=None if etat.port_parent is None else etat.voisins[etat.port_parent],
            voisins=etat.voisins,
            grappes_voisins=tuple(c if c is not None else -1 for c in etat.grappes_voisins),
            enfants=frozenset(etat.voisins[p] for p in etat.ports_enfants),
            borne=self.parametres.plafond,
            depasse=etat.depasse,
        )


@dataclass
class Decomposition:
    """
    Partition en grappes, pointeurs parents et arêtes coupées.

    cluster_de[v] est l'identifiant du centre de la grappe de v ;
    parent_de[v] vaut None aux centres.
    """
    cluster_de: Tuple[int, ...]
    parent_de: Tuple[Optional[int], ...]
    aretes_coupees: FrozenSet[Arete]
    borne_diametre: int
    tours: int = 0
    tentatives: int = 1
    graine: int = 0
    bits_max: int = 0
    locales: Dict[int, SortieDecomposition] = field(default_factory=dict, compare=False, repr=False)

    @staticmethod
    def depuis_sorties(
        sorties: Dict[int, SortieDecomposition], borne: int, **extra
    ) -> "Decomposition":
        n = len(sorties)
        coupees: Set[Arete] = set()
        for sortie in sorties.values():
            coupees |= sortie.aretes_coupees()
        return Decomposition(
            cluster_de=tuple(sorties[v].centre for v in range(n)),
            parent_de=tuple(sorties[v].parent for v in range(n)),
            aretes_coupees=frozenset(coupees),
            borne_diametre=borne,
            locales=dict(sorties),
            **extra,
        )

    def grappes(self) -> Dict[int, List[int]]:
        resultat: Dict[int, List[int]] = {}
        for v, c in enumerate(self.cluster_de):
            resultat.setdefault(c, []).append(v)
        return resultat

    def nombre_grappes(self) -> int:
        return len(set(self.cluster_de))

    def fraction_coupee(self, m: int) -> float:
        return len(self.aretes_coupees) / m if m else 0.0

    def vers_texte(self) -> str:
        """Format "v grappe parent" puis "cut u v" (aretes triées)."""
        lignes = [
            f"{v} {c} {'-' if p is None else p}"
            for v, (c, p) in enumerate(zip(self.cluster_de, self.parent_de))
        ]
        lignes.extend(f"cut {u} {v}" for u, v in sorted(self.aretes_coupees))
        return "\n".join(lignes) + "\n"


def executer_decomposition(
    graphe: Graphe,
    epsilon: Fraction,
    graine: int,
    config: Optional[ConfigurationExecution] = None,
    classe: Type[ProgrammeDecomposition] = ProgrammeDecomposition,
) -> Tuple[Decomposition, RapportEssai]:
    """
    Exécute un programme de décomposition, avec redémarrage si un décalage
    dépasse le plafond. Retourne la décomposition et le dernier rapport.

    Raises:
        ErreurToursMax: TENTATIVES_MAX tentatives sans décomposition valide
    """
    config = config or ConfigurationExecution()
    parametres = ParametresDecalage.depuis_epsilon(epsilon, graphe.n)
    programme = classe(parametres)
    tours = 0
    bits_max = 0
    for tentative in range(TENTATIVES_MAX):
        graine_tentative = graine if tentative == 0 else deriver_graine(graine, tentative)
        rapport = run(graphe, programme, ConfigurationExecution(
            graine=graine_tentative,
            limite_bande=config.limite_bande,
            tours_max=config.tours_max,
        ))
        tours += rapport.tours
        bits_max = max(bits_max, rapport.bits_max)
        if any(s.depasse for s in _sorties_decomposition(rapport)):
            logger.info("Décalage au-delà du plafond (graine %d), nouvelle tentative", graine_tentative)
            continue
        decomposition = Decomposition.depuis_sorties(
            {v: _sortie_decomposition(rapport.sorties[v]) for v in graphe.sommets()},
            parametres.plafond,
            tours=tours,
            tentatives=tentative + 1,
            graine=graine,
            bits_max=bits_max,
        )
        rapport.tours = tours
        rapport.bits_max = bits_max
        return decomposition, rapport
    raise ErreurToursMax(
        f"Décomposition : {TENTATIVES_MAX} tentatives avec un décalage au-delà du plafond "
        f"{parametres.plafond}."
    )


def _sortie_decomposition(sortie) -> SortieDecomposition:
    # Les programmes dérivés (correcteur) enveloppent la sortie de décomposition
    return getattr(sortie, 'decomposition', sortie)


def _sorties_decomposition(rapport: RapportEssai) -> List[SortieDecomposition]:
    return [_sortie_decomposition(s) for s in rapport.sorties.values()]


def decompose(
    graphe: Graphe,
    epsilon: Fraction,
    graine: int,
    config: Optional[ConfigurationExecution] = None
) -> Decomposition:
    """Décomposition (ε, O(log n/ε)) calculée sur le simulateur CONGEST."""
    decomposition, _ = executer_decomposition(graphe, epsilon, graine, config)
    logger.debug(
        "Décomposition de %r : %d grappes, %d arêtes coupées, %d tours",
        graphe, decomposition.nombre_grappes(), len(decomposition.aretes_coupees), decomposition.tours,
    )
    return decomposition


# --- vérification globale ----------------------------------------------------

class TypeViolation(enum.Enum):
    PARTITION = "partition invalide"
    CENTRE_ABSENT = "grappe sans centre"
    PARENT_NON_VOISIN = "parent non voisin"
    ARBRE_HORS_GRAPPE = "arbre hors grappe"
    CYCLE_PARENTS = "cycle de parents"
    ARETE_NON_CLASSEE = "arête non classée"
    ARETE_INTERNE_COUPEE = "arête interne marquée coupée"
    COUPE_INCONNUE = "arête coupée absente du graphe"
    GRAPPE_NON_CONNEXE = "grappe non connexe"
    DIAMETRE = "borne de diamètre dépassée"


@dataclass(frozen=True)
class Violation:
    type: TypeViolation
    detail: str

    def __str__(self):
        return f"{self.type.value} : {self.detail}"


@dataclass
class RapportDecomposition:
    violations: List[Violation]
    fraction_coupee: float
    depasse_epsilon: bool
    excentricite_max: int

    @property
    def valide(self) -> bool:
        return not self.violations

    def types(self) -> Set[TypeViolation]:
        return {v.type for v in self.violations}


def _excentricite(graphe: Graphe, centre: int, membres: Set[int]) -> Optional[int]:
    """Excentricité du centre dans le sous-graphe induit, None si non connexe."""
    distance = {centre: 0}
    file = deque([centre])
    while file:
        x = file.popleft()
        for y in graphe.voisins(x):
            if y in membres and y not in distance:
                distance[y] = distance[x] + 1
                file.append(y)
    if len(distance) != len(membres):
        return None
    return max(distance.values())


def verify_decomposition(graphe: Graphe, d: Decomposition, epsilon: Fraction) -> RapportDecomposition:
    """
    Vérifie une décomposition terminée ; ne lève jamais d'exception.

    Contrôles : partition, pointeurs parents internes menant au centre,
    classement de chaque arête, excentricité du centre dans sa grappe.
    """
    violations: List[Violation] = []

    def signaler(type_violation: TypeViolation, detail: str) -> None:
        violations.append(Violation(type_violation, detail))

    if len(d.cluster_de) != graphe.n or len(d.parent_de) != graphe.n:
        signaler(TypeViolation.PARTITION, f"{len(d.cluster_de)} grappes pour {graphe.n} sommets")
        return RapportDecomposition(violations, 0.0, False, 0)

    grappes = d.grappes()
    for centre, membres in grappes.items():
        if not 0 <= centre < graphe.n or d.cluster_de[centre] != centre:
            signaler(TypeViolation.CENTRE_ABSENT, f"grappe {centre}")

    for v in graphe.sommets():
        p = d.parent_de[v]
        if p is None:
            if d.cluster_de[v] != v:
                signaler(TypeViolation.CENTRE_ABSENT, f"sommet {v} sans parent hors centre")
            continue
        if not (0 <= p < graphe.n and graphe.a_arete(v, p)):
            signaler(TypeViolation.PARENT_NON_VOISIN, f"{v} -> {p}")
        elif d.cluster_de[p] != d.cluster_de[v]:
            signaler(TypeViolation.ARBRE_HORS_GRAPPE, f"{v} -> {p}")

    # Les pointeurs doivent mener au centre sans boucler
    for v in graphe.sommets():
        x, pas = v, 0
        while d.parent_de[x] is not None and pas <= graphe.n:
            suivant = d.parent_de[x]
            if not 0 <= suivant < graphe.n:
                break
            x, pas = suivant, pas + 1
        if pas > graphe.n:
            signaler(TypeViolation.CYCLE_PARENTS, f"depuis {v}")

    for u, v in graphe.aretes_triees():
        interne = d.cluster_de[u] == d.cluster_de[v]
        coupee = (u, v) in d.aretes_coupees
        if interne and coupee:
            signaler(TypeViolation.ARETE_INTERNE_COUPEE, f"{u} {v}")
        elif not interne and not coupee:
            signaler(TypeViolation.ARETE_NON_CLASSEE, f"{u} {v}")
    for u, v in sorted(d.aretes_coupees):
        if not (0 <= u < graphe.n and 0 <= v < graphe.n and graphe.a_arete(u, v)):
            signaler(TypeViolation.COUPE_INCONNUE, f"{u} {v}")

    excentricite_max = 0
    for centre, membres in grappes.items():
        if not 0 <= centre < graphe.n:
            continue
        excentricite = _excentricite(graphe, centre, set(membres))
        if excentricite is None:
            signaler(TypeViolation.GRAPPE_NON_CONNEXE, f"grappe {centre}")
            continue
        excentricite_max = max(excentricite_max, excentricite)
        if excentricite > d.borne_diametre:
            signaler(TypeViolation.DIAMETRE, f"grappe {centre} : {excentricite} > {d.borne_diametre}")

    fraction = d.fraction_coupee(graphe.m)
    return RapportDecomposition(
        violations=violations,
        fraction_coupee=fraction,
        depasse_epsilon=fraction > epsilon,
        excentricite_max=excentricite_max,
    )
