"""
Couche métier (BLL) - Compilation de testeurs par décomposition.

Schéma : décomposer avec ε/2, ignorer les arêtes coupées, puis lancer
dans chaque grappe un vérificateur initié par le centre. Instancié pour
la bipartition et l'acyclicité, avec le correcteur d'acyclicité et la
variante qui relance un testeur interne par grappe.

Les vérificateurs reçoivent en entrée locale la SortieDecomposition du
sommet et suivent un calendrier fixe : décision au tour borne + 2.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional, Set

from bll.congest import (
    ConfigurationExecution, ContexteInitial, ContexteTour, Message, ProgrammeSommet,
    RapportEssai, Verdict, bit, deriver_graine, run,
)
from bll.decomposition import (
    Decomposition, ProgrammeDecomposition, SortieDecomposition, decompose, executer_decomposition,
)
from bll.erreurs import ErreurInvariant
from bll.oracles import est_foret
from dal.graphe import Arete, Graphe, normaliser_arete

logger = logging.getLogger(__name__)

# Testeur interne : (graphe, ε, graine) -> rapport
Testeur = Callable[[Graphe, Fraction, int], RapportEssai]


@dataclass
class _EtatVerification:
    sortie: SortieDecomposition
    internes: List[int]
    fin: int
    couleur: Optional[int] = None
    visite: bool = False
    port_parent: Optional[int] = None


class _Verificateur(ProgrammeSommet):
    """Base commune : parcours initié par le centre sur les arêtes internes."""

    def init(self, ctx: ContexteInitial):
        sortie = ctx.entree
        if not isinstance(sortie, SortieDecomposition):
            raise ErreurInvariant(f"{self.nom} : le sommet {ctx.sommet} n'a pas reçu sa grappe.")
        etat = _EtatVerification(sortie=sortie, internes=sortie.ports_internes(), fin=sortie.borne + 2)
        if not etat.internes:
            return etat, Verdict.ACCEPT
        return etat, None

    def _terminer(self, etat: _EtatVerification, ctx: ContexteTour):
        if ctx.tour >= etat.fin:
            return etat, Verdict.ACCEPT
        ctx.dormir_jusqua(etat.fin)
        return etat, None


class VerificateurBiparti(_Verificateur):
    """Couleurs alternées par couche ; une arête interne unicolore fait rejeter."""

    nom = "verificateur-biparti"

    def step(self, etat: _EtatVerification, ctx: ContexteTour):
        if ctx.tour == 1 and etat.sortie.est_centre:
            etat.couleur = 0
            for port in etat.internes:
                ctx.envoyer(port, Message(bit(False)))
            return self._terminer(etat, ctx)

        couleurs = {message.valeurs[0] for message in ctx.recus.values()}
        if couleurs:
            if etat.couleur is None:
                if len(couleurs) > 1:
                    return etat, Verdict.REJECT
                etat.couleur = 1 - couleurs.pop()
                for port in etat.internes:
                    ctx.envoyer(port, Message(bit(etat.couleur == 1)))
            elif etat.couleur in couleurs:
                return etat, Verdict.REJECT
        return self._terminer(etat, ctx)


class VerificateurSansCycle(_Verificateur):
    """Un second passage du jeton sur un sommet révèle un cycle."""

    nom = "verificateur-sans-cycle"

    def step(self, etat: _EtatVerification, ctx: ContexteTour):
        if ctx.tour == 1 and etat.sortie.est_centre:
            etat.visite = True
            for port in etat.internes:
                ctx.envoyer(port, Message(bit(True)))
            return self._terminer(etat, ctx)

        if ctx.recus:
            if etat.visite or len(ctx.recus) >= 2:
                return etat, Verdict.REJECT
            etat.visite = True
            etat.port_parent = next(iter(ctx.recus))
            for port in etat.internes:
                if port != etat.port_parent:
                    ctx.envoyer(port, Message(bit(True)))
        return self._terminer(etat, ctx)


def bipartite_verifier() -> VerificateurBiparti:
    return VerificateurBiparti()


def cyclefree_verifier() -> VerificateurSansCycle:
    return VerificateurSansCycle()


def fusionner_rapports(premier: RapportEssai, second: RapportEssai, graine: int) -> RapportEssai:
    """Enchaîne deux phases : tours additionnés, bits au maximum, verdicts de la seconde."""
    return RapportEssai(
        verdicts=dict(second.verdicts),
        tours=premier.tours + second.tours,
        bits_max=max(premier.bits_max, second.bits_max),
        graine=graine,
        sorties=dict(second.sorties),
    )


def compiled_tester(
    graphe: Graphe,
    verificateur: ProgrammeSommet,
    epsilon: Fraction,
    graine: int,
    config: Optional[ConfigurationExecution] = None
) -> RapportEssai:
    """
    Testeur compilé : décomposition avec ε' = ε/2 puis vérificateur par grappe.

    Complétude exacte pour une propriété monotone et non disjointe :
    retirer les arêtes coupées ne crée aucun témoin.
    """
    config = config or ConfigurationExecution()
    decomposition, rapport_decomposition = executer_decomposition(graphe, epsilon / 2, graine, config)
    rapport_verification = run(
        graphe,
        verificateur,
        ConfigurationExecution(
            graine=deriver_graine(graine, 1),
            limite_bande=config.limite_bande,
            tours_max=config.tours_max,
            arret_au_rejet=config.arret_au_rejet,
        ),
        entrees=decomposition.locales,
    )
    rapport = fusionner_rapports(rapport_decomposition, rapport_verification, graine)
    logger.debug(
        "%s : %s en %d tours (%d grappes)",
        verificateur.nom, rapport.verdict.value, rapport.tours, decomposition.nombre_grappes(),
    )
    return rapport


# --- correcteur d'acyclicité -------------------------------------------------

@dataclass(frozen=True)
class SortieCorrection:
    """Sortie locale du correcteur : grappe et arêtes incidentes supprimées."""
    decomposition: SortieDecomposition
    supprimees: FrozenSet[Arete]


class ProgrammeCorrecteur(ProgrammeDecomposition):
    """
    Décomposition puis suppression locale, sans tour supplémentaire :
    E' = arêtes coupées ∪ arêtes internes hors des arbres de grappe.
    """

    nom = "correcteur-sans-cycle"

    def sortie(self, etat) -> SortieCorrection:
        locale = super().sortie(etat)
        gardes = set(locale.enfants)
        if locale.parent is not None:
            gardes.add(locale.parent)
        supprimees = frozenset(
            normaliser_arete(locale.sommet, u)
            for u, c in zip(locale.voisins, locale.grappes_voisins)
            if c != locale.centre or u not in gardes
        )
        return SortieCorrection(decomposition=locale, supprimees=supprimees)


@dataclass
class SortieCorrecteur:
    """CorrectorOutput : arêtes supprimées connues par chaque sommet."""
    supprimees: Dict[int, FrozenSet[Arete]]
    decomposition: Decomposition
    rapport: RapportEssai = field(repr=False)

    @property
    def aretes(self) -> Set[Arete]:
        resultat: Set[Arete] = set()
        for locales in self.supprimees.values():
            resultat |= locales
        return resultat

    def accord(self) -> bool:
        """Les deux extrémités de chaque arête supprimée la suppriment."""
        return all(
            arete in self.supprimees[arete[0]] and arete in self.supprimees[arete[1]]
            for arete in self.aretes
        )

    def graphe_corrige(self, graphe: Graphe) -> Graphe:
        return graphe.sans_aretes(self.aretes)

    def vers_texte(self) -> str:
        return "".join(f"deleted {u} {v}\n" for u, v in sorted(self.aretes))


def cyclefree_corrector(
    graphe: Graphe,
    epsilon: Fraction,
    graine: int,
    config: Optional[ConfigurationExecution] = None
) -> SortieCorrecteur:
    """Correcteur : (V, E \\ E') est toujours une forêt."""
    decomposition, rapport = executer_decomposition(
        graphe, epsilon, graine, config, classe=ProgrammeCorrecteur
    )
    supprimees = {v: rapport.sorties[v].supprimees for v in graphe.sommets()}
    return SortieCorrecteur(supprimees=supprimees, decomposition=decomposition, rapport=rapport)


@dataclass(frozen=True)
class BilanCorrection:
    acyclique: bool
    accord: bool
    taille: int
    distance: int
    borne_respectee: bool
    budget_respecte: bool

    @property
    def valide(self) -> bool:
        return self.acyclique and self.accord and self.budget_respecte

    def vers_texte(self) -> str:
        """Ligne de contrôle écrite après les arêtes supprimées de l'essai."""
        drapeaux = (
            f"acyclic={self.acyclique} agreement={self.accord} "
            f"budget={self.budget_respecte} bound={self.borne_respectee}"
        ).lower()
        return f"check {drapeaux} deleted={self.taille} distance={self.distance}\n"


def verifier_correction(graphe: Graphe, sortie: SortieCorrecteur, epsilon: Fraction) -> BilanCorrection:
    """
    Contrôles globaux d'une correction : acyclicité (union-find),
    |E'| <= dist + ε·m et |E \\ E'| <= n + ε·m.
    """
    supprimees = sortie.aretes
    gardees = [e for e in graphe.aretes if e not in supprimees]
    distance = graphe.m - graphe.n + graphe.nombre_composantes()
    return BilanCorrection(
        acyclique=est_foret(graphe.n, gardees),
        accord=sortie.accord(),
        taille=len(supprimees),
        distance=distance,
        borne_respectee=len(supprimees) <= distance + epsilon * graphe.m,
        budget_respecte=len(gardees) <= graphe.n + epsilon * graphe.m,
    )


# --- testeur par grappe -------------------------------------------------------

def testeur_programme(
    fabrique: Callable[[Fraction], ProgrammeSommet],
    config: Optional[ConfigurationExecution] = None
) -> Testeur:
    """Enveloppe un programme testeur paramétré par ε en Testeur."""
    base = config or ConfigurationExecution()

    def tester(graphe: Graphe, epsilon: Fraction, graine: int) -> RapportEssai:
        return run(graphe, fabrique(epsilon), ConfigurationExecution(
            graine=graine, limite_bande=base.limite_bande, tours_max=base.tours_max,
        ))
    return tester


def testeur_compile(
    fabrique: Callable[[], ProgrammeSommet],
    config: Optional[ConfigurationExecution] = None
) -> Testeur:
    """Enveloppe un vérificateur compilé en Testeur."""
    def tester(graphe: Graphe, epsilon: Fraction, graine: int) -> RapportEssai:
        return compiled_tester(graphe, fabrique(), epsilon, graine, config)
    return tester


def bootstrapped_tester(
    graphe: Graphe,
    interne: Testeur,
    epsilon: Fraction,
    graine: int,
    config: Optional[ConfigurationExecution] = None
) -> RapportEssai:
    """
    Décomposition avec ε/2 puis testeur interne indépendant dans chaque
    grappe avec ε' = ε/2. Tours = décomposition + grappe la plus lente.
    """
    decomposition = decompose(graphe, epsilon / 2, graine, config)
    verdicts: Dict[int, Optional[Verdict]] = {v: Verdict.ACCEPT for v in graphe.sommets()}
    tours_grappes = 0
    bits_max = decomposition.bits_max
    for centre, membres in sorted(decomposition.grappes().items()):
        sous_graphe, correspondance = graphe.sous_graphe_induit(membres)
        if sous_graphe.m == 0:
            continue
        rapport = interne(sous_graphe, epsilon / 2, deriver_graine(graine, centre))
        for v_local, verdict in rapport.verdicts.items():
            verdicts[correspondance[v_local]] = verdict
        tours_grappes = max(tours_grappes, rapport.tours)
        bits_max = max(bits_max, rapport.bits_max)
    return RapportEssai(
        verdicts=verdicts,
        tours=decomposition.tours + tours_grappes,
        bits_max=bits_max,
        graine=graine,
    )
