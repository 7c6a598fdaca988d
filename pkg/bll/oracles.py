"""
Couche métier (BLL) - Oracles exacts (vérité terrain).

Distances exactes à une propriété (nombre minimal de retraits d'arêtes),
comptage de copies d'un motif, couverture gloutonne par copies
arête-disjointes et test d'acyclicité par union-find.

Les recherches exhaustives sont gardées : au plus 20 sommets par
composante connexe. La distance est additive sur les composantes car tout
témoin de violation est connexe.
"""

import logging
from typing import FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np
import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher
from networkx.utils import UnionFind

from bll.erreurs import ErreurGarde
from bll.proprietes import Propriete, TypePropriete
from dal.graphe import Arete, Graphe, normaliser_arete

logger = logging.getLogger(__name__)

# Garde des recherches exhaustives (2^20 colorations reste raisonnable)
TAILLE_MAX_EXHAUSTIVE = 20

# Taille de motif au-delà de laquelle le comptage exige un petit graphe
TAILLE_MAX_MOTIF = 5

CopieMotif = FrozenSet[Arete]


def est_foret(n: int, aretes: Iterable[Arete]) -> bool:
    """Vrai si le graphe (range(n), aretes) est acyclique (union-find de networkx)."""
    uf = UnionFind(range(n))
    for u, v in aretes:
        # Arête entre deux sommets déjà reliés : elle ferme un cycle
        if uf[u] == uf[v]:
            return False
        uf.union(u, v)
    return True


def copies_du_motif(graphe: Graphe, motif: Graphe, limite: Optional[int] = None) -> List[CopieMotif]:
    """
    Énumère les sous-graphes de G isomorphes au motif (non induits).

    Chaque copie est identifiée par son ensemble d'arêtes ; les
    automorphismes du motif ne produisent donc pas de doublons.
    """
    if motif.m == 0:
        return []
    correspondance = GraphMatcher(graphe.vers_networkx(), motif.vers_networkx())
    aretes_motif = motif.aretes_triees()
    vues: Set[CopieMotif] = set()
    copies: List[CopieMotif] = []
    for plongement in correspondance.subgraph_monomorphisms_iter():
        inverse = {p: g for g, p in plongement.items()}
        copie = frozenset(normaliser_arete(inverse[a], inverse[b]) for a, b in aretes_motif)
        if copie not in vues:
            vues.add(copie)
            copies.append(copie)
            if limite is not None and len(copies) >= limite:
                break
    copies.sort(key=lambda c: sorted(c))
    return copies


def count_subgraph_copies(graphe: Graphe, motif: Graphe) -> int:
    """
    Nombre exact de sous-graphes de G isomorphes au motif.

    Raises:
        ErreurGarde: motif de plus de 5 sommets sur un graphe de plus de 20 sommets
    """
    if motif.n > TAILLE_MAX_MOTIF and graphe.n > TAILLE_MAX_EXHAUSTIVE:
        raise ErreurGarde(
            f"Comptage refusé : motif à {motif.n} sommets sur un graphe à {graphe.n} sommets "
            f"(garde : motif <= {TAILLE_MAX_MOTIF} ou n <= {TAILLE_MAX_EXHAUSTIVE})."
        )
    return len(copies_du_motif(graphe, motif))


def couverture_disjointe_gloutonne(graphe: Graphe, motif: Graphe) -> List[CopieMotif]:
    """Ensemble maximal (glouton) de copies du motif deux à deux arête-disjointes."""
    utilisees: Set[Arete] = set()
    couverture = []
    for copie in copies_du_motif(graphe, motif):
        if utilisees.isdisjoint(copie):
            couverture.append(copie)
            utilisees |= copie
    return couverture


def _transversal_minimum(copies: List[CopieMotif]) -> int:
    """Taille minimale d'un ensemble d'arêtes touchant toutes les copies (séparation et évaluation)."""
    meilleur = [len(set().union(*copies))] if copies else [0]

    def borne_inferieure(restantes: List[CopieMotif]) -> int:
        # Un empilement de copies disjointes exige une arête distincte chacune
        prises: Set[Arete] = set()
        compte = 0
        for copie in restantes:
            if prises.isdisjoint(copie):
                prises |= copie
                compte += 1
        return compte

    def explorer(restantes: List[CopieMotif], profondeur: int) -> None:
        if not restantes:
            meilleur[0] = min(meilleur[0], profondeur)
            return
        if profondeur + borne_inferieure(restantes) >= meilleur[0]:
            return
        pivot = min(restantes, key=len)
        for arete in sorted(pivot):
            explorer([c for c in restantes if arete not in c], profondeur + 1)

    explorer(copies, 0)
    return meilleur[0]


def _coupe_maximale(graphe: Graphe) -> int:
    """Coupe maximale exhaustive (le dernier sommet est fixé à la couleur 0)."""
    if graphe.n <= 1 or graphe.m == 0:
        return 0
    colorations = np.arange(1 << (graphe.n - 1), dtype=np.int64)
    coupe = np.zeros(colorations.shape, dtype=np.int32)
    for u, v in graphe.aretes:
        coupe += ((colorations >> u) ^ (colorations >> v)) & 1
    return int(coupe.max())


def _garde_composante(taille: int, propriete: Propriete) -> None:
    if taille > TAILLE_MAX_EXHAUSTIVE:
        raise ErreurGarde(
            f"Distance à {propriete.nom} non calculable : composante de {taille} sommets "
            f"(garde : {TAILLE_MAX_EXHAUSTIVE})."
        )


def dist_to_property(graphe: Graphe, propriete: Propriete) -> int:
    """
    Nombre minimal d'arêtes à retirer pour que G ait la propriété.

    Toutes les propriétés sont monotones par retrait d'arêtes : les ajouts
    sont inutiles. Sans cycle : formule m - n + c pour toute taille.

    Raises:
        ErreurGarde: composante trop grande pour la recherche exhaustive
    """
    if propriete.type == TypePropriete.CYCLE_FREE:
        return graphe.m - graphe.n + graphe.nombre_composantes()

    total = 0
    for composante in graphe.composantes():
        if len(composante) < 2:
            continue
        sous_graphe, _ = graphe.sous_graphe_induit(composante)
        if sous_graphe.m == 0:
            continue

        if propriete.type == TypePropriete.BIPARTITE:
            if nx.is_bipartite(sous_graphe.vers_networkx()):
                continue
            _garde_composante(len(composante), propriete)
            total += sous_graphe.m - _coupe_maximale(sous_graphe)
            continue

        motif = propriete.motif_interdit()
        assert motif is not None
        if len(composante) > TAILLE_MAX_EXHAUSTIVE:
            # Une grande composante sans copie ne coûte rien
            if copies_du_motif(sous_graphe, motif, limite=1):
                _garde_composante(len(composante), propriete)
            continue
        copies = copies_du_motif(sous_graphe, motif)
        if copies:
            total += _transversal_minimum(copies)

    logger.debug("dist(%r, %s) = %d", graphe, propriete.nom, total)
    return total


def satisfait(graphe: Graphe, propriete: Propriete) -> bool:
    """Vrai si G a la propriété (sans recherche de distance)."""
    if propriete.type == TypePropriete.CYCLE_FREE:
        return est_foret(graphe.n, graphe.aretes)
    if propriete.type == TypePropriete.BIPARTITE:
        return nx.is_bipartite(graphe.vers_networkx())
    motif = propriete.motif_interdit()
    assert motif is not None
    return not copies_du_motif(graphe, motif, limite=1)


def graphe_deux_coloration(graphe: Graphe) -> Optional[Tuple[int, ...]]:
    """2-coloration (0/1 par sommet) ou None si le graphe n'est pas biparti."""
    reseau = graphe.vers_networkx()
    if not nx.is_bipartite(reseau):
        return None
    couleurs = nx.bipartite.color(reseau)
    return tuple(couleurs[v] for v in range(graphe.n))
