"""
Couche métier (BLL) - Générateurs d'instances certifiées.

Deux familles :
- instances ε-éloignées : union disjointe de copies d'un motif, avec un
  certificat par propriété violée (distance exacte par oracle sur une
  copie, multipliée par le nombre de copies) ;
- instances qui satisfont la propriété (côté complétude), vérifiées par
  oracle avant d'être retournées.

Toutes les sorties sont déterministes pour (entrées, graine).
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
import networkx as nx

from bll.erreurs import ErreurInvariant
from bll.oracles import dist_to_property, satisfait
from bll.proprietes import (
    CertificatEloignement, MotifArbre, Propriete, TypePropriete, est_connexe,
)
from dal.graphe import Arete, Graphe

logger = logging.getLogger(__name__)


def union_disjointe(graphes: Sequence[Graphe]) -> Graphe:
    """Union disjointe, les sommets du i-ème graphe sont décalés à la suite."""
    aretes: List[Arete] = []
    decalage = 0
    for graphe in graphes:
        aretes.extend((u + decalage, v + decalage) for u, v in graphe.aretes)
        decalage += graphe.n
    return Graphe(decalage, aretes)


def arbre_depuis_graphe(graphe: Graphe) -> Optional[MotifArbre]:
    """MotifArbre enraciné en 0 si le graphe est un arbre, None sinon."""
    if not est_connexe(graphe) or graphe.m != graphe.n - 1 or graphe.n < 2:
        return None
    parent = {}
    file = [0]
    vus = {0}
    for x in file:
        for y in graphe.voisins(x):
            if y not in vus:
                vus.add(y)
                parent[y] = x
                file.append(y)
    # Réétiqueter dans l'ordre du parcours pour que les parents précèdent les enfants
    ordre = {v: i for i, v in enumerate(file)}
    return MotifArbre(graphe.n, {ordre[v]: ordre[p] for v, p in parent.items()})


def proprietes_candidates(motif: Graphe) -> List[Propriete]:
    """Propriétés qu'une copie du motif peut violer."""
    candidates = [
        Propriete.triangle_free(),
        Propriete.c4_free(),
        Propriete.bipartite(),
        Propriete.cycle_free(),
    ]
    if 2 <= motif.n <= 4:
        candidates.append(Propriete.h_free(motif))
    arbre = arbre_depuis_graphe(motif)
    if arbre is not None:
        candidates.append(Propriete.tree_free(arbre))
    return candidates


def gen_disjoint_copies(
    motif: Graphe,
    copies: int
) -> Tuple[Graphe, Tuple[CertificatEloignement, ...]]:
    """
    Union disjointe de `copies` copies du motif et ses certificats.

    Pour chaque propriété violée par le motif, la distance d'une copie est
    calculée par oracle ; la disjonction la multiplie par `copies`, ce qui
    rend l'instance exactement (distance/m)-éloignée.

    Raises:
        ErreurInvariant: motif non connexe ou nombre de copies non positif
    """
    if copies < 1:
        raise ErreurInvariant(f"Nombre de copies invalide : {copies}.")
    if not est_connexe(motif) or motif.m == 0:
        raise ErreurInvariant("Le motif doit être connexe avec au moins une arête.")

    graphe = union_disjointe([motif] * copies)
    certificats = []
    for propriete in proprietes_candidates(motif):
        par_copie = dist_to_property(motif, propriete)
        if par_copie == 0:
            continue
        distance = par_copie * copies
        certificats.append(CertificatEloignement(
            propriete=propriete,
            epsilon=Fraction(distance, graphe.m),
            distance=distance,
            m=graphe.m,
        ))
    logger.info("%d copies générées (%r), %d certificats", copies, graphe, len(certificats))
    return graphe, tuple(certificats)


def certificat_pour(
    certificats: Sequence[CertificatEloignement],
    propriete: Propriete
) -> Optional[CertificatEloignement]:
    for certificat in certificats:
        if certificat.propriete == propriete:
            return certificat
    return None


# --- instances qui satisfont la propriété -----------------------------------

def _graphe_biparti(n: int, rng: np.random.Generator) -> Graphe:
    cote = rng.integers(0, 2, size=n)
    p = min(1.0, 4.0 / max(n, 1))
    aretes = [
        (u, v) for u in range(n) for v in range(u + 1, n)
        if cote[u] != cote[v] and rng.random() < p
    ]
    return Graphe(n, aretes)


def _foret(n: int, rng: np.random.Generator) -> Graphe:
    aretes = [(v, int(rng.integers(0, v))) for v in range(1, n) if rng.random() < 0.85]
    return Graphe(n, aretes)


def _biparti_sans_c4(n: int, rng: np.random.Generator) -> Graphe:
    """Graphe biparti de maille > 4 : sans triangle et sans C4."""
    cote = rng.integers(0, 2, size=n)
    gauche = [v for v in range(n) if cote[v] == 0]
    droite = [v for v in range(n) if cote[v] == 1]
    voisins: List[Set[int]] = [set() for _ in range(n)]
    aretes: List[Arete] = []
    cible = (3 * n) // 2
    paires = [(a, b) for a in gauche for b in droite]
    for indice in rng.permutation(len(paires)):
        if len(aretes) >= cible:
            break
        a, b = paires[int(indice)]
        # a-x-y-b-a serait un C4
        if any(voisins[x] & voisins[b] for x in voisins[a]):
            continue
        voisins[a].add(b)
        voisins[b].add(a)
        aretes.append((a, b))
    return Graphe(n, aretes)


def _decouper(n: int, rng: np.random.Generator, taille_max: int) -> List[List[int]]:
    ordre = [int(v) for v in rng.permutation(n)]
    morceaux = []
    debut = 0
    while debut < n:
        taille = int(rng.integers(1, taille_max + 1))
        morceaux.append(ordre[debut:debut + taille])
        debut += taille
    return morceaux


def _chemins_disjoints(n: int, rng: np.random.Generator) -> Graphe:
    aretes = []
    for morceau in _decouper(n, rng, 6):
        aretes.extend(zip(morceau, morceau[1:]))
    return Graphe(n, aretes)


def _etoiles_disjointes(n: int, rng: np.random.Generator) -> Graphe:
    aretes = []
    for morceau in _decouper(n, rng, 7):
        aretes.extend((morceau[0], feuille) for feuille in morceau[1:])
    return Graphe(n, aretes)


def _couplage(n: int, rng: np.random.Generator) -> Graphe:
    ordre = [int(v) for v in rng.permutation(n)]
    return Graphe(n, [(ordre[i], ordre[i + 1]) for i in range(0, n - 1, 2)])


def _instance_sans_arbre(arbre: MotifArbre, n: int, rng: np.random.Generator) -> Graphe:
    degre_max = max(arbre.degre(i) for i in range(arbre.k))
    if arbre.k == 2:
        return Graphe(n)
    if degre_max == arbre.k - 1:
        # T est une étoile K_{1,k-1} : rester sous ce degré
        return _couplage(n, rng) if arbre.k == 3 else _chemins_disjoints(n, rng)
    # T a un diamètre >= 3 : les étoiles ne le contiennent pas
    return _etoiles_disjointes(n, rng)


def _instance_sans_h(motif: Graphe, n: int, rng: np.random.Generator) -> Graphe:
    arbre = arbre_depuis_graphe(motif)
    if arbre is None:
        # Tout motif connexe à <= 4 sommets avec un cycle contient un triangle ou un C4
        return _biparti_sans_c4(n, rng)
    return _instance_sans_arbre(arbre, n, rng)


def gen_property_instance(propriete: Propriete, n: int, seed: int) -> Graphe:
    """
    Graphe aléatoire à n sommets qui satisfait la propriété.

    Raises:
        ErreurInvariant: n < 1
        RuntimeError: l'instance ne passe pas l'oracle (bug du générateur)
    """
    if n < 1:
        raise ErreurInvariant(f"n doit être >= 1, reçu {n}.")
    rng = np.random.default_rng(seed)

    if propriete.type == TypePropriete.BIPARTITE:
        graphe = _graphe_biparti(n, rng)
    elif propriete.type == TypePropriete.CYCLE_FREE:
        graphe = _foret(n, rng)
    elif propriete.type in (TypePropriete.TRIANGLE_FREE, TypePropriete.C4_FREE):
        graphe = _biparti_sans_c4(n, rng)
    elif propriete.type == TypePropriete.H_FREE:
        assert propriete.motif is not None
        graphe = _instance_sans_h(propriete.motif, n, rng)
    else:
        assert propriete.arbre is not None
        graphe = _instance_sans_arbre(propriete.arbre, n, rng)

    if not satisfait(graphe, propriete):
        raise RuntimeError(f"Instance générée invalide pour {propriete.nom} (graine {seed}).")
    return graphe


# --- graphes usuels ----------------------------------------------------------

def graphe_gnm(n: int, m: int, seed: int) -> Graphe:
    """Graphe aléatoire G(n, m) uniforme."""
    reseau = nx.gnm_random_graph(n, m, seed=seed)
    return Graphe(n, reseau.edges())


def graphe_gnp(n: int, p: float, seed: int) -> Graphe:
    """Graphe aléatoire G(n, p)."""
    reseau = nx.fast_gnp_random_graph(n, p, seed=seed)
    return Graphe(n, reseau.edges())


def graphe_chemin(n: int) -> Graphe:
    return Graphe(n, [(i, i + 1) for i in range(n - 1)])


def graphe_cycle(n: int) -> Graphe:
    return Graphe(n, [(i, (i + 1) % n) for i in range(n)])


def graphe_etoile(feuilles: int) -> Graphe:
    return Graphe(feuilles + 1, [(0, i) for i in range(1, feuilles + 1)])


def graphe_complet(n: int) -> Graphe:
    return Graphe(n, [(u, v) for u in range(n) for v in range(u + 1, n)])
