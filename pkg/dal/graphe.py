"""
Couche d'accès aux données (DAL) - Graphe et format liste d'arêtes.

Le graphe est à la fois le réseau simulé et l'objet testé. Il est
immuable : les vues dérivées (retrait d'arêtes) créent un nouveau Graphe.

Format texte (UTF-8) :
    n m
    u v
    ...
une ligne "u v" par arête, 0 <= u, v < n.
"""

from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Tuple, Union

import networkx as nx

from bll.erreurs import ErreurFormat, ErreurInvariant

Arete = Tuple[int, int]


def normaliser_arete(u: int, v: int) -> Arete:
    """Retourne l'arête non orientée sous la forme (min, max)."""
    return (u, v) if u < v else (v, u)


class Graphe:
    """
    Graphe simple non orienté G=(V,E) avec V = {0, ..., n-1}.

    Invariants :
    - pas de boucle, pas d'arête multiple
    - adjacence symétrique, voisins triés par identifiant croissant
    - m = |E| et d(v) = |N(v)|
    """

    __slots__ = ('n', 'aretes', 'adjacence')

    def __init__(self, n: int, aretes: Iterable[Arete] = ()):
        if n < 0:
            raise ErreurInvariant(f"Nombre de sommets négatif : {n}.")
        ensemble = set()
        for u, v in aretes:
            VerificationGraphe.verifier_arete(n, u, v)
            arete = normaliser_arete(u, v)
            if arete in ensemble:
                raise ErreurInvariant(f"Arête en double : {arete[0]} {arete[1]}.")
            ensemble.add(arete)

        voisins: List[List[int]] = [[] for _ in range(n)]
        for u, v in ensemble:
            voisins[u].append(v)
            voisins[v].append(u)

        self.n: int = n
        self.aretes: FrozenSet[Arete] = frozenset(ensemble)
        self.adjacence: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(l)) for l in voisins)

    @property
    def m(self) -> int:
        return len(self.aretes)

    def degre(self, v: int) -> int:
        return len(self.adjacence[v])

    def voisins(self, v: int) -> Tuple[int, ...]:
        return self.adjacence[v]

    def sommets(self) -> range:
        return range(self.n)

    def a_arete(self, u: int, v: int) -> bool:
        return normaliser_arete(u, v) in self.aretes

    def aretes_triees(self) -> List[Arete]:
        return sorted(self.aretes)

    def composantes(self) -> List[List[int]]:
        """Composantes connexes (listes triées, par plus petit sommet)."""
        return sorted(sorted(c) for c in nx.connected_components(self.vers_networkx()))

    def nombre_composantes(self) -> int:
        return len(self.composantes())

    def sans_aretes(self, retirees: Iterable[Arete]) -> "Graphe":
        """Vue dérivée (V, E \\ retirees) ; le graphe courant n'est pas modifié."""
        a_retirer = {normaliser_arete(u, v) for u, v in retirees}
        return Graphe(self.n, (e for e in self.aretes if e not in a_retirer))

    def sous_graphe_induit(self, sommets: Iterable[int]) -> Tuple["Graphe", List[int]]:
        """
        Sous-graphe induit renuméroté 0..k-1.

        Returns:
            Tuple (sous_graphe, correspondance) où correspondance[i] est
            l'identifiant d'origine du sommet i.
        """
        correspondance = sorted(set(sommets))
        index: Dict[int, int] = {v: i for i, v in enumerate(correspondance)}
        aretes = [
            (index[u], index[v]) for u, v in self.aretes
            if u in index and v in index
        ]
        return Graphe(len(correspondance), aretes), correspondance

    def vers_networkx(self) -> nx.Graph:
        graphe = nx.Graph()
        graphe.add_nodes_from(range(self.n))
        graphe.add_edges_from(self.aretes)
        return graphe

    def __eq__(self, autre: object) -> bool:
        return isinstance(autre, Graphe) and self.n == autre.n and self.aretes == autre.aretes

    def __hash__(self) -> int:
        return hash((self.n, self.aretes))

    def __repr__(self):
        return f"<Graphe(n={self.n}, m={self.m})>"


class VerificationGraphe:
    """Vérifications de structure partagées par le constructeur et le lecteur."""

    @staticmethod
    def verifier_arete(n: int, u: int, v: int) -> None:
        if not (0 <= u < n and 0 <= v < n):
            raise ErreurInvariant(f"Arête {u} {v} hors de [0, {n}).")
        if u == v:
            raise ErreurInvariant(f"Boucle sur le sommet {u}.")


def load_edge_list(texte: Union[bytes, str]) -> Graphe:
    """
    Lit un graphe au format liste d'arêtes.

    Args:
        texte: Contenu du fichier (octets UTF-8 ou chaîne)

    Returns:
        Graphe validé

    Raises:
        ErreurFormat: ligne illisible (numéro de ligne dans le message)
        ErreurInvariant: boucle ou arête en double
    """
    if isinstance(texte, bytes):
        try:
            texte = texte.decode('utf-8')
        except UnicodeDecodeError as e:
            raise ErreurFormat(f"encodage UTF-8 invalide ({e}).")

    entete = None
    aretes: List[Arete] = []
    deja_vues = set()
    for numero, brute in enumerate(texte.splitlines(), 1):
        ligne = brute.strip()
        if not ligne:
            continue
        champs = ligne.split()
        if len(champs) != 2:
            raise ErreurFormat(f"deux entiers attendus, lu '{ligne}'.", numero)
        try:
            a, b = int(champs[0]), int(champs[1])
        except ValueError:
            raise ErreurFormat(f"entiers attendus, lu '{ligne}'.", numero)

        if entete is None:
            if a < 0 or b < 0:
                raise ErreurFormat("l'en-tête 'n m' doit être positif.", numero)
            entete = (a, b)
            continue

        n = entete[0]
        try:
            VerificationGraphe.verifier_arete(n, a, b)
        except ErreurInvariant as e:
            raise ErreurInvariant(f"ligne {numero} : {e}")
        arete = normaliser_arete(a, b)
        if arete in deja_vues:
            raise ErreurInvariant(f"ligne {numero} : arête en double {a} {b}.")
        deja_vues.add(arete)
        aretes.append(arete)

    if entete is None:
        raise ErreurFormat("fichier vide, en-tête 'n m' manquant.", 1)
    n, m = entete
    if len(aretes) != m:
        raise ErreurFormat(f"l'en-tête annonce {m} arêtes, {len(aretes)} lues.")
    return Graphe(n, aretes)


def dump_edge_list(graphe: Graphe) -> str:
    """Écrit le graphe au format lu par load_edge_list (arêtes triées)."""
    lignes = [f"{graphe.n} {graphe.m}"]
    lignes.extend(f"{u} {v}" for u, v in graphe.aretes_triees())
    return "\n".join(lignes) + "\n"


def lire_fichier_graphe(chemin: Union[str, Path]) -> Graphe:
    return load_edge_list(Path(chemin).read_bytes())


def ecrire_fichier_graphe(graphe: Graphe, chemin: Union[str, Path]) -> None:
    Path(chemin).write_text(dump_edge_list(graphe), encoding='utf-8')
