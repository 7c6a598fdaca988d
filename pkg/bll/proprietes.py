"""
Couche métier (BLL) - Propriétés testées, motifs et certificats d'éloignement.

Ce module décrit QUOI est testé : l'identifiant de propriété (sans triangle,
sans C4, sans H, biparti, sans cycle, sans arbre T), les motifs nommés,
le motif d'arbre étiqueté 0..k-1 et le certificat ε-éloigné.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from bll.erreurs import ErreurFormat, ErreurInvariant
from dal.graphe import Graphe


# Motifs nommés (alias de la ligne de commande)
MOTIFS_NOMMES: Dict[str, List[Tuple[int, int]]] = {
    'k2': [(0, 1)],
    'p3': [(0, 1), (1, 2)],
    'triangle': [(0, 1), (1, 2), (0, 2)],
    'c4': [(0, 1), (1, 2), (2, 3), (0, 3)],
    'k4': [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    'p4': [(0, 1), (1, 2), (2, 3)],
    'paw': [(0, 1), (1, 2), (0, 2), (2, 3)],
    'diamond': [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
    'k13': [(0, 1), (0, 2), (0, 3)],
}


def motif_nomme(alias: str) -> Graphe:
    """Retourne le motif associé à un alias (triangle, c4, k4, p4, paw, diamond, k13, ...)."""
    cle = alias.strip().lower()
    if cle not in MOTIFS_NOMMES:
        raise ErreurInvariant(
            f"Motif inconnu '{alias}'. Alias disponibles : {', '.join(sorted(MOTIFS_NOMMES))}."
        )
    aretes = MOTIFS_NOMMES[cle]
    return Graphe(1 + max(max(e) for e in aretes), aretes)


def nom_du_motif(motif: Graphe) -> str:
    """Alias d'un motif s'il est exactement un motif nommé, sinon sa liste d'arêtes."""
    for alias in MOTIFS_NOMMES:
        if motif == motif_nomme(alias):
            return alias
    return ";".join(f"{u}-{v}" for u, v in motif.aretes_triees())


def est_connexe(graphe: Graphe) -> bool:
    return graphe.n > 0 and graphe.nombre_composantes() == 1


class MotifArbre:
    """
    Arbre étiqueté 0, ..., k-1, enraciné en 0.

    parent[i] est l'étiquette du parent de i (i >= 1). Le nombre de voisins
    à tirer depuis l'étiquette i est son nombre d'enfants : son degré dans
    l'arbre, moins un hors de la racine.
    """

    def __init__(self, k: int, parent: Dict[int, int]):
        if k < 1:
            raise ErreurInvariant("Un motif d'arbre a au moins un sommet.")
        if set(parent) != set(range(1, k)):
            raise ErreurInvariant(
                f"Chaque étiquette 1..{k - 1} doit avoir exactement un parent."
            )
        for i, p in parent.items():
            if not 0 <= p < k or p == i:
                raise ErreurInvariant(f"Parent invalide {p} pour l'étiquette {i}.")

        # Chaque étiquette doit remonter jusqu'à la racine sans cycle
        profondeur: Dict[int, int] = {0: 0}
        for i in range(1, k):
            chemin = []
            x = i
            while x not in profondeur:
                if x in chemin:
                    raise ErreurInvariant("Les parents du motif forment un cycle.")
                chemin.append(x)
                x = parent[x]
            base = profondeur[x]
            for pas, y in enumerate(reversed(chemin), 1):
                profondeur[y] = base + pas

        self.k = k
        self.parent: Dict[int, int] = dict(parent)
        self.profondeur: Dict[int, int] = profondeur
        self.enfants: Dict[int, List[int]] = {i: [] for i in range(k)}
        for i in sorted(parent):
            self.enfants[parent[i]].append(i)

    @staticmethod
    def chemin(k: int) -> "MotifArbre":
        """Chemin à k sommets enraciné à une extrémité (alias path:k)."""
        return MotifArbre(k, {i: i - 1 for i in range(1, k)})

    @staticmethod
    def etoile(k: int) -> "MotifArbre":
        """Étoile à k sommets enracinée au centre (alias star:k)."""
        return MotifArbre(k, {i: 0 for i in range(1, k)})

    @staticmethod
    def depuis_texte(texte: str) -> "MotifArbre":
        """
        Lit un motif : première ligne "k", puis k-1 lignes "i parent(i)".
        """
        lignes = [(num, l.strip()) for num, l in enumerate(texte.splitlines(), 1) if l.strip()]
        if not lignes:
            raise ErreurFormat("fichier de motif vide.", 1)
        num, premiere = lignes[0]
        try:
            k = int(premiere)
        except ValueError:
            raise ErreurFormat(f"entier k attendu, lu '{premiere}'.", num)
        parent: Dict[int, int] = {}
        for num, ligne in lignes[1:]:
            champs = ligne.split()
            try:
                i, p = int(champs[0]), int(champs[1])
            except (ValueError, IndexError):
                raise ErreurFormat(f"'i parent' attendu, lu '{ligne}'.", num)
            if len(champs) != 2 or i in parent:
                raise ErreurFormat(f"ligne de parent invalide '{ligne}'.", num)
            parent[i] = p
        return MotifArbre(k, parent)

    @staticmethod
    def depuis_specification(spec: str) -> "MotifArbre":
        """'path:k', 'star:k' ou chemin d'un fichier de motif."""
        if ':' in spec:
            genre, _, taille = spec.partition(':')
            try:
                k = int(taille)
            except ValueError:
                raise ErreurFormat(f"taille de motif invalide dans '{spec}'.")
            if genre == 'path':
                return MotifArbre.chemin(k)
            if genre == 'star':
                return MotifArbre.etoile(k)
            raise ErreurFormat(f"motif d'arbre inconnu '{spec}' (path:k ou star:k).")
        return MotifArbre.depuis_texte(Path(spec).read_text(encoding='utf-8'))

    def nombre_enfants(self, i: int) -> int:
        return len(self.enfants[i])

    def degre(self, i: int) -> int:
        """Degré de l'étiquette dans l'arbre."""
        return len(self.enfants[i]) + (1 if i > 0 else 0)

    def hauteur(self) -> int:
        return max(self.profondeur.values())

    def vers_graphe(self) -> Graphe:
        return Graphe(self.k, self.parent.items())

    def reenraciner(self, racine: int) -> "MotifArbre":
        """Le même arbre enraciné en v_racine, étiquettes échangées 0 <-> racine."""
        echange = {i: i for i in range(self.k)}
        echange[0], echange[racine] = racine, 0
        voisins: Dict[int, List[int]] = {i: [] for i in range(self.k)}
        for i, p in self.parent.items():
            voisins[echange[i]].append(echange[p])
            voisins[echange[p]].append(echange[i])
        parent: Dict[int, int] = {}
        file = [0]
        vus = {0}
        for x in file:
            for y in voisins[x]:
                if y not in vus:
                    vus.add(y)
                    parent[y] = x
                    file.append(y)
        return MotifArbre(self.k, parent)

    def enracinements(self) -> List["MotifArbre"]:
        return [self.reenraciner(r) for r in range(self.k)]

    def vers_texte(self) -> str:
        lignes = [str(self.k)]
        lignes.extend(f"{i} {self.parent[i]}" for i in range(1, self.k))
        return "\n".join(lignes) + "\n"

    def __eq__(self, autre: object) -> bool:
        return isinstance(autre, MotifArbre) and self.k == autre.k and self.parent == autre.parent

    def __hash__(self) -> int:
        return hash((self.k, tuple(sorted(self.parent.items()))))

    def __repr__(self):
        return f"<MotifArbre(k={self.k}, parent={self.parent})>"


class TypePropriete(enum.Enum):
    """Propriétés testées (toutes monotones par retrait d'arêtes)."""
    TRIANGLE_FREE = "triangle"
    C4_FREE = "c4"
    H_FREE = "h4"
    BIPARTITE = "bipartite"
    CYCLE_FREE = "cyclefree"
    TREE_FREE = "tree"


@dataclass(frozen=True)
class Propriete:
    """
    Identifiant de propriété (PropertyId).

    Invariants : le motif de H_FREE est connexe avec 2 à 4 sommets ;
    TREE_FREE porte un MotifArbre.
    """
    type: TypePropriete
    motif: Optional[Graphe] = None
    arbre: Optional[MotifArbre] = None

    def __post_init__(self):
        if self.type == TypePropriete.H_FREE:
            if self.motif is None or not 2 <= self.motif.n <= 4 or not est_connexe(self.motif):
                raise ErreurInvariant("Le motif H doit être connexe avec 2 à 4 sommets.")
        if self.type == TypePropriete.TREE_FREE:
            if self.arbre is None or self.arbre.k < 2:
                raise ErreurInvariant("Le motif d'arbre doit avoir au moins 2 sommets.")

    @staticmethod
    def triangle_free() -> "Propriete":
        return Propriete(TypePropriete.TRIANGLE_FREE)

    @staticmethod
    def c4_free() -> "Propriete":
        return Propriete(TypePropriete.C4_FREE)

    @staticmethod
    def h_free(motif: Union[Graphe, str]) -> "Propriete":
        if isinstance(motif, str):
            motif = motif_nomme(motif)
        return Propriete(TypePropriete.H_FREE, motif=motif)

    @staticmethod
    def bipartite() -> "Propriete":
        return Propriete(TypePropriete.BIPARTITE)

    @staticmethod
    def cycle_free() -> "Propriete":
        return Propriete(TypePropriete.CYCLE_FREE)

    @staticmethod
    def tree_free(arbre: MotifArbre) -> "Propriete":
        return Propriete(TypePropriete.TREE_FREE, arbre=arbre)

    @staticmethod
    def depuis_nom(texte: str) -> "Propriete":
        """
        Propriété de la ligne de commande : triangle, c4, h4:<alias>,
        bipartite, cyclefree ou tree:<fichier|path:k|star:k>.
        """
        genre, _, reste = texte.strip().partition(':')
        genre = genre.lower()
        if genre == 'h4' and reste:
            return Propriete.h_free(reste)
        if genre == 'tree' and reste:
            return Propriete.tree_free(MotifArbre.depuis_specification(reste))
        simples = {
            'triangle': Propriete.triangle_free,
            'c4': Propriete.c4_free,
            'bipartite': Propriete.bipartite,
            'cyclefree': Propriete.cycle_free,
        }
        if genre in simples and not reste:
            return simples[genre]()
        raise ErreurInvariant(
            f"Propriété inconnue '{texte}' (triangle, c4, h4:<alias>, bipartite, cyclefree, tree:<motif>)."
        )

    def motif_interdit(self) -> Optional[Graphe]:
        """Le motif dont l'absence définit la propriété (None pour biparti / sans cycle)."""
        if self.type == TypePropriete.TRIANGLE_FREE:
            return motif_nomme('triangle')
        if self.type == TypePropriete.C4_FREE:
            return motif_nomme('c4')
        if self.type == TypePropriete.H_FREE:
            return self.motif
        if self.type == TypePropriete.TREE_FREE:
            assert self.arbre is not None
            return self.arbre.vers_graphe()
        return None

    @property
    def nom(self) -> str:
        if self.type == TypePropriete.H_FREE:
            assert self.motif is not None
            return f"h4:{nom_du_motif(self.motif)}"
        if self.type == TypePropriete.TREE_FREE:
            assert self.arbre is not None
            parents = ",".join(str(self.arbre.parent[i]) for i in range(1, self.arbre.k))
            return f"tree:{self.arbre.k}[{parents}]"
        return self.type.value

    def __repr__(self):
        return f"<Propriete({self.nom})>"


def parser_epsilon(texte: Union[str, Fraction, float]) -> Fraction:
    """ε exact : '1/3', '0.2' ou Fraction ; doit être dans (0, 1]."""
    try:
        epsilon = Fraction(str(texte).strip()) if not isinstance(texte, Fraction) else texte
    except (ValueError, ZeroDivisionError):
        raise ErreurInvariant(f"ε invalide : '{texte}'.")
    if not 0 < epsilon <= 1:
        raise ErreurInvariant(f"ε doit être dans (0, 1], reçu {epsilon}.")
    return epsilon


@dataclass(frozen=True)
class CertificatEloignement:
    """
    Certificat d'éloignement (FarnessCertificate).

    distance est le nombre exact minimal de retraits d'arêtes (None si non
    calculable) ; epsilon est l'éloignement certifié distance / m.
    """
    propriete: Propriete
    epsilon: Fraction
    distance: Optional[int]
    m: int

    def est_eloigne(self, epsilon: Optional[Fraction] = None) -> bool:
        """Vrai si distance >= ceil(ε·m) (ε du certificat par défaut)."""
        if self.distance is None:
            return False
        eps = self.epsilon if epsilon is None else epsilon
        return self.distance >= math.ceil(eps * self.m)

    def vers_texte(self) -> str:
        distance = "?" if self.distance is None else str(self.distance)
        return (
            f"property={self.propriete.nom}\n"
            f"epsilon={self.epsilon}\n"
            f"distance={distance}\n"
            f"m={self.m}\n"
        )
