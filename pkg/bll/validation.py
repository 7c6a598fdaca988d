"""
Couche métier (BLL) - Validations de configuration.

Ce module contient les validations qui précèdent une expérience :
ε, nombre d'essais, graine, limite de bande, motif, spécification
d'instance. Chaque règle retourne (est_valide, message) ; les services
lèvent ErreurConfiguration quand une règle échoue.
"""

import re
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple

from bll.congest import largeur_identifiant
from bll.proprietes import MOTIFS_NOMMES, est_connexe
from dal.graphe import Graphe

# copies:<alias>:<t>, satisfying:<n>, gnm:<n>:<m>, gnp:<n>:<p>, path:<n>, star:<feuilles>
_GENERATEURS = {
    'copies': re.compile(r'^copies:([a-z0-9]+):(\d+)$'),
    'satisfying': re.compile(r'^satisfying:(\d+)$'),
    'gnm': re.compile(r'^gnm:(\d+):(\d+)$'),
    'gnp': re.compile(r'^gnp:(\d+):(0(?:\.\d+)?|1(?:\.0+)?|\.\d+)$'),
    'path': re.compile(r'^path:(\d+)$'),
    'star': re.compile(r'^star:(\d+)$'),
}

GRAINE_MAX = 2 ** 63


class ServiceValidation:
    """
    Service de validation des configurations d'expérience.

    Contient toutes les règles qui ne relèvent pas du simple typage.
    """

    @staticmethod
    def valider_epsilon(epsilon: Fraction) -> Tuple[bool, str]:
        """
        Valide ε.

        Règle : ε est un rationnel de (0, 1].

        Returns:
            Tuple (est_valide, message_erreur)
        """
        if not 0 < epsilon <= 1:
            return False, f"ε doit être dans (0, 1], reçu {epsilon}."
        return True, ""

    @staticmethod
    def valider_essais(essais: int) -> Tuple[bool, str]:
        if essais < 1:
            return False, f"Le nombre d'essais doit être >= 1, reçu {essais}."
        return True, ""

    @staticmethod
    def valider_graine(graine: int) -> Tuple[bool, str]:
        if not 0 <= graine < GRAINE_MAX:
            return False, f"La graine doit être dans [0, 2^63), reçu {graine}."
        return True, ""

    @staticmethod
    def valider_travailleurs(travailleurs: int) -> Tuple[bool, str]:
        if travailleurs < 1:
            return False, f"Le nombre de travailleurs doit être >= 1, reçu {travailleurs}."
        return True, ""

    @staticmethod
    def valider_limite_bande(limite: Optional[int], n: int) -> Tuple[bool, str]:
        """
        Valide la limite de bande passante pour un réseau à n sommets.

        Règle : au moins un identifiant de sommet (⌈log2 n⌉ bits).
        """
        if limite is None:
            return True, ""
        minimum = largeur_identifiant(n)
        if limite < minimum:
            return False, (
                f"Limite de bande {limite} bits trop faible pour n={n} "
                f"(au moins {minimum} bits pour un identifiant)."
            )
        return True, ""

    @staticmethod
    def valider_motif_h(motif: Graphe) -> Tuple[bool, str]:
        """Règle : motif connexe à 2, 3 ou 4 sommets."""
        if not 2 <= motif.n <= 4:
            return False, f"Le motif doit avoir 2 à 4 sommets, reçu {motif.n}."
        if not est_connexe(motif):
            return False, "Le motif doit être connexe."
        return True, ""

    @staticmethod
    def valider_specification_instance(spec: str) -> Tuple[bool, str]:
        """
        Valide une instance : fichier existant ou spécification de générateur.

        Le motif d'une spécification copies:<alias>:<t> doit être un alias connu.
        """
        if not spec:
            return False, "Aucune instance : --graph FICHIER ou --gen SPEC."
        genre = spec.split(':', 1)[0]
        if genre in _GENERATEURS:
            correspondance = _GENERATEURS[genre].match(spec)
            if not correspondance:
                return False, f"Spécification de générateur invalide : '{spec}'."
            if genre == 'copies':
                alias, copies = correspondance.group(1), int(correspondance.group(2))
                if alias not in MOTIFS_NOMMES:
                    return False, f"Motif inconnu '{alias}' dans '{spec}'."
                if copies < 1:
                    return False, f"Nombre de copies invalide dans '{spec}'."
            return True, ""
        if not Path(spec).is_file():
            return False, f"Fichier d'instance introuvable : '{spec}'."
        return True, ""

    @staticmethod
    def decouper_specification(spec: str) -> Tuple[str, Tuple[str, ...]]:
        """('gnm', ('100', '400')) pour 'gnm:100:400' ; ('fichier', (spec,)) sinon."""
        genre = spec.split(':', 1)[0]
        if genre in _GENERATEURS and _GENERATEURS[genre].match(spec):
            return genre, tuple(spec.split(':')[1:])
        return 'fichier', (spec,)
