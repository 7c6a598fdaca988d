"""
Couche métier (BLL) - Erreurs typées du banc d'essai.

Toutes les erreurs dérivent de ErreurBanc, ce qui permet à l'interface
de les traduire en code de sortie 2 sans masquer les vrais bugs Python.
"""

from typing import Optional


class ErreurBanc(Exception):
    """Erreur de base du banc d'essai."""


class ErreurFormat(ErreurBanc):
    """Erreur de lecture d'un fichier (liste d'arêtes, motif d'arbre)."""

    def __init__(self, message: str, ligne: Optional[int] = None):
        self.ligne = ligne
        if ligne is not None:
            message = f"ligne {ligne} : {message}"
        super().__init__(message)


class ErreurInvariant(ErreurBanc):
    """Violation d'un invariant de structure (boucle, arête en double, motif invalide)."""


class ErreurGarde(ErreurBanc):
    """Taille hors de portée d'un oracle exhaustif."""


class ErreurBandePassante(ErreurBanc):
    """Un message dépasse la limite de bande passante : bug du programme de sommet."""


class ErreurToursMax(ErreurBanc):
    """Le nombre maximal de tours est atteint sans que tous les sommets aient conclu."""


class ErreurConfiguration(ErreurBanc):
    """Configuration d'expérience invalide."""
