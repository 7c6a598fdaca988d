"""
Configuration de la journalisation.

Les couches BLL et DAL écrivent via logging.getLogger(__name__) ;
l'interface console garde ses préfixes [OK] / [ERREUR].
"""

import logging
from typing import Optional

from config.parametres import LOG_LEVEL

FORMAT_JOURNAL = "%(asctime)s %(levelname)-7s %(name)s : %(message)s"


def configurer_journalisation(niveau: Optional[str] = None) -> None:
    """
    Configure le journal racine.

    Args:
        niveau: Nom du niveau (DEBUG, INFO, ...). Par défaut LOG_LEVEL du .env.
    """
    nom_niveau = (niveau or LOG_LEVEL).upper()
    niveau_num = logging.getLevelName(nom_niveau)
    if not isinstance(niveau_num, int):
        raise ValueError(f"Niveau de journalisation inconnu : '{nom_niveau}'.")
    logging.basicConfig(level=niveau_num, format=FORMAT_JOURNAL, force=True)
    # SQLAlchemy reste discret sauf en DEBUG
    logging.getLogger('sqlalchemy.engine').setLevel(
        logging.INFO if niveau_num <= logging.DEBUG else logging.WARNING
    )
