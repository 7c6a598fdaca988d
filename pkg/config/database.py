"""
Connexion à la base de résultats (SQLAlchemy).

La base archive les expériences du banc d'essai. L'URL est chargée
depuis le fichier .env (DATABASE_URL) ; par défaut un fichier SQLite local.
"""

from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import sessionmaker, declarative_base

from config.parametres import DATABASE_URL


def creer_moteur(url: Optional[str] = None) -> Engine:
    """
    Crée un moteur SQLAlchemy pour l'URL donnée (DATABASE_URL par défaut).

    Les tests utilisent "sqlite://" (base en mémoire).
    """
    url = url or DATABASE_URL
    options = {}
    if not url.startswith("sqlite"):
        options = {
            'pool_pre_ping': True,  # Vérifie la connexion avant utilisation
            'pool_recycle': 3600,  # Recycle les connexions après 1 heure
        }
    return create_engine(url, echo=False, **options)


engine = creer_moteur()

# Créer la classe de session
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

# Base pour les modèles déclaratifs SQLAlchemy
Base = declarative_base()


def init_db(moteur: Optional[Engine] = None):
    """
    Crée les tables des résultats si elles n'existent pas.

    Args:
        moteur: Moteur cible (le moteur global par défaut)
    """
    # Importer les modèles pour qu'ils soient enregistrés
    from dal.models import Experience, Essai  # noqa: F401

    Base.metadata.create_all(bind=moteur or engine)
