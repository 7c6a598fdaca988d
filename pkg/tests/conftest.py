"""
Fixtures pytest partagées : base de résultats en mémoire et petits graphes.
"""

import pytest
from sqlalchemy.orm import sessionmaker

from config.database import Base, creer_moteur, init_db
from bll.generateurs import graphe_chemin, graphe_complet, graphe_cycle, graphe_etoile
from dal.graphe import Graphe


@pytest.fixture
def db():
    """Session sur une base SQLite en mémoire, tables créées à neuf."""
    moteur = creer_moteur("sqlite://")
    init_db(moteur)
    session = sessionmaker(autocommit=False, autoflush=False, bind=moteur)()
    try:
        yield session
    finally:
        session.close()
        Base.metadata.drop_all(bind=moteur)
        moteur.dispose()


@pytest.fixture
def triangle() -> Graphe:
    return graphe_complet(3)


@pytest.fixture
def carre() -> Graphe:
    return graphe_cycle(4)


@pytest.fixture
def chemin_10() -> Graphe:
    return graphe_chemin(10)


@pytest.fixture
def etoile_5() -> Graphe:
    return graphe_etoile(5)


@pytest.fixture
def k4() -> Graphe:
    return graphe_complet(4)
