"""
Paramètres globaux du banc d'essai CONGEST.

Les valeurs sont chargées depuis le fichier .env (python-dotenv) pour
pouvoir changer la base de résultats ou les constantes des bornes sans
toucher au code source.
"""

import os

from dotenv import load_dotenv

# Charger les variables d'environnement depuis le fichier .env
load_dotenv()


def _lire_entier(nom: str, defaut: int) -> int:
    """Lit une variable d'environnement entière, avec message clair si invalide."""
    valeur = os.getenv(nom)
    if valeur is None or not valeur.strip():
        return defaut
    try:
        return int(valeur)
    except ValueError:
        raise ValueError(
            f"{nom} doit être un entier dans le fichier .env "
            f"(valeur lue : '{valeur}')."
        )


def _lire_reel(nom: str, defaut: float) -> float:
    valeur = os.getenv(nom)
    if valeur is None or not valeur.strip():
        return defaut
    try:
        return float(valeur)
    except ValueError:
        raise ValueError(
            f"{nom} doit être un nombre dans le fichier .env "
            f"(valeur lue : '{valeur}')."
        )


# URL de la base où sont archivées les expériences (SQLite local par défaut,
# une URL PostgreSQL fonctionne aussi via psycopg2)
DATABASE_URL = os.getenv('DATABASE_URL') or "sqlite:///resultats.db"

# Niveau de journalisation des couches BLL/DAL
LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING').upper()

# Constante C de la borne de tours de la décomposition : tours ≤ C·log2(n)/ε + 3
CONSTANTE_TOURS_DECOMPOSITION = _lire_reel('CONSTANTE_TOURS_DECOMPOSITION', 8.0)

# Constante c du nombre d'itérations du testeur d'arbres : ⌈c·k^(k²)/ε^k⌉
CONSTANTE_ITERATIONS_ARBRE = _lire_reel('CONSTANTE_ITERATIONS_ARBRE', 1.0)

# Plafond du nombre d'itérations / phases du testeur d'arbres
PLAFOND_PHASES_ARBRE = _lire_entier('PLAFOND_PHASES_ARBRE', 200_000)

# Nombre maximal de tours par défaut d'une exécution CONGEST
TOURS_MAX_DEFAUT = _lire_entier('TOURS_MAX_DEFAUT', 5_000_000)
