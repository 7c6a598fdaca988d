"""
Script d'initialisation de la base de résultats.

Ce script crée les tables des expériences dans la base DATABASE_URL
(SQLite local par défaut) et affiche leur structure.
"""

import sys

from sqlalchemy import inspect

from config.database import engine, init_db


def main():
    """
    Initialise la base de résultats en créant les tables manquantes.
    """
    print("=" * 80)
    print("INITIALISATION DE LA BASE DE RESULTATS")
    print("=" * 80)

    try:
        print("\n1. Verification de la connexion...")
        with engine.connect():
            print(f"   [OK] Connexion reussie ({engine.url.render_as_string(hide_password=True)})")

        inspector = inspect(engine)
        tables_avant = inspector.get_table_names()
        if tables_avant:
            print(f"\n   Tables existantes : {', '.join(tables_avant)}")
            print("   Les tables existantes seront conservees.")

        print("\n2. Creation des tables...")
        init_db()

        inspector = inspect(engine)
        tables_apres = inspector.get_table_names()
        print(f"\n   [OK] {len(tables_apres)} table(s) :")
        for table_name in tables_apres:
            print(f"\n   Table: {table_name}")
            for col in inspector.get_columns(table_name):
                nullable = "NULL" if col['nullable'] else "NOT NULL"
                print(f"      - {col['name']}: {col['type']} {nullable}")

        print("\n" + "=" * 80)
        print("[OK] INITIALISATION TERMINEE AVEC SUCCES")
        print("=" * 80)
        return 0

    except Exception as e:
        print(f"\n[ERREUR] ERREUR lors de l'initialisation : {e}")
        print("\nVérifiez que :")
        print("  1. DATABASE_URL du fichier .env est correcte (ou absente pour SQLite)")
        print("  2. Les dépendances sont installées (pip install -r requirements.txt)")
        return 1


if __name__ == "__main__":
    sys.exit(main())
