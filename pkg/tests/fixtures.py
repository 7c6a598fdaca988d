"""
Script de données de test (fixtures) pour le banc d'essai CONGEST.

Ce script écrit un jeu d'instances réalistes dans instances/ :
- copies disjointes de motifs (instances certifiées ε-éloignées)
- instances qui satisfont chaque propriété (côté complétude)
- graphes usuels (chemin, étoile, G(n, m))

puis archive une petite expérience de démonstration dans la base de
résultats, pour tester :
- la commande history et le tableau de bord
- les portes de correction et de complétude
"""

import sys
import os
# Ajouter le répertoire parent au chemin Python
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pathlib import Path

from bll.experiences import ConfigurationExperience, ServiceExperience
from bll.generateurs import gen_disjoint_copies, gen_property_instance, graphe_chemin, graphe_etoile, graphe_gnm
from bll.proprietes import Propriete, motif_nomme
from config.database import SessionLocal, init_db
from dal.graphe import ecrire_fichier_graphe

REPERTOIRE = Path(__file__).resolve().parent.parent / "instances"

COPIES = [('triangle', 20), ('c4', 20), ('k4', 10), ('diamond', 10), ('paw', 10)]


def creer_instances(repertoire: Path = REPERTOIRE) -> int:
    """
    Écrit les instances et leurs certificats.

    Returns:
        Nombre de fichiers de graphe écrits
    """
    repertoire.mkdir(parents=True, exist_ok=True)
    ecrits = 0

    print("\n1. Copies disjointes de motifs...")
    for alias, copies in COPIES:
        graphe, certificats = gen_disjoint_copies(motif_nomme(alias), copies)
        ecrire_fichier_graphe(graphe, repertoire / f"copies_{alias}_{copies}.txt")
        (repertoire / f"copies_{alias}_{copies}.cert").write_text(
            "".join(c.vers_texte() + "\n" for c in certificats), encoding='utf-8'
        )
        ecrits += 1
        print(f"   [OK] {alias} x{copies} : n={graphe.n}, m={graphe.m}, {len(certificats)} certificats")

    print("\n2. Instances qui satisfont la propriété...")
    for nom in ('triangle', 'c4', 'bipartite', 'cyclefree', 'h4:k4', 'tree:path:4'):
        propriete = Propriete.depuis_nom(nom)
        graphe = gen_property_instance(propriete, 60, seed=7)
        fichier = nom.replace(':', '_')
        ecrire_fichier_graphe(graphe, repertoire / f"satisfait_{fichier}.txt")
        ecrits += 1
        print(f"   [OK] {nom} : n={graphe.n}, m={graphe.m}")

    print("\n3. Graphes usuels...")
    for nom, graphe in (
        ('chemin_50', graphe_chemin(50)),
        ('etoile_20', graphe_etoile(20)),
        ('gnm_100_300', graphe_gnm(100, 300, seed=1)),
    ):
        ecrire_fichier_graphe(graphe, repertoire / f"{nom}.txt")
        ecrits += 1
        print(f"   [OK] {nom} : n={graphe.n}, m={graphe.m}")
    return ecrits


def archiver_demonstration():
    """Archive une expérience triangle sur 20 triangles disjoints."""
    init_db()
    db = SessionLocal()
    try:
        config = ConfigurationExperience.depuis_valeurs({
            'mode': 'test',
            'property': 'triangle',
            'epsilon': '1/3',
            'trials': '20',
            'seed': '1',
            'instance': 'copies:triangle:20',
        })
        rapport, instance = ServiceExperience.executer(config)
        experience = ServiceExperience.enregistrer(db, config, instance, rapport)
        print(f"   [OK] Experience {experience.id} archivee ({rapport.rejets}/{rapport.essais} rejets)")
    finally:
        db.close()


if __name__ == "__main__":
    print("=" * 80)
    print("CREATION DES DONNEES DE TEST")
    print("=" * 80)
    try:
        nombre = creer_instances()
        print("\n4. Experience de demonstration...")
        archiver_demonstration()
        print("\n" + "=" * 80)
        print(f"[SUCCES] {nombre} instances ecrites dans {REPERTOIRE}")
        print("=" * 80)
    except Exception as e:
        print(f"\n[ERREUR] Erreur lors de la creation des donnees : {e}")
        import traceback
        traceback.print_exc()
