"""
Interface utilisateur - Ligne de commande du banc d'essai.

Commandes :
    test       tester une propriété sur une instance (CSV des essais)
    correct    corriger l'acyclicité (lignes "deleted u v")
    decompose  décomposer en grappes (lignes "v grappe parent" et "cut u v")
    history    afficher les expériences archivées

Codes de sortie : 0 porte franchie (ou aucune porte), 1 porte échouée,
2 erreur d'usage, de configuration ou de garde.

Aucune requête SQL n'apparaît ici : tout passe par la couche BLL ou par
le tableau de bord.
"""

import argparse
import sys
from typing import Dict, List, Optional

from bll.erreurs import ErreurBanc
from bll.experiences import (
    ConfigurationExperience, RapportAgrege, ServiceExperience, charger_fichier_configuration,
)
from config.database import SessionLocal, init_db
from config.journalisation import configurer_journalisation
from ui.tableau_bord import TableauBord

CODE_SUCCES = 0
CODE_ECHEC_PORTE = 1
CODE_ERREUR = 2


def _ajouter_options_communes(parser: argparse.ArgumentParser) -> None:
    instance = parser.add_mutually_exclusive_group()
    instance.add_argument('--graph', metavar='FICHIER', help="Graphe au format liste d'arêtes")
    instance.add_argument('--gen', metavar='SPEC',
                          help="Générateur : copies:<alias>:<t>, satisfying:<n>, gnm:<n>:<m>, gnp:<n>:<p>, path:<n>, star:<f>")
    parser.add_argument('--epsilon', help="ε exact, par exemple 1/3")
    parser.add_argument('--seed', type=int, help="Graine de l'expérience")
    parser.add_argument('--trials', type=int, help="Nombre d'essais")
    parser.add_argument('--bandwidth', type=int, help="Limite de bande en bits (défaut 4·⌈log2 n⌉ + 8)")
    parser.add_argument('--out', metavar='FICHIER', help="Fichier de sortie")
    parser.add_argument('--csv', metavar='FICHIER',
                        help="CSV des essais en modes correct et decompose (défaut : <out>_essais.csv)")
    parser.add_argument('--workers', type=int, help="Processus parallèles")
    parser.add_argument('--config', metavar='FICHIER', help="Fichier clé=valeur, surchargé par les options")
    parser.add_argument('--db', action='store_true', help="Archiver l'expérience dans la base de résultats")


def construire_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='banc-congest',
        description="Banc d'essai CONGEST : testeurs distribués, décomposition et correcteur.",
    )
    parser.add_argument('--log-level', help="DEBUG, INFO, WARNING (défaut : LOG_LEVEL du .env)")
    commandes = parser.add_subparsers(dest='commande', required=True)

    test = commandes.add_parser('test', help="Tester une propriété")
    test.add_argument('--property',
                      help="triangle, c4, h4:<alias>, bipartite, cyclefree, tree:<fichier|path:k|star:k>")
    test.add_argument('--pi-variant', choices=['moins-un', 'degre'], help="Poids du tirage du milieu des chemins")
    test.add_argument('--tree-phases', type=int, help="Phases (ou itérations) du testeur d'arbres")
    test.add_argument('--tree-global', action='store_true', help="Testeur d'arbres global (modèle à requêtes)")
    test.add_argument('--no-early-exit', action='store_true', help="Aller au bout même après un rejet")
    _ajouter_options_communes(test)

    for nom, aide in (('correct', "Corriger l'acyclicité"), ('decompose', "Décomposer en grappes")):
        _ajouter_options_communes(commandes.add_parser(nom, help=aide))

    history = commandes.add_parser('history', help="Afficher les expériences archivées")
    history.add_argument('--limit', type=int, default=10, help="Nombre d'expériences")
    history.add_argument('--experience', type=int, help="Détail d'une expérience")
    return parser


def valeurs_depuis_arguments(args: argparse.Namespace) -> Dict[str, Optional[str]]:
    """Fichier de configuration éventuel, puis surcharges de la ligne de commande."""
    valeurs: Dict[str, Optional[str]] = {}
    if args.config:
        valeurs.update(charger_fichier_configuration(args.config))
    surcharges = {
        'mode': args.commande,
        'property': getattr(args, 'property', None),
        'epsilon': args.epsilon,
        'seed': args.seed,
        'trials': args.trials,
        'instance': args.graph or args.gen,
        'bandwidth': args.bandwidth,
        'out': args.out,
        'csv': args.csv,
        'workers': args.workers,
        'pi_variant': getattr(args, 'pi_variant', None),
        'tree_phases': getattr(args, 'tree_phases', None),
    }
    if getattr(args, 'tree_global', False):
        surcharges['tree_global'] = 'true'
    if getattr(args, 'no_early_exit', False):
        surcharges['stop_on_reject'] = 'false'
    for cle, valeur in surcharges.items():
        if valeur is not None:
            valeurs[cle] = str(valeur)
    return valeurs


def afficher_bilan(rapport: RapportAgrege) -> None:
    print("\n" + "=" * 60)
    print(f"Essais : {rapport.essais}   Acceptations : {rapport.acceptations}   Rejets : {rapport.rejets}")
    print(f"Fraction de rejets : {rapport.fraction_rejet:.3f}")
    print(f"Tours moyens : {rapport.tours_moyens:.1f}   Tours max : {rapport.tours_max}   "
          f"Bits max : {rapport.bits_max}")
    if rapport.taux_hors_borne is not None:
        print(f"Taux hors borne |E'| <= (m - n + c) + eps.m : {rapport.taux_hors_borne:.3f}   "
              f"Taux hors budget : {rapport.taux_hors_budget:.3f}")
    if rapport.fraction_coupee_moyenne is not None:
        print(f"Fraction coupee moyenne : {rapport.fraction_coupee_moyenne:.4f}   "
              f"Taux hors borne de tours : {rapport.taux_hors_borne_tours:.3f}")
    if rapport.type_porte is None:
        print("Porte : aucune (instance sans certificat)")
    elif rapport.porte:
        print(f"[OK] Porte {rapport.type_porte} franchie")
    else:
        print(f"[ERREUR] Porte {rapport.type_porte} echouee")
    print("=" * 60)


def _historique(args: argparse.Namespace) -> int:
    init_db()
    db = SessionLocal()
    try:
        if args.experience is not None:
            return CODE_SUCCES if TableauBord.afficher_experience(db, args.experience) else CODE_ERREUR
        TableauBord.afficher_historique(db, args.limit)
        return CODE_SUCCES
    finally:
        db.close()


def main(argv: Optional[List[str]] = None) -> int:
    """Point d'entrée ; retourne le code de sortie."""
    parser = construire_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return CODE_ERREUR if e.code else CODE_SUCCES

    try:
        configurer_journalisation(args.log_level)
        if args.commande == 'history':
            return _historique(args)

        config = ConfigurationExperience.depuis_valeurs(valeurs_depuis_arguments(args))
        rapport, instance = ServiceExperience.executer(config)
        afficher_bilan(rapport)

        if args.db:
            init_db()
            db = SessionLocal()
            try:
                experience = ServiceExperience.enregistrer(db, config, instance, rapport)
                print(f"[OK] Experience archivee (ID {experience.id})")
            finally:
                db.close()
    except (ErreurBanc, ValueError, OSError) as e:
        print(f"[ERREUR] {e}", file=sys.stderr)
        return CODE_ERREUR

    return CODE_ECHEC_PORTE if rapport.porte is False else CODE_SUCCES
