"""
Interface utilisateur - Tableau de bord des expériences archivées.

Indicateurs affichés :
- Dernières expériences avec leur taux de rejet et leur porte
- Détail des essais d'une expérience
"""

from sqlalchemy.orm import Session

from dal.repositories import EssaiRepository, ExperienceRepository


def _porte(experience) -> str:
    if experience.porte is None:
        return "-"
    return f"{experience.type_porte}:{'OK' if experience.porte else 'ECHEC'}"


class TableauBord:
    """
    Affichage des résultats archivés.

    Toutes les requêtes passent par les repositories, pas par la couche UI.
    """

    @staticmethod
    def afficher_historique(db: Session, limite: int = 10):
        """
        Affiche les dernières expériences.

        Args:
            db: Session de base de données
            limite: Nombre d'expériences affichées
        """
        print("\n" + "=" * 80)
        print("HISTORIQUE DES EXPERIENCES")
        print("=" * 80)

        experiences = ExperienceRepository.get_recentes(db, limite)
        if not experiences:
            print("Aucune experience archivee.")
            return

        print(f"{'ID':>4}  {'MODE':<10}{'PROPRIETE':<16}{'EPS':<8}{'n':>6}{'m':>8}"
              f"{'ESSAIS':>8}{'REJET':>8}  PORTE")
        print("-" * 80)
        for experience in experiences:
            taux = EssaiRepository.taux_rejet(db, experience.id)
            taux_texte = "-" if taux is None else f"{taux:.3f}"
            print(
                f"{experience.id:>4}  {experience.mode.value:<10}{experience.propriete:<16}"
                f"{experience.epsilon:<8}{experience.n:>6}{experience.m:>8}"
                f"{experience.essais:>8}{taux_texte:>8}  {_porte(experience)}"
            )
        print("=" * 80)

    @staticmethod
    def afficher_experience(db: Session, experience_id: int) -> bool:
        """Affiche une expérience et ses essais ; False si elle n'existe pas."""
        experience = ExperienceRepository.get_by_id(db, experience_id)
        if not experience:
            print(f"[ERREUR] Experience {experience_id} introuvable.")
            return False

        print("\n" + "=" * 80)
        print(f"EXPERIENCE {experience.id} - {experience.mode.value} {experience.propriete} "
              f"eps={experience.epsilon}")
        print("=" * 80)
        print(f"Instance : {experience.instance} (n={experience.n}, m={experience.m})")
        print(f"Graine : {experience.graine}   Date : {experience.date_creation:%Y-%m-%d %H:%M}")
        print(f"Rejets : {experience.rejets}/{experience.essais}   "
              f"Tours moyens : {experience.tours_moyens:.1f}   Tours max : {experience.tours_max}   "
              f"Bits max : {experience.bits_max}")
        print(f"Porte : {_porte(experience)}")
        print("-" * 80)
        for essai in EssaiRepository.get_par_experience(db, experience.id):
            extra = ""
            if essai.acyclique is not None:
                extra = (f"  supprimees={essai.aretes_supprimees} acyclique={essai.acyclique} "
                         f"budget={essai.budget_respecte} borne={essai.borne_respectee}")
            print(f"#{essai.indice:<4} graine={essai.graine:<22} {essai.verdict:<7} "
                  f"tours={essai.tours:<6} bits={essai.bits_max}{extra}")
        return True
