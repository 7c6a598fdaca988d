"""
Couche d'accès aux données (DAL) - Repositories.

Ce module contient les opérations CRUD de base sur les résultats.
Toutes les requêtes SQL sont centralisées ici, aucune requête ne doit
apparaître dans la couche UI ou BLL.

Principe : Cette couche ne contient QUE des opérations de base de données,
pas de logique de test.
"""

from typing import Iterable, List, Optional, Tuple

from sqlalchemy import case, desc, func
from sqlalchemy.orm import Session

from dal.models import Essai, Experience


class ExperienceRepository:
    """
    Repository pour la gestion des expériences.

    Contient toutes les opérations CRUD sur la table experiences.
    """

    @staticmethod
    def create(db: Session, experience: Experience) -> Experience:
        """
        Enregistre une expérience (et ses essais rattachés).

        Args:
            db: Session de base de données
            experience: Objet Experience à créer

        Returns:
            Experience créée avec son ID généré
        """
        db.add(experience)
        db.commit()
        db.refresh(experience)
        return experience

    @staticmethod
    def get_by_id(db: Session, experience_id: int) -> Optional[Experience]:
        """Récupère une expérience par son ID."""
        return db.query(Experience).filter(Experience.id == experience_id).first()

    @staticmethod
    def get_all(db: Session) -> List[Experience]:
        """Récupère toutes les expériences."""
        return db.query(Experience).order_by(Experience.id).all()

    @staticmethod
    def get_recentes(db: Session, limite: int = 10) -> List[Experience]:
        """Récupère les dernières expériences, la plus récente d'abord."""
        return db.query(Experience).order_by(desc(Experience.date_creation), desc(Experience.id)).limit(limite).all()

    @staticmethod
    def get_par_propriete(db: Session, propriete: str) -> List[Experience]:
        return db.query(Experience).filter(Experience.propriete == propriete).order_by(Experience.id).all()

    @staticmethod
    def delete(db: Session, experience_id: int) -> Tuple[bool, str]:
        """
        Supprime une expérience et ses essais (cascade).

        Returns:
            Tuple (succes, message)
        """
        experience = ExperienceRepository.get_by_id(db, experience_id)
        if not experience:
            return False, f"Expérience avec l'ID {experience_id} introuvable."
        try:
            db.delete(experience)
            db.commit()
            return True, f"Expérience {experience_id} supprimée avec succès."
        except Exception as e:
            db.rollback()
            return False, f"Erreur lors de la suppression de l'expérience {experience_id} : {e}"


class EssaiRepository:
    """Repository pour les essais (lignes de rapport)."""

    @staticmethod
    def ajouter_lignes(db: Session, experience: Experience, essais: Iterable[Essai]) -> int:
        """
        Rattache des essais à une expérience existante.

        Returns:
            Nombre d'essais ajoutés
        """
        nombre = 0
        for essai in essais:
            essai.experience_id = experience.id
            db.add(essai)
            nombre += 1
        db.commit()
        return nombre

    @staticmethod
    def get_par_experience(db: Session, experience_id: int) -> List[Essai]:
        return db.query(Essai).filter(Essai.experience_id == experience_id).order_by(Essai.indice).all()

    @staticmethod
    def taux_rejet(db: Session, experience_id: int) -> Optional[float]:
        """
        Fraction d'essais REJECT d'une expérience, calculée par agrégation SQL.

        Returns:
            Taux dans [0, 1], None si l'expérience n'a aucun essai
        """
        total, rejets = db.query(
            func.count(Essai.id),
            func.sum(case((Essai.verdict == 'REJECT', 1), else_=0)),
        ).filter(Essai.experience_id == experience_id).one()
        if not total:
            return None
        return float(rejets or 0) / total
