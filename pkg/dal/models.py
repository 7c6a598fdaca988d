"""
Modèles de données SQLAlchemy du banc d'essai.

Une Experience regroupe les essais d'une même configuration (mode,
propriété, ε, instance, graine) ; chaque Essai est une ligne du rapport
d'essai (graine, verdict, tours, bits max).

Les contraintes d'intégrité sont définies ici :
- Clés primaires (PK) et clé étrangère essai -> expérience
- Contraintes NOT NULL
- Contraintes CHECK pour les règles du banc (verdicts, comptes cohérents)
"""

import enum
from datetime import datetime

from sqlalchemy import (
    Boolean, CheckConstraint, Column, DateTime, Enum as SQLEnum, Float, ForeignKey, Integer, String,
)
from sqlalchemy.orm import relationship

from config.database import Base


class ModeExperience(enum.Enum):
    """Mode d'exécution : test de propriété, correction ou décomposition seule."""
    TEST = "test"
    CORRECTION = "correct"
    DECOMPOSITION = "decompose"


class Experience(Base):
    """
    Expérience : une configuration et le bilan de ses essais.

    Contraintes d'intégrité :
    - CHECK : acceptations + rejets = essais
    - CHECK : essais >= 1
    - porte : NULL quand aucune porte statistique ne s'applique
    """
    __tablename__ = 'experiences'

    id = Column(Integer, primary_key=True, autoincrement=True)

    mode = Column(SQLEnum(ModeExperience, native_enum=False, values_callable=lambda x: [e.value for e in x]),
                  nullable=False, default=ModeExperience.TEST,
                  comment="test, correct ou decompose")
    propriete = Column(String(100), nullable=False, comment="Nom de la propriété (triangle, c4, h4:k4, ...)")
    epsilon = Column(String(50), nullable=False, comment="ε sous forme de fraction exacte")
    instance = Column(String(255), nullable=False, comment="Fichier ou spécification de générateur")
    n = Column(Integer, nullable=False)
    m = Column(Integer, nullable=False)
    essais = Column(Integer, nullable=False)
    graine = Column(Integer, nullable=False)

    acceptations = Column(Integer, nullable=False, default=0)
    rejets = Column(Integer, nullable=False, default=0)
    tours_moyens = Column(Float, nullable=False, default=0.0)
    tours_max = Column(Integer, nullable=False, default=0)
    bits_max = Column(Integer, nullable=False, default=0)

    type_porte = Column(String(20), nullable=True, comment="soundness, completeness, decompose, correct")
    porte = Column(Boolean, nullable=True, comment="Résultat de la porte, NULL si aucune")
    date_creation = Column(DateTime, nullable=False, default=datetime.now)

    lignes = relationship("Essai", back_populates="experience", cascade="all, delete-orphan",
                          order_by="Essai.indice")

    __table_args__ = (
        CheckConstraint("essais >= 1", name='check_essais_positif'),
        CheckConstraint("acceptations + rejets = essais", name='check_comptes_essais'),
        CheckConstraint("n >= 0 AND m >= 0", name='check_taille_graphe'),
    )

    def __repr__(self):
        return (
            f"<Experience(id={self.id}, {self.mode.value} {self.propriete} ε={self.epsilon}, "
            f"{self.rejets}/{self.essais} rejets)>"
        )


class Essai(Base):
    """
    Un essai (ligne du CSV) rattaché à son expérience.

    Les colonnes de correction ne sont remplies qu'en mode correction.
    """
    __tablename__ = 'essais'

    id = Column(Integer, primary_key=True, autoincrement=True)
    experience_id = Column(Integer, ForeignKey('experiences.id', ondelete='CASCADE'), nullable=False)
    indice = Column(Integer, nullable=False, comment="Rang de l'essai dans l'expérience")
    graine = Column(String(32), nullable=False, comment="Graine de l'essai (64 bits, stockée en texte)")
    verdict = Column(String(10), nullable=False)
    tours = Column(Integer, nullable=False)
    bits_max = Column(Integer, nullable=False)

    aretes_supprimees = Column(Integer, nullable=True)
    acyclique = Column(Boolean, nullable=True)
    budget_respecte = Column(Boolean, nullable=True)
    borne_respectee = Column(Boolean, nullable=True, comment="|E'| <= (m - n + c) + ε·m")

    experience = relationship("Experience", back_populates="lignes")

    __table_args__ = (
        CheckConstraint("verdict IN ('ACCEPT', 'REJECT')", name='check_verdict_essai'),
        CheckConstraint("tours >= 0", name='check_tours_positif'),
        CheckConstraint("bits_max >= 0", name='check_bits_positif'),
    )

    def __repr__(self):
        return f"<Essai(experience={self.experience_id}, #{self.indice}, {self.verdict}, tours={self.tours})>"
