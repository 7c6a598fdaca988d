"""
Couche métier (BLL) - Service d'expérience.

Ce module orchestre une expérience complète :
1. Validation de la configuration (ServiceValidation)
2. Résolution de l'instance (fichier ou générateur) et de son certificat
3. Essais indépendants, graines dérivées de (graine, indice)
4. Agrégation, porte statistique et écriture du CSV

Portes :
- instance certifiée ε-éloignée : porte de correction statistique
  (fraction de rejets >= 2/3 - 3·sqrt(2/9 / essais)) ;
- instance qui satisfait la propriété : aucun rejet toléré ;
- décomposition : aucune violation et tours dans la borne ;
- correction : toujours acyclique, accord des extrémités et budget respecté
  (le taux de dépassement de |E'| <= (m - n + c) + ε·m est rapporté).
"""

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import repeat
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from dotenv import dotenv_values
from sqlalchemy.orm import Session

from bll.congest import ENTETE_CSV, ConfigurationExecution, RapportEssai, Verdict, deriver_graine, run
from bll.decomposition import borne_tours_decomposition, decompose, verify_decomposition
from bll.erreurs import ErreurConfiguration, ErreurGarde
from bll.generateurs import (
    certificat_pour, gen_disjoint_copies, gen_property_instance, graphe_chemin, graphe_etoile, graphe_gnm, graphe_gnp,
)
from bll.oracles import dist_to_property, satisfait
from bll.proprietes import (
    CertificatEloignement, Propriete, TypePropriete, motif_nomme, parser_epsilon,
)
from bll.testeur_arbres import OracleRequetes, distributed_tree_tester, global_tree_tester
from bll.testeurs_locaux import VARIANTE_MOINS_UN, c4_tester, h4_tester, triangle_tester
from bll.validation import ServiceValidation
from bll.verificateurs import (
    BilanCorrection, bipartite_verifier, compiled_tester, cyclefree_corrector, cyclefree_verifier,
    verifier_correction,
)
from dal.graphe import Graphe, lire_fichier_graphe
from dal.models import Essai, Experience, ModeExperience
from dal.repositories import ExperienceRepository

logger = logging.getLogger(__name__)

MODES = ('test', 'correct', 'decompose')
SEUIL_CORRECTION = Fraction(2, 3)


def _booleen(valeur: str) -> bool:
    return valeur.strip().lower() in ('1', 'true', 'yes', 'oui', 'vrai')


@dataclass
class ConfigurationExperience:
    """ExperimentConfig : ce qu'il faut pour rejouer une expérience à l'identique."""
    mode: str = 'test'
    propriete: Optional[Propriete] = None
    epsilon: Fraction = Fraction(1, 3)
    essais: int = 1
    graine: int = 0
    instance: str = ''
    limite_bande: Optional[int] = None
    sortie: Optional[str] = None
    sortie_csv: Optional[str] = None
    travailleurs: int = 1
    variante_pi: str = VARIANTE_MOINS_UN
    phases_arbre: Optional[int] = None
    arbre_global: bool = False
    arret_au_rejet: bool = True

    @staticmethod
    def depuis_valeurs(valeurs: Mapping[str, Optional[str]]) -> "ConfigurationExperience":
        """
        Construit une configuration depuis des paires clé=valeur
        (fichier de configuration puis surcharges de la ligne de commande).

        Raises:
            ErreurConfiguration: clé inconnue ou valeur illisible
        """
        config = ConfigurationExperience()
        lecteurs = {
            'mode': lambda v: ('mode', v.strip()),
            'property': lambda v: ('propriete', Propriete.depuis_nom(v)),
            'epsilon': lambda v: ('epsilon', parser_epsilon(v)),
            'trials': lambda v: ('essais', int(v)),
            'seed': lambda v: ('graine', int(v)),
            'instance': lambda v: ('instance', v.strip()),
            'bandwidth': lambda v: ('limite_bande', int(v)),
            'out': lambda v: ('sortie', v.strip()),
            'csv': lambda v: ('sortie_csv', v.strip()),
            'workers': lambda v: ('travailleurs', int(v)),
            'pi_variant': lambda v: ('variante_pi', v.strip()),
            'tree_phases': lambda v: ('phases_arbre', int(v)),
            'tree_global': lambda v: ('arbre_global', _booleen(v)),
            'stop_on_reject': lambda v: ('arret_au_rejet', _booleen(v)),
        }
        champs: Dict[str, object] = {}
        for cle, valeur in valeurs.items():
            if valeur is None or valeur == '':
                continue
            if cle not in lecteurs:
                raise ErreurConfiguration(f"Clé de configuration inconnue : '{cle}'.")
            try:
                nom, lu = lecteurs[cle](valeur)
            except ValueError as e:
                raise ErreurConfiguration(f"Valeur invalide pour '{cle}' : '{valeur}' ({e}).")
            champs[nom] = lu
        return replace(config, **champs)

    def valider(self) -> None:
        """
        Raises:
            ErreurConfiguration: première règle violée
        """
        regles = [
            (self.mode in MODES, f"Mode inconnu '{self.mode}' ({', '.join(MODES)})."),
            ServiceValidation.valider_epsilon(self.epsilon),
            ServiceValidation.valider_essais(self.essais),
            ServiceValidation.valider_graine(self.graine),
            ServiceValidation.valider_travailleurs(self.travailleurs),
            ServiceValidation.valider_specification_instance(self.instance),
        ]
        if self.mode == 'test' and self.propriete is None:
            regles.append((False, "Le mode test exige une propriété (--property)."))
        if self.propriete is not None and self.propriete.motif is not None:
            regles.append(ServiceValidation.valider_motif_h(self.propriete.motif))
        for valide, message in regles:
            if not valide:
                raise ErreurConfiguration(message)

    @property
    def chemin_csv(self) -> Optional[str]:
        """CSV des essais : --out en mode test, sinon --csv ou <out>_essais.csv."""
        if self.mode == 'test':
            return self.sortie
        if self.sortie_csv:
            return self.sortie_csv
        if self.sortie:
            chemin = Path(self.sortie)
            return str(chemin.with_name(f"{chemin.stem}_essais.csv"))
        return None

    @property
    def nom_propriete(self) -> str:
        if self.mode == 'correct':
            return Propriete.cycle_free().nom
        if self.propriete is None:
            return self.mode
        return self.propriete.nom


def charger_fichier_configuration(chemin: str) -> Dict[str, Optional[str]]:
    """Lit un fichier clé=valeur (syntaxe .env)."""
    if not Path(chemin).is_file():
        raise ErreurConfiguration(f"Fichier de configuration introuvable : '{chemin}'.")
    return dict(dotenv_values(chemin))


@dataclass
class Instance:
    graphe: Graphe
    description: str
    certificat: Optional[CertificatEloignement] = None
    satisfait: Optional[bool] = None


def resoudre_instance(spec: str, propriete: Optional[Propriete], graine: int) -> Instance:
    """
    Charge ou génère l'instance et établit ce que l'on sait d'elle :
    certificat d'éloignement et/ou appartenance à la propriété.
    """
    genre, args = ServiceValidation.decouper_specification(spec)
    if genre == 'copies':
        graphe, certificats = gen_disjoint_copies(motif_nomme(args[0]), int(args[1]))
        certificat = certificat_pour(certificats, propriete) if propriete else None
        connu = False if certificat else (satisfait(graphe, propriete) if propriete else None)
        return Instance(graphe, spec, certificat, connu)
    if genre == 'satisfying':
        if propriete is None:
            raise ErreurConfiguration("satisfying:<n> exige une propriété.")
        return Instance(gen_property_instance(propriete, int(args[0]), graine), spec, None, True)

    if genre == 'gnm':
        graphe = graphe_gnm(int(args[0]), int(args[1]), graine)
    elif genre == 'gnp':
        graphe = graphe_gnp(int(args[0]), float(args[1]), graine)
    elif genre == 'path':
        graphe = graphe_chemin(int(args[0]))
    elif genre == 'star':
        graphe = graphe_etoile(int(args[0]))
    else:
        graphe = lire_fichier_graphe(args[0])

    if propriete is None:
        return Instance(graphe, spec)
    try:
        distance = dist_to_property(graphe, propriete)
    except ErreurGarde as e:
        logger.info("Distance non calculée (%s), appartenance seule", e)
        return Instance(graphe, spec, None, satisfait(graphe, propriete))
    certificat = None
    if distance > 0:
        certificat = CertificatEloignement(propriete, Fraction(distance, graphe.m), distance, graphe.m)
    return Instance(graphe, spec, certificat, distance == 0)


@dataclass
class LigneEssai:
    """Résultat d'un essai, transportable entre processus."""
    indice: int
    rapport: RapportEssai
    texte: str = ''
    bilan: Optional[BilanCorrection] = None
    violations: Tuple[str, ...] = ()
    fraction_coupee: Optional[float] = None
    dans_borne_tours: Optional[bool] = None
    requetes: Optional[int] = None


def _configuration_execution(config: ConfigurationExperience, graine: int) -> ConfigurationExecution:
    return ConfigurationExecution(
        graine=graine, limite_bande=config.limite_bande, arret_au_rejet=config.arret_au_rejet,
    )


def _tester(graphe: Graphe, config: ConfigurationExperience, graine: int) -> Tuple[RapportEssai, Optional[int]]:
    propriete = config.propriete
    assert propriete is not None
    epsilon = config.epsilon
    execution = _configuration_execution(config, graine)

    if propriete.type == TypePropriete.TRIANGLE_FREE:
        return run(graphe, triangle_tester(epsilon), execution), None
    if propriete.type == TypePropriete.C4_FREE:
        return run(graphe, c4_tester(epsilon, variante=config.variante_pi), execution), None
    if propriete.type == TypePropriete.H_FREE:
        assert propriete.motif is not None
        return run(graphe, h4_tester(propriete.motif, epsilon, variante=config.variante_pi), execution), None
    if propriete.type == TypePropriete.BIPARTITE:
        return compiled_tester(graphe, bipartite_verifier(), epsilon, graine, execution), None
    if propriete.type == TypePropriete.CYCLE_FREE:
        return compiled_tester(graphe, cyclefree_verifier(), epsilon, graine, execution), None

    assert propriete.arbre is not None
    if config.arbre_global:
        rng = np.random.default_rng(graine)
        resultat = global_tree_tester(
            OracleRequetes(graphe, rng), propriete.arbre, epsilon, rng, iterations=config.phases_arbre,
        )
        rapport = RapportEssai(verdicts={0: resultat.verdict}, tours=0, bits_max=0, graine=graine)
        return rapport, resultat.requetes
    programme = distributed_tree_tester(propriete.arbre, epsilon, config.phases_arbre)
    return run(graphe, programme, execution), None


def executer_essai(graphe: Graphe, config: ConfigurationExperience, indice: int) -> LigneEssai:
    """Un essai complet ; fonction de module pour le pool de processus."""
    graine = deriver_graine(config.graine, indice)

    if config.mode == 'decompose':
        decomposition = decompose(graphe, config.epsilon, graine, _configuration_execution(config, graine))
        verification = verify_decomposition(graphe, decomposition, config.epsilon)
        rapport = RapportEssai(
            verdicts={v: Verdict.ACCEPT for v in graphe.sommets()},
            tours=decomposition.tours, bits_max=decomposition.bits_max, graine=graine,
        )
        return LigneEssai(
            indice=indice,
            rapport=rapport,
            texte=decomposition.vers_texte(),
            violations=tuple(str(v) for v in verification.violations),
            fraction_coupee=verification.fraction_coupee,
            dans_borne_tours=decomposition.tours <= borne_tours_decomposition(graphe.n, config.epsilon),
        )

    if config.mode == 'correct':
        correction = cyclefree_corrector(graphe, config.epsilon, graine, _configuration_execution(config, graine))
        bilan = verifier_correction(graphe, correction, config.epsilon)
        rapport = replace(correction.rapport, sorties={})
        return LigneEssai(
            indice=indice, rapport=rapport, texte=correction.vers_texte() + bilan.vers_texte(), bilan=bilan,
        )

    rapport, requetes = _tester(graphe, config, graine)
    return LigneEssai(indice=indice, rapport=replace(rapport, sorties={}), requetes=requetes)


def _taux(evenements: Iterable[bool]) -> float:
    liste = list(evenements)
    return sum(liste) / len(liste)


@dataclass
class RapportAgrege:
    """AggregateReport : bilan des essais d'une expérience."""
    acceptations: int
    rejets: int
    tours_moyens: float
    tours_max: int
    bits_max: int
    lignes: List[LigneEssai] = field(repr=False)
    type_porte: Optional[str] = None
    porte: Optional[bool] = None
    # Mode correct : fractions d'essais hors borne |E'| et hors budget des arêtes gardées
    taux_hors_borne: Optional[float] = None
    taux_hors_budget: Optional[float] = None
    # Mode decompose
    fraction_coupee_moyenne: Optional[float] = None
    taux_hors_borne_tours: Optional[float] = None

    @property
    def essais(self) -> int:
        return self.acceptations + self.rejets

    @property
    def fraction_rejet(self) -> float:
        return self.rejets / self.essais if self.essais else 0.0

    @staticmethod
    def depuis_lignes(lignes: List[LigneEssai]) -> "RapportAgrege":
        rejets = sum(1 for l in lignes if l.rapport.verdict == Verdict.REJECT)
        tours = [l.rapport.tours for l in lignes]
        bilans = [l.bilan for l in lignes if l.bilan is not None]
        fractions = [l.fraction_coupee for l in lignes if l.fraction_coupee is not None]
        bornes_tours = [l.dans_borne_tours for l in lignes if l.dans_borne_tours is not None]
        return RapportAgrege(
            acceptations=len(lignes) - rejets,
            rejets=rejets,
            tours_moyens=sum(tours) / len(tours) if tours else 0.0,
            tours_max=max(tours, default=0),
            bits_max=max((l.rapport.bits_max for l in lignes), default=0),
            lignes=lignes,
            taux_hors_borne=_taux(not b.borne_respectee for b in bilans) if bilans else None,
            taux_hors_budget=_taux(not b.budget_respecte for b in bilans) if bilans else None,
            fraction_coupee_moyenne=sum(fractions) / len(fractions) if fractions else None,
            taux_hors_borne_tours=_taux(not d for d in bornes_tours) if bornes_tours else None,
        )


def marge_binomiale(seuil: Fraction, essais: int) -> float:
    """3·sqrt(seuil·(1 - seuil)/essais)."""
    return 3 * math.sqrt(float(seuil) * (1 - float(seuil)) / essais)


def soundness_gate(
    rapport: RapportAgrege,
    seuil: Fraction = SEUIL_CORRECTION,
    marge: Optional[float] = None
) -> bool:
    """Vrai si la fraction de rejets atteint seuil - marge."""
    if rapport.essais == 0:
        return False
    if marge is None:
        marge = marge_binomiale(seuil, rapport.essais)
    return rapport.fraction_rejet >= float(seuil) - marge


def completeness_gate(rapport: RapportAgrege) -> bool:
    """Testeurs à erreur unilatérale : aucun rejet."""
    return rapport.rejets == 0


def vers_csv(rapport: RapportAgrege, config: ConfigurationExperience, graphe: Graphe) -> str:
    tampon = io.StringIO()
    ecrivain = csv.writer(tampon, lineterminator='\n')
    ecrivain.writerow(ENTETE_CSV)
    for ligne in rapport.lignes:
        ecrivain.writerow(ligne.rapport.vers_ligne_csv(config.nom_propriete, config.epsilon, graphe.n, graphe.m))
    return tampon.getvalue()


def texte_sorties(rapport: RapportAgrege) -> str:
    """Sorties des modes correct/decompose ; un bloc par essai s'il y en a plusieurs."""
    if len(rapport.lignes) == 1:
        return rapport.lignes[0].texte
    return "".join(
        f"# essai {l.indice} graine {l.rapport.graine}\n{l.texte}" for l in rapport.lignes
    )


class ServiceExperience:
    """
    Service d'expérience.

    Orchestration des essais, portes et persistance des résultats.
    """

    @staticmethod
    def executer(config: ConfigurationExperience) -> Tuple[RapportAgrege, Instance]:
        """
        Exécute une expérience et écrit ses sorties.

        Raises:
            ErreurConfiguration: configuration invalide
            ErreurBanc: instance illisible, garde d'oracle, bande passante
        """
        config.valider()
        instance = resoudre_instance(config.instance, config.propriete, config.graine)
        graphe = instance.graphe
        valide, message = ServiceValidation.valider_limite_bande(config.limite_bande, graphe.n)
        if not valide:
            raise ErreurConfiguration(message)

        logger.info(
            "Expérience %s %s ε=%s sur %s (%r), %d essais",
            config.mode, config.nom_propriete, config.epsilon, instance.description, graphe, config.essais,
        )
        indices = range(config.essais)
        if config.travailleurs > 1:
            with ProcessPoolExecutor(max_workers=config.travailleurs) as pool:
                lignes = list(pool.map(executer_essai, repeat(graphe), repeat(config), indices))
        else:
            lignes = [executer_essai(graphe, config, i) for i in indices]

        rapport = RapportAgrege.depuis_lignes(lignes)
        ServiceExperience._appliquer_porte(rapport, config, instance)

        if config.sortie and config.mode != 'test':
            Path(config.sortie).write_text(texte_sorties(rapport), encoding='utf-8')
        if config.chemin_csv:
            Path(config.chemin_csv).write_text(vers_csv(rapport, config, graphe), encoding='utf-8')
        logger.info(
            "Bilan : %d/%d rejets, porte %s = %s",
            rapport.rejets, rapport.essais, rapport.type_porte, rapport.porte,
        )
        return rapport, instance

    @staticmethod
    def _appliquer_porte(rapport: RapportAgrege, config: ConfigurationExperience, instance: Instance) -> None:
        if config.mode == 'decompose':
            rapport.type_porte = 'decompose'
            rapport.porte = all(not l.violations and l.dans_borne_tours for l in rapport.lignes)
        elif config.mode == 'correct':
            rapport.type_porte = 'correct'
            rapport.porte = all(l.bilan is not None and l.bilan.valide for l in rapport.lignes)
        elif instance.certificat is not None and instance.certificat.est_eloigne(config.epsilon):
            rapport.type_porte = 'soundness'
            rapport.porte = soundness_gate(rapport)
        elif instance.satisfait:
            rapport.type_porte = 'completeness'
            rapport.porte = completeness_gate(rapport)

    @staticmethod
    def enregistrer(
        db: Session,
        config: ConfigurationExperience,
        instance: Instance,
        rapport: RapportAgrege
    ) -> Experience:
        """Archive l'expérience et ses essais dans la base de résultats."""
        experience = Experience(
            mode=ModeExperience(config.mode),
            propriete=config.nom_propriete,
            epsilon=str(config.epsilon),
            instance=instance.description,
            n=instance.graphe.n,
            m=instance.graphe.m,
            essais=rapport.essais,
            graine=config.graine,
            acceptations=rapport.acceptations,
            rejets=rapport.rejets,
            tours_moyens=rapport.tours_moyens,
            tours_max=rapport.tours_max,
            bits_max=rapport.bits_max,
            type_porte=rapport.type_porte,
            porte=rapport.porte,
        )
        for ligne in rapport.lignes:
            experience.lignes.append(Essai(
                indice=ligne.indice,
                graine=str(ligne.rapport.graine),
                verdict=ligne.rapport.verdict.value,
                tours=ligne.rapport.tours,
                bits_max=ligne.rapport.bits_max,
                aretes_supprimees=ligne.bilan.taille if ligne.bilan else None,
                acyclique=ligne.bilan.acyclique if ligne.bilan else None,
                budget_respecte=ligne.bilan.budget_respecte if ligne.bilan else None,
                borne_respectee=ligne.bilan.borne_respectee if ligne.bilan else None,
            ))
        return ExperienceRepository.create(db, experience)


def run_experiment(config: ConfigurationExperience) -> RapportAgrege:
    rapport, _ = ServiceExperience.executer(config)
    return rapport
