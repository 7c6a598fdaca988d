"""
Tests de la décomposition en grappes et de sa vérification globale.
"""

import math
from dataclasses import replace
from fractions import Fraction

import pytest

from bll.congest import ConfigurationExecution
from bll.decomposition import (
    Decomposition, ParametresDecalage, TypeViolation, borne_tours_decomposition, decompose,
    verify_decomposition,
)
from bll.erreurs import ErreurInvariant, ErreurToursMax
from bll.generateurs import graphe_chemin, graphe_gnm, union_disjointe
from dal.graphe import Graphe

TIERS = Fraction(1, 3)


class TestParametres:

    def test_depuis_epsilon(self):
        parametres = ParametresDecalage.depuis_epsilon(TIERS, 100)
        assert parametres.beta == pytest.approx(1 / 9)
        assert parametres.plafond == math.ceil(2 * math.log(100) * 9)

    def test_plafond_minimal(self):
        assert ParametresDecalage.depuis_epsilon(Fraction(1), 1).plafond == 1

    def test_beta_invalide(self):
        with pytest.raises(ErreurInvariant):
            ParametresDecalage(beta=0.0, plafond=3)

    def test_borne_tours(self):
        assert borne_tours_decomposition(16, Fraction(1, 2)) == pytest.approx(8.0 * 4 / 0.5 + 3)


class TestDecompose:

    @pytest.mark.parametrize("seed", range(5))
    def test_aucune_violation(self, seed):
        g = graphe_gnm(60, 150, seed=seed)
        d = decompose(g, TIERS, seed)
        rapport = verify_decomposition(g, d, TIERS)
        assert rapport.valide, [str(v) for v in rapport.violations]
        assert rapport.excentricite_max <= d.borne_diametre

    def test_tours_par_tentative(self):
        g = graphe_gnm(40, 80, seed=1)
        d = decompose(g, TIERS, 2)
        plafond = ParametresDecalage.depuis_epsilon(TIERS, g.n).plafond
        assert d.tours <= d.tentatives * (plafond + 2)

    def test_deterministe(self):
        g = graphe_gnm(30, 60, seed=4)
        assert decompose(g, TIERS, 9) == decompose(g, TIERS, 9)

    def test_sommets_isoles(self):
        g = union_disjointe([graphe_chemin(3), Graphe(2)])
        d = decompose(g, TIERS, 0)
        assert d.cluster_de[3] == 3 and d.cluster_de[4] == 4
        assert d.parent_de[3] is None
        assert verify_decomposition(g, d, TIERS).valide

    def test_fraction_coupee_moyenne(self):
        g = graphe_chemin(200)
        fractions = [decompose(g, TIERS, seed).fraction_coupee(g.m) for seed in range(10)]
        assert sum(fractions) / len(fractions) <= float(TIERS)

    def test_centres_sans_parent(self):
        g = graphe_gnm(25, 50, seed=8)
        d = decompose(g, Fraction(1, 2), 3)
        for centre, membres in d.grappes().items():
            assert d.parent_de[centre] is None
            assert all(d.parent_de[v] is not None for v in membres if v != centre)

    def test_tours_max(self):
        with pytest.raises(ErreurToursMax):
            decompose(graphe_chemin(10), TIERS, 0, ConfigurationExecution(tours_max=2))

    def test_texte(self):
        g = Graphe(2, [(0, 1)])
        d = Decomposition(
            cluster_de=(0, 1), parent_de=(None, None), aretes_coupees=frozenset({(0, 1)}), borne_diametre=3,
        )
        assert d.vers_texte() == "0 0 -\n1 1 -\ncut 0 1\n"
        assert verify_decomposition(g, d, TIERS).depasse_epsilon


class TestVerification:

    @pytest.fixture
    def correcte(self):
        g = graphe_gnm(30, 70, seed=6)
        return g, decompose(g, TIERS, 1)

    def test_arete_interne_marquee_coupee(self, correcte):
        g, d = correcte
        interne = next(
            (u, v) for u, v in g.aretes_triees() if d.cluster_de[u] == d.cluster_de[v]
        )
        fausse = replace(d, aretes_coupees=d.aretes_coupees | {interne})
        assert TypeViolation.ARETE_INTERNE_COUPEE in verify_decomposition(g, fausse, TIERS).types()

    def test_arete_non_classee(self):
        g = Graphe(2, [(0, 1)])
        d = Decomposition(cluster_de=(0, 1), parent_de=(None, None), aretes_coupees=frozenset(), borne_diametre=3)
        assert TypeViolation.ARETE_NON_CLASSEE in verify_decomposition(g, d, TIERS).types()

    def test_parent_non_voisin(self):
        g = graphe_chemin(3)
        d = Decomposition(cluster_de=(0, 0, 0), parent_de=(None, 0, 0), aretes_coupees=frozenset(), borne_diametre=3)
        assert TypeViolation.PARENT_NON_VOISIN in verify_decomposition(g, d, TIERS).types()

    def test_diametre(self):
        g = graphe_chemin(4)
        d = Decomposition(
            cluster_de=(0, 0, 0, 0), parent_de=(None, 0, 1, 2), aretes_coupees=frozenset(), borne_diametre=2,
        )
        assert verify_decomposition(g, d, TIERS).types() == {TypeViolation.DIAMETRE}

    def test_grappe_non_connexe(self):
        g = Graphe(3, [(0, 1), (1, 2)])
        d = Decomposition(
            cluster_de=(0, 1, 0), parent_de=(None, None, 1),
            aretes_coupees=frozenset({(0, 1), (1, 2)}), borne_diametre=3,
        )
        types = verify_decomposition(g, d, TIERS).types()
        assert TypeViolation.GRAPPE_NON_CONNEXE in types
        assert TypeViolation.ARBRE_HORS_GRAPPE in types

    def test_partition_incomplete(self):
        g = graphe_chemin(3)
        d = Decomposition(cluster_de=(0,), parent_de=(None,), aretes_coupees=frozenset(), borne_diametre=1)
        assert verify_decomposition(g, d, TIERS).types() == {TypeViolation.PARTITION}
