"""
Tests des testeurs locaux : triangle, C4, motifs à 4 sommets.
"""

from fractions import Fraction

import numpy as np
import pytest

from bll.congest import ConfigurationExecution, Verdict, largeur_identifiant, run
from bll.erreurs import ErreurInvariant
from bll.generateurs import gen_disjoint_copies, gen_property_instance, graphe_chemin, graphe_etoile, graphe_gnm
from bll.proprietes import Propriete, motif_nomme
from bll.testeurs_locaux import (
    VARIANTE_DEGRE, ConnaissanceVoisins, TesteurChemins, TesteurDegre, TesteurTriangle, c4_tester,
    chemins_deux, h4_tester, iterations_chemins, iterations_triangle, pi_v_distribution,
    probabilite_detection_chemin, probabilite_detection_triangle, sample_2path, triangle_tester,
)
from dal.graphe import Graphe

TIERS = Fraction(1, 3)
COMPLET = ConfigurationExecution(graine=0, arret_au_rejet=False)


class TestDistributionPi:

    def test_poids_moins_un(self):
        connaissance = ConnaissanceVoisins(((4, 1), (5, 2), (6, 3)))
        assert np.allclose(pi_v_distribution(connaissance), [0, 1 / 3, 2 / 3])

    def test_variante_degre(self):
        connaissance = ConnaissanceVoisins(((4, 1), (5, 2), (6, 3)))
        assert np.allclose(pi_v_distribution(connaissance, VARIANTE_DEGRE), [1 / 6, 2 / 6, 3 / 6])

    def test_distribution_nulle(self):
        assert pi_v_distribution(ConnaissanceVoisins(((1, 1), (2, 1)))) is None

    def test_voisinage_vide(self):
        with pytest.raises(ErreurInvariant):
            pi_v_distribution(ConnaissanceVoisins(()))

    def test_chemin_uniforme_sur_p2(self):
        g = Graphe(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (3, 4)])
        v = 0
        pi = pi_v_distribution(ConnaissanceVoisins.depuis_graphe(g, v))
        chemins = chemins_deux(g, v)
        for _, a, _ in chemins:
            index = g.voisins(v).index(a)
            assert pi[index] / (g.degre(a) - 1) == pytest.approx(1 / len(chemins))


class TestTirageChemin:

    def test_cible_non_voisine(self):
        connaissance = ConnaissanceVoisins(((5, 1), (7, 3)))
        with pytest.raises(ErreurInvariant):
            sample_2path(0, 9, connaissance, [None, 8], np.random.default_rng(0))

    def test_tirage_force(self):
        connaissance = ConnaissanceVoisins(((5, 1), (7, 3)))
        chemin = sample_2path(0, 5, connaissance, [None, 5], np.random.default_rng(0), avec_bit=True)
        assert (chemin.origine, chemin.milieu, chemin.extremite) == (0, 7, 5)
        assert chemin.adjacent is True

    def test_distribution_nulle(self):
        connaissance = ConnaissanceVoisins(((5, 1), (7, 1)))
        assert sample_2path(0, 5, connaissance, [None, None], np.random.default_rng(0)) is None

    def test_uniforme_empiriquement(self):
        g = Graphe(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (3, 4)])
        connaissance = ConnaissanceVoisins.depuis_graphe(g, 0)
        rng = np.random.default_rng(11)
        tirages = 20_000
        compte = {}
        for _ in range(tirages):
            valeurs_b = [
                int(rng.choice([b for b in g.voisins(a) if b != 0])) for a in g.voisins(0)
            ]
            chemin = sample_2path(0, 1, connaissance, valeurs_b, rng)
            cle = (chemin.milieu, chemin.extremite)
            compte[cle] = compte.get(cle, 0) + 1
        attendus = {(a, b) for _, a, b in chemins_deux(g, 0)}
        assert set(compte) == attendus
        ecart = sum(abs(c / tirages - 1 / len(attendus)) for c in compte.values()) / 2
        assert ecart <= 0.03


class TestProbabilitesExactes:

    def test_triangle_k4(self, k4):
        assert probabilite_detection_triangle(k4, 0, 1) == 1

    def test_triangle_degre_un(self):
        assert probabilite_detection_triangle(graphe_chemin(2), 0, 1) == 0

    def test_chemin_c4(self, carre):
        assert probabilite_detection_chemin(carre, 0, 1) == Fraction(1, 2)

    def test_chemin_sans_c4(self, chemin_10):
        assert probabilite_detection_chemin(chemin_10, 4, 5) == 0


class TestTesteurTriangle:

    def test_iterations(self):
        assert iterations_triangle(TIERS) == 12
        assert iterations_chemins(TIERS) == 48

    def test_rejette_sur_triangles(self):
        g, _ = gen_disjoint_copies(motif_nomme('triangle'), 4)
        rapport = run(g, TesteurTriangle(TIERS, iterations=1), COMPLET)
        # Dans un triangle, le seul tirage possible ferme le triangle
        assert rapport.rejetants() == list(range(12))
        assert rapport.tours == 2

    def test_tours_sur_instance_complete(self, chemin_10):
        rapport = run(chemin_10, triangle_tester(TIERS, iterations=3), COMPLET)
        assert rapport.verdict == Verdict.ACCEPT
        assert rapport.tours == 1 + 3
        assert rapport.bits_max == largeur_identifiant(10)

    @pytest.mark.parametrize("seed", range(3))
    def test_complet(self, seed):
        g = gen_property_instance(Propriete.triangle_free(), 60, seed)
        assert run(g, triangle_tester(TIERS), ConfigurationExecution(graine=seed)).verdict == Verdict.ACCEPT


class TestTesteurChemins:

    def test_rejette_sur_c4(self):
        g, _ = gen_disjoint_copies(motif_nomme('c4'), 10)
        assert run(g, c4_tester(TIERS), ConfigurationExecution(graine=1)).verdict == Verdict.REJECT

    def test_tours_sur_instance_complete(self):
        g = gen_property_instance(Propriete.c4_free(), 40, 2)
        rapport = run(g, c4_tester(TIERS, iterations=2), COMPLET)
        assert rapport.verdict == Verdict.ACCEPT
        assert rapport.tours == 1 + 3 * 2
        assert rapport.bits_max <= 3 * largeur_identifiant(40)

    def test_tours_au_quart(self):
        g = gen_property_instance(Propriete.c4_free(), 30, 5)
        testeur = c4_tester(Fraction(1, 4))
        assert testeur.iterations == 64
        rapport = run(g, testeur, COMPLET)
        assert rapport.verdict == Verdict.ACCEPT
        assert rapport.tours == 193

    @pytest.mark.parametrize("seed", range(3))
    def test_complet(self, seed):
        g = gen_property_instance(Propriete.c4_free(), 50, seed)
        rapport = run(g, c4_tester(TIERS, variante=VARIANTE_DEGRE), ConfigurationExecution(graine=seed))
        assert rapport.verdict == Verdict.ACCEPT

    @pytest.mark.parametrize("alias", ["k4", "diamond", "paw", "p4"])
    def test_motifs_a_quatre_sommets(self, alias):
        motif = motif_nomme(alias)
        g, _ = gen_disjoint_copies(motif, 8)
        testeur = h4_tester(motif, TIERS)
        assert isinstance(testeur, TesteurChemins)
        assert run(g, testeur, ConfigurationExecution(graine=2)).verdict == Verdict.REJECT

    def test_bit_d_adjacence_dans_la_bande(self):
        g, _ = gen_disjoint_copies(motif_nomme('k4'), 3)
        rapport = run(g, h4_tester(motif_nomme('k4'), TIERS, iterations=1), COMPLET)
        assert rapport.bits_max == 3 * largeur_identifiant(12) + 1

    @pytest.mark.parametrize("alias", ["k4", "paw", "diamond"])
    def test_h_complet(self, alias):
        g = gen_property_instance(Propriete.h_free(alias), 40, 1)
        assert run(g, h4_tester(motif_nomme(alias), TIERS), ConfigurationExecution()).verdict == Verdict.ACCEPT


class TestMotifsParDegre:

    def test_etoile(self, etoile_5):
        testeur = h4_tester(motif_nomme('k13'), TIERS)
        assert isinstance(testeur, TesteurDegre)
        rapport = run(etoile_5, testeur, ConfigurationExecution())
        assert rapport.rejetants() == [0]
        assert rapport.tours == 0

    def test_chemin_p3(self, chemin_10):
        rapport = run(chemin_10, h4_tester(motif_nomme('p3'), TIERS), ConfigurationExecution())
        assert rapport.rejetants() == list(range(1, 9))

    def test_triangle_par_motif(self, triangle):
        testeur = h4_tester(motif_nomme('triangle'), TIERS)
        assert isinstance(testeur, TesteurTriangle)
        assert testeur.nom == "h4:triangle"
        assert run(triangle, testeur, ConfigurationExecution()).verdict == Verdict.REJECT

    def test_motif_non_connexe(self):
        with pytest.raises(ErreurInvariant):
            h4_tester(Graphe(4, [(0, 1), (2, 3)]), TIERS)

    def test_etoile_sans_k13(self):
        rapport = run(graphe_etoile(2), h4_tester(motif_nomme('k13'), TIERS), ConfigurationExecution())
        assert rapport.verdict == Verdict.ACCEPT


def frequences_de_rejet(g: Graphe, fabrique, essais: int) -> np.ndarray:
    """Fréquence de rejet de chaque sommet sur `essais` exécutions complètes."""
    compte = np.zeros(g.n)
    for graine in range(essais):
        rapport = run(g, fabrique(), ConfigurationExecution(graine=graine, arret_au_rejet=False))
        compte[np.asarray(rapport.rejetants(), dtype=int)] += 1
    return compte / essais


def rejet_attendu(g: Graphe, u: int, probabilite) -> Fraction:
    """1 - Π (1 - p(v, u)) : les tirages des voisins sont indépendants."""
    echec = Fraction(1)
    for v in g.voisins(u):
        echec *= 1 - probabilite(g, v, u)
    return 1 - echec


def tolerance(p: float, essais: int) -> float:
    return 4 * (p * (1 - p) / essais) ** 0.5 + 0.01


class TestFrequencesParIteration:

    ESSAIS = 600

    # Deux C4 arête-disjoints qui partagent le sommet 0
    DEUX_C4 = Graphe(7, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 0)])

    def test_triangle(self):
        g = motif_nomme('diamond')
        frequences = frequences_de_rejet(g, lambda: TesteurTriangle(TIERS, iterations=1), self.ESSAIS)
        for u in g.sommets():
            attendue = float(rejet_attendu(g, u, probabilite_detection_triangle))
            assert abs(frequences[u] - attendue) <= tolerance(attendue, self.ESSAIS)

    def test_chemins(self):
        g = self.DEUX_C4
        frequences = frequences_de_rejet(g, lambda: c4_tester(TIERS, iterations=1), self.ESSAIS)
        for u in g.sommets():
            attendue = float(rejet_attendu(g, u, probabilite_detection_chemin))
            assert attendue > 0
            assert abs(frequences[u] - attendue) <= tolerance(attendue, self.ESSAIS)

    def test_bornes_inferieures(self):
        g = graphe_gnm(12, 26, seed=3)
        for u, v in g.aretes:
            for a, b in ((u, v), (v, u)):
                triangle = probabilite_detection_triangle(g, a, b)
                assert triangle == 0 or triangle >= Fraction(1, g.m)
                chemin = probabilite_detection_chemin(g, a, b)
                # Chaque 2-chemin de a est tiré avec probabilité 1/|P2(a)|
                assert chemin == 0 or chemin >= Fraction(1, len(chemins_deux(g, a)))
                assert chemin == 0 or chemin >= Fraction(1, 2 * g.m)

    def test_copies_independantes(self):
        # Les rejets des sommets opposés au sommet partagé sont indépendants
        g = self.DEUX_C4
        premier = second = conjoint = 0
        for graine in range(self.ESSAIS):
            rapport = run(g, c4_tester(TIERS, iterations=1), ConfigurationExecution(graine=graine, arret_au_rejet=False))
            rejetants = set(rapport.rejetants())
            premier += 2 in rejetants
            second += 5 in rejetants
            conjoint += {2, 5} <= rejetants
        p2, p5 = premier / self.ESSAIS, second / self.ESSAIS
        assert p2 == pytest.approx(7 / 16, abs=0.08)
        assert conjoint / self.ESSAIS == pytest.approx(p2 * p5, abs=0.06)
