"""
Tests des oracles exacts : comptage de copies, distances, union-find.
"""

import pytest

from bll.erreurs import ErreurGarde
from bll.generateurs import graphe_chemin, graphe_complet, graphe_cycle, graphe_gnm, union_disjointe
from bll.oracles import (
    count_subgraph_copies, couverture_disjointe_gloutonne, dist_to_property, est_foret,
    graphe_deux_coloration, satisfait,
)
from bll.proprietes import MotifArbre, Propriete, motif_nomme
from dal.graphe import Graphe


class TestComptage:

    def test_triangles_de_k4(self, k4):
        assert count_subgraph_copies(k4, motif_nomme('triangle')) == 4

    def test_c4_de_k4(self, k4):
        assert count_subgraph_copies(k4, motif_nomme('c4')) == 3

    def test_k13_etoile(self, etoile_5):
        # C(5, 3) façons de choisir trois feuilles
        assert count_subgraph_copies(etoile_5, motif_nomme('k13')) == 10

    def test_chemins_p3_du_cycle(self):
        assert count_subgraph_copies(graphe_cycle(5), motif_nomme('p3')) == 5

    def test_garde_grand_motif(self):
        grand_motif = graphe_chemin(6)
        with pytest.raises(ErreurGarde):
            count_subgraph_copies(graphe_chemin(21), grand_motif)

    def test_couverture_disjointe(self):
        g = union_disjointe([graphe_complet(3)] * 4)
        assert len(couverture_disjointe_gloutonne(g, motif_nomme('triangle'))) == 4

    @pytest.mark.parametrize("alias,propriete", [("triangle", Propriete.triangle_free()), ("c4", Propriete.c4_free())])
    @pytest.mark.parametrize("seed", range(3))
    def test_couverture_et_distance(self, alias, propriete, seed):
        # Une couverture maximale touche toutes les copies : dist <= |E(H)| * taille
        g = graphe_gnm(9, 20, seed=seed)
        motif = motif_nomme(alias)
        couverture = couverture_disjointe_gloutonne(g, motif)
        assert dist_to_property(g, propriete) <= motif.m * len(couverture)
        assert len(couverture) >= dist_to_property(g, propriete) / 4


class TestDistances:

    def test_triangle_k4(self, k4):
        # Retirer un couplage parfait de K4 laisse un C4
        assert dist_to_property(k4, Propriete.triangle_free()) == 2

    def test_c4_k4(self, k4):
        assert dist_to_property(k4, Propriete.c4_free()) == 2

    def test_biparti_k4(self, k4):
        # Coupe maximale de K4 : 4 arêtes sur 6
        assert dist_to_property(k4, Propriete.bipartite()) == 2

    def test_biparti_cycle_impair(self):
        assert dist_to_property(graphe_cycle(5), Propriete.bipartite()) == 1
        assert dist_to_property(graphe_cycle(6), Propriete.bipartite()) == 0

    def test_sans_cycle_formule(self):
        g = union_disjointe([graphe_complet(4), graphe_cycle(5), graphe_chemin(3)])
        assert dist_to_property(g, Propriete.cycle_free()) == (6 - 3) + 1 + 0

    def test_h_diamant(self, k4):
        # K4 privé d'une arête est un diamant
        assert dist_to_property(k4, Propriete.h_free('diamond')) == 2

    def test_arbre_chemin(self):
        arbre = MotifArbre.chemin(3)
        assert dist_to_property(graphe_chemin(4), Propriete.tree_free(arbre)) == 1

    def test_additivite_sur_les_composantes(self, k4):
        g = union_disjointe([k4, k4, graphe_chemin(3)])
        assert dist_to_property(g, Propriete.triangle_free()) == 4

    def test_grande_composante_sans_copie(self):
        # Chemin de 30 sommets : pas de triangle, pas de garde déclenchée
        assert dist_to_property(graphe_chemin(30), Propriete.triangle_free()) == 0

    def test_garde_grande_composante(self):
        g = graphe_gnm(30, 200, seed=3)
        with pytest.raises(ErreurGarde):
            dist_to_property(g, Propriete.triangle_free())

    def test_distance_nulle_ssi_satisfait(self):
        for seed in range(5):
            g = graphe_gnm(10, 14, seed=seed)
            for propriete in (Propriete.triangle_free(), Propriete.c4_free(), Propriete.bipartite()):
                assert (dist_to_property(g, propriete) == 0) == satisfait(g, propriete)


class TestAcyclicite:

    def test_cycle_detecte(self):
        assert est_foret(3, [(0, 1), (1, 2)])
        assert not est_foret(3, [(0, 1), (1, 2), (2, 0)])

    def test_est_foret(self):
        assert est_foret(4, [(0, 1), (1, 2), (1, 3)])
        assert not est_foret(4, [(0, 1), (1, 2), (2, 0)])
        assert est_foret(0, [])

    def test_deux_coloration(self, carre, triangle):
        couleurs = graphe_deux_coloration(carre)
        assert couleurs is not None
        assert all(couleurs[u] != couleurs[v] for u, v in carre.aretes)
        assert graphe_deux_coloration(triangle) is None

    def test_graphe_vide(self):
        assert dist_to_property(Graphe(0), Propriete.bipartite()) == 0
