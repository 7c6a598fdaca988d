"""
Tests du simulateur CONGEST : livraison, bande passante, tours, aléa.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bll.congest import (
    ConfigurationExecution, Message, ProgrammeSommet, Verdict, bit, derive_vertex_rng, deriver_graine,
    entier, etiquette, largeur_entier, largeur_etiquette, largeur_identifiant, limite_bande_defaut, rejouer, run,
    sommet,
)
from bll.erreurs import ErreurBandePassante, ErreurConfiguration, ErreurToursMax
from bll.generateurs import graphe_chemin
from dal.graphe import Graphe


class Echo(ProgrammeSommet):
    """Envoie son identifiant au tour 1, retient les identifiants reçus au tour 2."""

    nom = "echo"

    def init(self, ctx):
        return {'sommet': ctx.sommet, 'recus': {}}, None

    def step(self, etat, ctx):
        if ctx.tour == 1:
            ctx.diffuser(Message(sommet(etat['sommet'])))
            return etat, None
        etat['recus'] = {port: message.valeurs[0] for port, message in ctx.recus.items()}
        return etat, Verdict.ACCEPT

    def sortie(self, etat):
        return etat['recus']


class EchoVerifie(Echo):
    """Comme Echo, mais le tour 2 (vérification locale, sans envoi) est compté."""

    nom = "echo-verifie"

    def step(self, etat, ctx):
        if ctx.tour == 2:
            ctx.marquer_tour()
        return super().step(etat, ctx)


class TropBavard(ProgrammeSommet):
    """Envoie trois identifiants dans un seul message."""

    nom = "bavard"

    def init(self, ctx):
        return ctx.sommet, None

    def step(self, etat, ctx):
        ctx.diffuser(Message(sommet(etat), sommet(etat), sommet(etat)))
        return etat, Verdict.ACCEPT


class Dormeur(ProgrammeSommet):
    """Dort jusqu'au tour 1000 puis accepte ; le sommet 0 parle au réveil."""

    nom = "dormeur"

    def init(self, ctx):
        return ctx.sommet, None

    def step(self, etat, ctx):
        if ctx.tour < 1000:
            ctx.dormir_jusqua(1000)
            return etat, None
        if etat == 0 and ctx.degre:
            ctx.envoyer(0, Message(bit(True)))
        return etat, Verdict.ACCEPT


class SansFin(ProgrammeSommet):
    nom = "sans-fin"

    def init(self, ctx):
        return None, None

    def step(self, etat, ctx):
        return etat, None


class TirageAleatoire(ProgrammeSommet):
    """Rejette si le tirage du tour 1 est inférieur à 0.5."""

    nom = "tirage"

    def init(self, ctx):
        return None, None

    def step(self, etat, ctx):
        tirage = ctx.rng.random()
        return tirage, Verdict.REJECT if tirage < 0.5 else Verdict.ACCEPT

    def sortie(self, etat):
        return etat


graphes = st.integers(min_value=2, max_value=12).flatmap(
    lambda n: st.sets(
        st.sampled_from([(u, v) for u in range(n) for v in range(u + 1, n)]),
    ).map(lambda aretes: Graphe(n, aretes))
)


class TestLivraison:

    @settings(max_examples=50, deadline=None)
    @given(graphes)
    def test_chaque_message_livre_une_fois_au_bon_port(self, g):
        rapport = run(g, Echo(), ConfigurationExecution(graine=1))
        for v in g.sommets():
            recus = rapport.sorties[v]
            assert len(recus) == g.degre(v)
            assert tuple(recus[p] for p in range(g.degre(v))) == g.voisins(v)

    def test_tours_et_bits(self):
        g = graphe_chemin(5)
        rapport = run(g, Echo(), ConfigurationExecution())
        assert rapport.tours == 1
        assert rapport.bits_max == largeur_identifiant(5)
        assert rapport.verdict == Verdict.ACCEPT

    def test_graphe_sans_arete(self):
        rapport = run(Graphe(3), Echo(), ConfigurationExecution())
        assert rapport.tours == 0
        assert rapport.bits_max == 0


class TestBandePassante:

    def test_largeurs(self):
        assert largeur_identifiant(1) == 1
        assert largeur_identifiant(8) == 3
        assert largeur_identifiant(9) == 4
        assert largeur_entier(8) == 6
        assert limite_bande_defaut(8) == 20

    def test_trois_identifiants_au_dela_de_deux(self):
        g = graphe_chemin(16)
        limite = 2 * largeur_identifiant(16)
        with pytest.raises(ErreurBandePassante):
            run(g, TropBavard(), ConfigurationExecution(limite_bande=limite))

    def test_limite_par_defaut_suffit(self):
        rapport = run(graphe_chemin(16), TropBavard(), ConfigurationExecution())
        assert rapport.bits_max == 3 * largeur_identifiant(16)

    def test_valeur_hors_champ(self):
        with pytest.raises(ErreurBandePassante):
            Message(entier(128)).taille_bits(10)
        with pytest.raises(ErreurBandePassante):
            Message(sommet(16)).taille_bits(10)
        assert Message(sommet(3), bit(True)).taille_bits(4) == 3

    def test_etiquette_independante_de_n(self):
        assert largeur_etiquette(5) == 3
        assert Message(etiquette(4, 5)).taille_bits(2) == 3
        assert Message(etiquette(4, 5), entier(3)).taille_bits(2) == 3 + largeur_entier(2)
        with pytest.raises(ErreurBandePassante):
            Message(etiquette(5, 5)).taille_bits(100)

    def test_limite_inferieure_a_un_identifiant(self):
        with pytest.raises(ErreurConfiguration):
            run(graphe_chemin(16), Echo(), ConfigurationExecution(limite_bande=3))


class TestTours:

    def test_sommeil_avance_rapide(self):
        rapport = run(graphe_chemin(4), Dormeur(), ConfigurationExecution())
        assert rapport.tours == 1000
        assert all(v == Verdict.ACCEPT for v in rapport.verdicts.values())

    def test_tour_marque_sans_envoi(self):
        assert run(graphe_chemin(5), Echo(), ConfigurationExecution()).tours == 1
        rapport = run(graphe_chemin(5), EchoVerifie(), ConfigurationExecution())
        assert rapport.tours == 2
        assert rapport.bits_max == largeur_identifiant(5)

    def test_tours_max(self):
        with pytest.raises(ErreurToursMax):
            run(graphe_chemin(3), SansFin(), ConfigurationExecution(tours_max=50))

    def test_arret_au_rejet(self):
        g = graphe_chemin(30)
        rapport = run(g, TirageAleatoire(), ConfigurationExecution(graine=3, arret_au_rejet=True))
        # 2^-30 de chances qu'aucun des 30 sommets ne rejette
        assert rapport.verdict == Verdict.REJECT
        assert rapport.rejetants() == sorted(
            v for v in g.sommets() if rapport.sorties[v] < 0.5
        )


class TestAlea:

    def test_flux_reproductibles(self):
        a = derive_vertex_rng(42, 3, 7).integers(1 << 30, size=4)
        b = derive_vertex_rng(42, 3, 7).integers(1 << 30, size=4)
        assert np.array_equal(a, b)

    def test_flux_separes(self):
        a = derive_vertex_rng(42, 3, 7).integers(1 << 62)
        assert a != derive_vertex_rng(42, 4, 7).integers(1 << 62)
        assert a != derive_vertex_rng(42, 3, 8).integers(1 << 62)
        assert a != derive_vertex_rng(43, 3, 7).integers(1 << 62)

    def test_graines_derivees(self):
        assert deriver_graine(1, 0) == deriver_graine(1, 0)
        assert deriver_graine(1, 0) != deriver_graine(1, 1)
        assert 0 <= deriver_graine(2 ** 63 - 1, 5) < 2 ** 64

    def test_rejeu_identique(self):
        g = graphe_chemin(20)
        config = ConfigurationExecution(graine=11)
        rapport = run(g, TirageAleatoire(), config)
        rejeu = rejouer(g, TirageAleatoire(), rapport, ConfigurationExecution(graine=999))
        assert rejeu.verdicts == rapport.verdicts
        assert rejeu.sorties == rapport.sorties

    def test_ligne_csv(self):
        rapport = run(graphe_chemin(3), Echo(), ConfigurationExecution(graine=5))
        assert rapport.vers_ligne_csv("triangle", "1/3", 3, 2) == [
            "5", "ACCEPT", "1", "2", "triangle", "1/3", "3", "2",
        ]
