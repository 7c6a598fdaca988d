"""
Point d'entrée principal du banc d'essai CONGEST.

Exemples :
    python main.py test --property triangle --epsilon 1/3 --gen copies:triangle:30 --trials 400 --out essais.csv
    python main.py correct --gen gnm:200:600 --epsilon 1/4 --seed 7 --out supprimees.txt
    python main.py decompose --graph graphe.txt --epsilon 1/5 --seed 1 --out grappes.txt
    python main.py history
"""

import sys

from ui.ligne_commande import main

if __name__ == "__main__":
    sys.exit(main())
