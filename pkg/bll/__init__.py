# Couche métier (Business Logic Layer)
# Cette couche contient les algorithmes du banc d'essai : simulateur CONGEST,
# décomposition, testeurs distribués, correcteur, oracles et expériences.
