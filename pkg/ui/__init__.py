# Couche présentation (User Interface)
# Cette couche contient la ligne de commande du banc d'essai
# et les tableaux de bord des expériences archivées.
