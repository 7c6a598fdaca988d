# Couche d'accès aux données (Data Access Layer)
# Cette couche contient le format de graphe (lecture/écriture de fichiers)
# et les modèles SQLAlchemy de la base de résultats.
