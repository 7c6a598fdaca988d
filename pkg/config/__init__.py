# Module de configuration du banc d'essai (paramètres, journalisation, base de résultats)
