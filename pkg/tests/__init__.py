# Tests unitaires et tests par propriétés du banc d'essai CONGEST
