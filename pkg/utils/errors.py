class PrecisionError(RuntimeError):
    """
    Levée lorsqu'une reconnaissance numérique (entier, élément de O_K, racine 12-ième)
    échoue encore après montée en précision jusqu'à MAX_PREC.
    """


class ChoiceRequiredError(ValueError):
    """
    Levée lorsqu'un calcul a besoin d'un prolongement de ψ aux idéaux non principaux
    et qu'aucun choix n'a été fourni (ou ne peut être fait automatiquement).
    """
