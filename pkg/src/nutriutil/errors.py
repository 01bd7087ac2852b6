"""Exception types shared across the package."""


class TableParseError(Exception):
    """A data file could not be parsed. Carries the offending line number."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        self.message = message
        super().__init__(f"{self.path}:{line}: {message}")


class DuplicateIdError(TableParseError):
    """Two rows of a data file share an identifier."""


class UnknownNutrientError(KeyError):
    """A nutrient id does not exist in the active table."""

    def __init__(self, nutrient_id: str):
        self.nutrient_id = nutrient_id
        super().__init__(nutrient_id)

    def __str__(self) -> str:
        return f"unknown nutrient id: {self.nutrient_id!r}"


class UnknownFoodError(KeyError):
    """A food id does not exist in the active food table."""

    def __init__(self, food_id: str):
        self.food_id = food_id
        super().__init__(food_id)

    def __str__(self) -> str:
        return f"unknown food id: {self.food_id!r}"


class MissingThresholdError(LookupError):
    """The requested nutrient has no usable allowance for the requested sex."""


class AreaNotCurveError(ValueError):
    """The level-1 set of the utility surface is a region, not a curve."""
