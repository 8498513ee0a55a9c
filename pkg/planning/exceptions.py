class PlanningError(Exception):
    """Base class for every error raised by the planning toolkit."""


class NotAdjacent(PlanningError):
    pass


class NotAPath(PlanningError):
    pass


class NotInCatalog(PlanningError):
    pass


class InvalidCatalog(PlanningError):
    pass


class UnknownVariant(PlanningError):
    pass


class InvalidCostTable(PlanningError):
    pass


class UnsupportedRatio(PlanningError):
    pass


class InvalidMap(PlanningError):
    """Semantic map problem. ``fields`` maps field name to a list of messages."""

    def __init__(self, fields):
        self.fields = {name: list(messages) for name, messages in fields.items()}
        detail = '; '.join(
            f"{name}: {' '.join(messages)}" for name, messages in sorted(self.fields.items())
        )
        super().__init__(detail or 'invalid map')


class ParseError(PlanningError):
    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class NoPath(PlanningError):
    def __init__(self, message='no admissible path to the target', statistics=None):
        self.statistics = statistics or {}
        super().__init__(message)


class Exhausted(PlanningError):
    pass


class IterationLimitExceeded(PlanningError):
    pass


class SelfOverlap(PlanningError):
    def __init__(self, cell, index):
        self.cell = cell
        self.index = index
        super().__init__(f"cell {cell.label} revisited at index {index}")


class Infeasible(PlanningError):
    def __init__(self, message, min_clearance=None, max_curvature_ratio=None):
        self.min_clearance = min_clearance
        self.max_curvature_ratio = max_curvature_ratio
        super().__init__(message)
