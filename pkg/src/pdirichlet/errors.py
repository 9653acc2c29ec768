"""Exception hierarchy.

Class names double as the structured error names reported by the CLI, so
they are kept short and stable.
"""


class PDirichletError(ValueError):
    """Base class for every validation error raised by this package."""


# graph
class GraphError(PDirichletError):
    pass


class NotDecomposable(GraphError):
    pass


class NotPerfectOrder(GraphError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnknownVertex(GraphError):
    pass


# dags
class DagError(PDirichletError):
    pass


class CycleDetected(DagError):
    pass


class SkeletonMismatch(DagError):
    pass


class ImmoralityDetected(DagError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class NotPPerfect(DagError):
    pass


class NoPerfectOrderFound(DagError):
    pass


# families
class FamilyError(PDirichletError):
    pass


class InteriorSetInMultipleCliques(FamilyError):
    pass


class ChainNotNested(FamilyError):
    pass


class UnknownOrder(FamilyError):
    pass


class UnknownDag(FamilyError):
    pass


# priors and data
class PriorError(PDirichletError):
    pass


class ConstraintViolated(PriorError):
    def __init__(self, message, residual=None, slot=None):
        super().__init__(message)
        self.residual = residual
        self.slot = slot


class NonPositiveParameter(PriorError):
    pass


class MissingTable(PriorError):
    pass


class NegativeExponent(PriorError):
    pass


class InconsistentHyperParameters(PriorError):
    pass


class GraphMismatch(PriorError):
    pass


class CellOutOfRange(PriorError):
    pass


class TooLarge(PDirichletError):
    pass
