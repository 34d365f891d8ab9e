"""Exception hierarchy shared by every module."""


class ShearlabError(Exception):
    """Base class for all errors raised by shearlab."""


class GeometryError(ShearlabError, ValueError):
    pass


class DegenerateQuadruple(GeometryError):
    """Two points of a quadruple coincide, or the points are not cyclically ordered."""


class DegenerateTriple(GeometryError):
    pass


class NoSolutionInArc(GeometryError):
    """The requested cross ratio cannot be attained in the admissible arc."""


class OutOfRange(ShearlabError, ValueError):
    pass


class ModelMismatch(ShearlabError, ValueError):
    """A disk-model map was given a half-plane point, or vice versa."""


class DepthLimit(ShearlabError, ValueError):
    pass


class UnknownEdge(ShearlabError, KeyError):
    pass


class WindowExceedsDepth(ShearlabError, ValueError):
    pass


class BoundaryEdgeAtDepth(ShearlabError, ValueError):
    pass


class DegenerateImage(ShearlabError, ArithmeticError):
    pass


class ShearOverflow(ShearlabError, OverflowError):
    pass


class EmptyWindow(ShearlabError, ValueError):
    pass


class NotNormalized(ShearlabError, ValueError):
    pass


class NoConvergence(ShearlabError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateDenominator(ShearlabError, ArithmeticError):
    pass


class NotHomeomorphic(ShearlabError, ArithmeticError):
    """A Beltrami coefficient with modulus >= 1 was produced."""
