"""Exception hierarchy shared by all qpermlab modules."""


class QPermError(Exception):
    """Base class for all domain errors raised by this package."""


# -- linear algebra kernel ---------------------------------------------------

class ShapeMismatch(QPermError):
    pass


class NotHermitian(QPermError):
    pass


class NotPSD(QPermError):
    pass


class NoConvergence(QPermError):
    pass


# -- magic unitary constructions ---------------------------------------------

class TooLarge(QPermError):
    pass


class InvalidTable(QPermError):
    pass


class NotGenerating(QPermError):
    pass


class NotMagic(QPermError):
    pass


# -- Hopf structure ------------------------------------------------------------

class Truncated(QPermError):
    """Word enumeration hit the length cap before the algebra closed."""


class InconsistentComultiplication(QPermError):
    pass


class NoCounit(QPermError):
    pass


class NoAntipode(QPermError):
    pass


class NoHaar(QPermError):
    pass


class NonUniqueHaar(QPermError):
    pass


class DegenerateCentralElement(QPermError):
    pass


class ProjectionOutsideAlgebra(QPermError):
    pass


# -- states and measurement ----------------------------------------------------

class NotAState(QPermError):
    pass


class NotDensity(QPermError):
    pass


class NotPositiveDefinite(QPermError):
    pass


class NotInGroup(QPermError):
    pass


class NullEvent(QPermError):
    pass


class NotIdempotent(QPermError):
    pass


class GroupMismatch(QPermError):
    pass


# -- orbitals --------------------------------------------------------------------

class NotEquivalence(QPermError):
    """Numerical orbit relation failed transitivity; carries the witness triple."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# -- rewriter ---------------------------------------------------------------------

class RewriteSyntaxError(QPermError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class IndexOutOfRange(QPermError):
    pass


# -- shell ---------------------------------------------------------------------------

class InvalidSpec(QPermError):
    pass


class UnknownSession(QPermError):
    pass
