"""Exception hierarchy.

Every numerical precondition failure raises a subclass of
:class:`QuasiRepError` carrying the measured quantity that tripped it.
"""


class QuasiRepError(ValueError):
    pass


class SpectrumOnBranchCut(QuasiRepError):
    def __init__(self, distance):
        self.distance = float(distance)
        super().__init__(
            f"eigenvalue within {self.distance:.3e} of the closed negative real axis"
        )


class BranchCutHit(SpectrumOnBranchCut):
    pass


class SpectralGapTooSmall(QuasiRepError):
    def __init__(self, gap, threshold):
        self.gap = float(gap)
        self.threshold = float(threshold)
        super().__init__(
            f"spectral gap to Re z = 1/2 is {self.gap:.3e} (threshold {self.threshold:.1e})"
        )


class SingularInput(QuasiRepError):
    pass


class NotUnitary(QuasiRepError):
    pass


class GenusMismatch(QuasiRepError):
    pass


class DimensionTooSmall(QuasiRepError):
    pass


class UnclassifiedEdge(QuasiRepError):
    pass


class DegenerateEmbedding(QuasiRepError):
    pass


class NotAnEdge(QuasiRepError):
    pass


class SegmentNotInvertible(QuasiRepError):
    def __init__(self, message, simplex=None):
        self.simplex = simplex
        if simplex is not None:
            message = f"{message} (simplex {simplex})"
        super().__init__(message)


class QuadratureStall(QuasiRepError):
    pass


class ParseError(QuasiRepError):
    pass


class DimensionMismatch(QuasiRepError):
    pass


class VerificationFailed(QuasiRepError):
    """A component failed inside :func:`verify`; ``stage`` names it."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
