"""Exception types shared across the package."""


class EntconvError(Exception):
    """Base class for all package-specific errors."""


class NotHermitianError(EntconvError, ValueError):
    """Matrix is not Hermitian within tolerance."""


class OutOfRangeError(EntconvError, ValueError):
    """Scalar parameter or weight vector violates its documented range."""


class NotUnitaryError(EntconvError, ValueError):
    """Matrix is not unitary within tolerance."""


class NotSeparableError(EntconvError, ValueError):
    """State fails the positive-partial-transpose test and cannot be prepared locally."""


class NotProductDiagonalError(EntconvError, ValueError):
    """No product-state decomposition of the target could be constructed."""


class BadWeightsError(EntconvError, ValueError):
    """Mixture weights are negative, do not sum to one, or carry no success mass."""


class NotTracePreservingError(EntconvError, ValueError):
    """Kraus family fails the completeness (trace preservation) check."""


class InfeasibleError(EntconvError):
    """Protocol synthesis has no solution; .detail names the violated bound."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class NotEntangledError(EntconvError, ValueError):
    """Operation requires an entangled state but was given a separable one."""


class SamplingExhaustedError(EntconvError, RuntimeError):
    """Rejection sampling hit its attempt bound without an accept."""
