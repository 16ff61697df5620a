"""Exception hierarchy for lbmgof."""


class LBMError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateShape(LBMError, ValueError):
    def __init__(self, n, p):
        self.n, self.p = n, p
        super().__init__(f"matrix must be at least 2x2, got {n}x{p}")


class NonFiniteEntry(LBMError, ValueError):
    """A NaN or infinite entry; ``row`` and ``col`` are 1-based."""

    def __init__(self, row, col):
        self.row, self.col = row, col
        super().__init__(f"non-finite entry at ({row}, {col})")


class InvalidStructure(LBMError, ValueError):
    pass


class InvalidParams(LBMError, ValueError):
    pass


class TooManyClusters(LBMError, ValueError):
    pass


class DimensionMismatch(LBMError, ValueError):
    pass


class TooManyClustersForExhaustiveAlignment(LBMError, ValueError):
    pass


class DegenerateBlock(LBMError, ArithmeticError):
    """Zero estimated standard deviation in block (k, h), 1-based."""

    def __init__(self, k, h, std=0.0):
        self.k, self.h, self.std = k, h, std
        super().__init__(f"degenerate block ({k}, {h}): estimated std {std:.3g}")


class Inapplicable(LBMError):
    """The test cannot be computed for this hypothesis (wraps DegenerateBlock)."""

    def __init__(self, cause):
        self.cause = cause
        super().__init__(f"test inapplicable: {cause}")


class NoConvergence(LBMError, ArithmeticError):
    def __init__(self, estimate, residual, iterations):
        self.estimate, self.residual, self.iterations = estimate, residual, iterations
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(last estimate {estimate!r}, residual {residual:.3g})"
        )


class AlphaOutOfRange(LBMError, ValueError):
    pass


class EmptySample(LBMError, ValueError):
    pass
