"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numeric routine failed (eigen solve, rank-deficient fit, non-finite loss)."""


class RootSolveError(NumericalError):
    """The eigenvalue-based root solve did not converge or returned bad roots."""

    def __init__(self, degree, message):
        super().__init__(f"root solve failed for degree {degree}: {message}")
        self.degree = degree


class RankDeficiencyError(NumericalError):
    """The least-squares design matrix is numerically rank deficient."""

    def __init__(self, index, message):
        super().__init__(f"rank-deficient design at basis index {index}: {message}")
        self.index = index
