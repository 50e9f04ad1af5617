"""Exception types raised across the package."""


class BuresGeoError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(BuresGeoError):
    """Operands have incompatible shapes or sizes."""


class NotHermitian(BuresGeoError):
    """Matrix fails the Hermiticity tolerance."""


class NotPSD(BuresGeoError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class ConvergenceFailure(BuresGeoError):
    """Eigensolver did not converge."""


class OutOfChartRange(BuresGeoError):
    """A chart coordinate lies outside its admissible range."""

    def __init__(self, coordinate: str, value: float, reason: str):
        self.coordinate = coordinate
        self.value = value
        super().__init__(f"coordinate {coordinate}={value!r} out of range: {reason}")


class InvalidDensityMatrix(BuresGeoError):
    """Matrix violates a density-matrix invariant (names which one)."""


class VerificationFailure(BuresGeoError):
    """A construction-time self-check failed (implementation bug)."""


class DegenerateSupport(BuresGeoError):
    """Tangent leaves the support of a rank-deficient state; the form diverges."""


class SingularState(BuresGeoError):
    """State determinant below the nonsingularity tolerance."""


class PureState(BuresGeoError):
    """State is (numerically) pure where a strictly mixed one is required."""


class DegenerateSpectrum(BuresGeoError):
    """Eigenvalue gap below the tolerance required by the operation."""


class BoundaryTooClose(BuresGeoError):
    """Chart point too close to a range boundary for finite differencing."""


class FitFailure(BuresGeoError):
    """Chart recovery did not reach the target residual after multistart."""


class InvalidTangent(BuresGeoError):
    """Matrix violates a tangent-vector invariant (Hermitian, traceless)."""
