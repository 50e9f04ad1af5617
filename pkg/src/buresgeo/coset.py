"""Coset-chart parameterization of 2- and 3-level density matrices.

A density matrix is built as rho = Omega D Omega† where D carries the
eigenvalues (one angle theta for n=2, two angles theta1, theta2 for n=3)
and Omega is a product of coset blocks carrying the eigenvector data.

Chart ranges:
    n=2:  theta in [0, pi/4];  alpha, phi free (periodic).
    n=3:  theta1 in [0, arccos(1/sqrt 3)], theta2 in [pi/6, pi/4];
          alpha, phi, psi1, psi2 free; beta = hypot(beta1, beta2) < pi.

The beta < pi restriction keeps the big coset block nonsingular
(sin beta = 0 with cos beta = -1 at beta = pi); states on that boundary are
reachable through the permutation identities instead. This makes the tuple
a chart, not a global cover.
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import matcore
from .errors import (
    DimensionMismatch,
    InvalidDensityMatrix,
    OutOfChartRange,
    VerificationFailure,
)

THETA1_MAX = math.acos(1.0 / math.sqrt(3.0))
THETA2_MIN = math.pi / 6
THETA2_MAX = math.pi / 4
BETA_MAX = math.pi

# below this, sinc-type factors switch to Taylor series (terms through x^4)
_SERIES_CUTOFF = 1e-4

# slack for range checks, so decimal renderings of pi/4 etc. stay valid
RANGE_EPS = 1e-9


def _require_finite(name: str, value: float) -> float:
    v = float(value)
    if not math.isfinite(v):
        raise OutOfChartRange(name, value, "must be finite")
    return v


def _require_range(name: str, value: float, lo: float, hi: float) -> float:
    """Range check with RANGE_EPS slack; returns the value clamped into [lo, hi]."""
    v = _require_finite(name, value)
    if not (lo - RANGE_EPS <= v <= hi + RANGE_EPS):
        raise OutOfChartRange(name, v, f"must lie in [{lo:.10g}, {hi:.10g}]")
    return min(max(v, lo), hi)


@dataclass(frozen=True)
class CosetChart2:
    """Chart (theta, alpha, phi) for a 2-level state."""

    theta: float
    alpha: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta",
                           _require_range("theta", self.theta, 0.0, math.pi / 4))
        _require_finite("alpha", self.alpha)
        _require_finite("phi", self.phi)

    def values(self) -> tuple[float, float, float]:
        return (self.theta, self.alpha, self.phi)


@dataclass(frozen=True)
class CosetChart3:
    """Chart (theta1, theta2, alpha, phi, beta1, beta2, psi1, psi2) for a 3-level state."""

    theta1: float
    theta2: float
    alpha: float = 0.0
    phi: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    psi1: float = 0.0
    psi2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta1",
                           _require_range("theta1", self.theta1, 0.0, THETA1_MAX))
        object.__setattr__(self, "theta2",
                           _require_range("theta2", self.theta2, THETA2_MIN, THETA2_MAX))
        for name in ("alpha", "phi", "beta1", "beta2", "psi1", "psi2"):
            _require_finite(name, getattr(self, name))
        if self.beta >= BETA_MAX:
            raise OutOfChartRange(
                "beta", self.beta, f"hypot(beta1, beta2) must be < {BETA_MAX:.10g}"
            )

    @property
    def beta(self) -> float:
        return math.hypot(self.beta1, self.beta2)

    def values(self) -> tuple[float, ...]:
        return (self.theta1, self.theta2, self.alpha, self.phi,
                self.beta1, self.beta2, self.psi1, self.psi2)


class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix with cached spectral data.

    Hermiticity and trace are checked at construction (tolerance 1e-10);
    positivity is checked whenever the spectral decomposition is computed.
    """

    HERM_TOL = 1e-10
    TRACE_TOL = 1e-10
    EIG_TOL = 1e-10

    def __init__(self, mat, *, check: bool = True):
        self.mat = matcore.as_matrix(mat)
        self._spectral: Optional[matcore.SpectralDecomposition] = None
        if check:
            defect = matcore.hermiticity_defect(self.mat)
            if defect > self.HERM_TOL:
                raise InvalidDensityMatrix(
                    f"not Hermitian: max |A - A^dag| = {defect:.3e} > {self.HERM_TOL:.1e}"
                )
            tr = matcore.trace(self.mat)
            if abs(tr - 1.0) > self.TRACE_TOL:
                raise InvalidDensityMatrix(
                    f"trace {tr!r} differs from 1 by more than {self.TRACE_TOL:.1e}"
                )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def spectral(self) -> matcore.SpectralDecomposition:
        if self._spectral is None:
            spec = matcore.eig_hermitian(self.mat)
            if spec.eigenvalues[0] < -self.EIG_TOL:
                raise InvalidDensityMatrix(
                    f"not PSD: min eigenvalue {spec.eigenvalues[0]:.3e} < -{self.EIG_TOL:.1e}"
                )
            self._spectral = spec
        return self._spectral

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectral.eigenvalues

    def validate_full(self) -> None:
        """Force all invariant checks, including positivity."""
        _ = self.spectral


def as_density(rho) -> DensityMatrix:
    """Coerce an ndarray (or pass through a DensityMatrix), validating invariants."""
    if isinstance(rho, DensityMatrix):
        return rho
    dm = DensityMatrix(rho)
    dm.validate_full()
    return dm


# ---------------------------------------------------------------------------
# small-argument helpers for the coset blocks
# ---------------------------------------------------------------------------

def sinc(x: float) -> float:
    """sin(x)/x with series fallback near 0."""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def cosm1_over_sq(x: float) -> float:
    """(cos(x) - 1)/x^2 with series fallback near 0."""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return -0.5 + x2 / 24.0 - x2 * x2 / 720.0
    return (math.cos(x) - 1.0) / (x * x)


def one_minus_sinc(x: float) -> float:
    """1 - sin(x)/x, accurate near 0."""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return x2 / 6.0 - x2 * x2 / 120.0
    return 1.0 - math.sin(x) / x


def sin_half_over(x: float) -> float:
    """sin(x/2)/x with series fallback near 0."""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return 0.5 - x2 / 48.0 + x2 * x2 / 3840.0
    return math.sin(0.5 * x) / x


# ---------------------------------------------------------------------------
# coset representatives
# ---------------------------------------------------------------------------

def omega2(chart: CosetChart2) -> np.ndarray:
    """2x2 coset representative [[cos a, e^{i phi} sin a], [-e^{-i phi} sin a, cos a]]."""
    ca, sa = math.cos(chart.alpha), math.sin(chart.alpha)
    ph = np.exp(1j * chart.phi)
    return np.array([[ca, ph * sa], [-np.conj(ph) * sa, ca]], dtype=np.complex128)


@dataclass(frozen=True)
class CosetBlockSpec:
    """One coset block: ambient dimension n, block index k in 2..n, and the
    complex (k-1)-vector B parameterizing the SU(k)/U(k-1) factor."""

    n: int
    k: int
    B: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.complex128))

    def __post_init__(self):
        object.__setattr__(self, "B", np.asarray(self.B, dtype=np.complex128).reshape(-1))
        if not (2 <= self.k <= self.n):
            raise DimensionMismatch(f"block index k={self.k} must lie in 2..n={self.n}")
        if len(self.B) != self.k - 1:
            raise DimensionMismatch(
                f"B must have k-1={self.k - 1} entries, got {len(self.B)}"
            )


def omega_block(spec: CosetBlockSpec) -> np.ndarray:
    """n x n unitary equal to the identity outside the leading k x k block.

    The leading block realizes SU(k)/U(k-1):

        [[cos sqrt(B B†),          B sinc(|B|)],
         [-sinc(|B|) B†,           cos |B|    ]]

    where B B† is rank one, so cos sqrt(B B†) = I + (cos|B| - 1) B B† / |B|^2.
    B = 0 is handled by the sinc(0) = 1 limit.
    """
    n, k, b = spec.n, spec.k, spec.B
    mat = np.eye(n, dtype=np.complex128)
    babs = float(np.linalg.norm(b))
    cfac = cosm1_over_sq(babs)          # (cos|B| - 1)/|B|^2
    sfac = sinc(babs)                   # sin|B|/|B|
    top = np.eye(k - 1, dtype=np.complex128) + cfac * np.outer(b, b.conj())
    mat[: k - 1, : k - 1] = top
    mat[: k - 1, k - 1] = b * sfac
    mat[k - 1, : k - 1] = -sfac * b.conj()
    mat[k - 1, k - 1] = math.cos(babs)
    return mat


def omega3_upper(beta1: float, beta2: float, psi1: float, psi2: float) -> np.ndarray:
    """The 3x3 block moving the third level: omega_block with
    B = (beta1 e^{i psi1}, beta2 e^{i psi2})."""
    b = np.array(
        [beta1 * np.exp(1j * psi1), beta2 * np.exp(1j * psi2)], dtype=np.complex128
    )
    return omega_block(CosetBlockSpec(n=3, k=3, B=b))


def omega3_lower(alpha: float, phi: float) -> np.ndarray:
    """The 3x3 block mixing levels 1 and 2: omega_block with B = (alpha e^{i phi},)."""
    b = np.array([alpha * np.exp(1j * phi)], dtype=np.complex128)
    return omega_block(CosetBlockSpec(n=3, k=2, B=b))


def omega3(chart: CosetChart3) -> np.ndarray:
    """Full coset representative for n=3: the k=3 block times the k=2 block."""
    return omega3_upper(chart.beta1, chart.beta2, chart.psi1, chart.psi2) @ omega3_lower(
        chart.alpha, chart.phi
    )


# ---------------------------------------------------------------------------
# diagonal factors and assembled states
# ---------------------------------------------------------------------------

def diag2(theta: float) -> DensityMatrix:
    """diag(cos^2 theta, sin^2 theta) for theta in [0, pi/4]."""
    t = _require_range("theta", theta, 0.0, math.pi / 4)
    c2 = math.cos(t) ** 2
    return DensityMatrix(np.diag([c2, 1.0 - c2]).astype(np.complex128), check=False)


def diag3(theta1: float, theta2: float) -> DensityMatrix:
    """diag(cos^2 t1, sin^2 t1 cos^2 t2, sin^2 t1 sin^2 t2); trace is 1 identically."""
    t1 = _require_range("theta1", theta1, 0.0, THETA1_MAX)
    t2 = _require_range("theta2", theta2, THETA2_MIN, THETA2_MAX)
    s1sq = math.sin(t1) ** 2
    lam = [1.0 - s1sq, s1sq * math.cos(t2) ** 2, s1sq * math.sin(t2) ** 2]
    return DensityMatrix(np.diag(lam).astype(np.complex128), check=False)


def diag_entries3(theta1: float, theta2: float) -> tuple[float, float, float]:
    """The three diagonal eigenvalues of diag3 without building the matrix."""
    s1sq = math.sin(theta1) ** 2
    return (1.0 - s1sq, s1sq * math.cos(theta2) ** 2, s1sq * math.sin(theta2) ** 2)


def rho2(chart: CosetChart2) -> DensityMatrix:
    """rho = Omega D Omega† on the 2-level chart."""
    om = omega2(chart)
    d = diag2(chart.theta).mat
    mat = om @ d @ om.conj().T
    return DensityMatrix(matcore.hermitize(mat), check=False)


def rho3(chart: CosetChart3) -> DensityMatrix:
    """rho = Omega D Omega† on the 3-level chart."""
    om = omega3(chart)
    d = diag3(chart.theta1, chart.theta2).mat
    mat = om @ d @ om.conj().T
    return DensityMatrix(matcore.hermitize(mat), check=False)


# ---------------------------------------------------------------------------
# permutation identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PermutationIdentity:
    """One coset-parameter setting realizing a permutation of the levels.

    ``omega`` is the computed coset product; ``exact`` the frozen matrix it
    equals entrywise. The products equal ``phase * perm`` only modulo
    right-multiplication by diagonal phases (the torus stabilizer):
    ``residual_coset`` measures that statement, ``residual_literal`` the
    literal one (nonzero for every non-identity entry).
    """

    name: str
    settings: dict
    perm: np.ndarray
    phase: complex
    omega: np.ndarray
    exact: np.ndarray
    residual_exact: float
    residual_coset: float
    residual_literal: float


def _perm_matrix(sigma: Sequence[int]) -> np.ndarray:
    """Permutation matrix with column j supported on row sigma[j] (P e_j = e_sigma(j))."""
    p = np.zeros((3, 3))
    for j, i in enumerate(sigma):
        p[i, j] = 1.0
    return p


_I = 1j
_PERM_CASES = [
    # (name, settings, sigma as images of (0,1,2), phase, exact matrix)
    ("(Id)", dict(), (0, 1, 2), 1.0,
     np.eye(3, dtype=np.complex128)),
    ("i(12)", dict(alpha=math.pi / 2, phi=math.pi / 2), (1, 0, 2), _I,
     np.array([[0, _I, 0], [_I, 0, 0], [0, 0, 1]], dtype=np.complex128)),
    ("i(13)", dict(beta1=math.pi / 2, psi1=math.pi / 2), (2, 1, 0), _I,
     np.array([[0, 0, _I], [0, 1, 0], [_I, 0, 0]], dtype=np.complex128)),
    ("i(23)", dict(beta2=math.pi / 2, psi2=math.pi / 2), (0, 2, 1), _I,
     np.array([[1, 0, 0], [0, 0, _I], [0, _I, 0]], dtype=np.complex128)),
    ("i(123)", dict(beta1=math.pi / 2, psi1=math.pi / 2,
                    alpha=math.pi / 2, phi=math.pi / 2), (1, 2, 0), _I,
     np.array([[0, 0, _I], [_I, 0, 0], [0, -1, 0]], dtype=np.complex128)),
    ("i(321)", dict(beta2=math.pi / 2, psi2=math.pi / 2,
                    alpha=math.pi / 2, phi=math.pi / 2), (2, 0, 1), _I,
     np.array([[0, _I, 0], [0, 0, _I], [-1, 0, 0]], dtype=np.complex128)),
]

PERM_VERIFY_TOL = 1e-12


def permutation_table() -> list[PermutationIdentity]:
    """The six coset-parameter settings realizing the level permutations.

    Each entry is verified at construction: the coset product must equal the
    frozen ``exact`` matrix entrywise, and must equal ``phase * perm`` after
    absorbing per-column (torus) phases, both to 1e-12. A failure signals an
    implementation bug and raises VerificationFailure.
    """
    out = []
    for name, settings, sigma, phase, exact in _PERM_CASES:
        upper = omega3_upper(settings.get("beta1", 0.0), settings.get("beta2", 0.0),
                             settings.get("psi1", 0.0), settings.get("psi2", 0.0))
        lower = omega3_lower(settings.get("alpha", 0.0), settings.get("phi", 0.0))
        om = upper @ lower
        perm = _perm_matrix(sigma)
        res_exact = float(np.max(np.abs(om - exact)))
        target = phase * perm
        # R = target† Omega must be a diagonal unitary if Omega ~ target mod torus
        r = target.conj().T @ om
        off = r - np.diag(np.diag(r))
        res_coset = float(
            max(np.max(np.abs(off)), np.max(np.abs(np.abs(np.diag(r)) - 1.0)))
        )
        res_literal = float(np.max(np.abs(om - target)))
        if res_exact > PERM_VERIFY_TOL or res_coset > PERM_VERIFY_TOL:
            raise VerificationFailure(
                f"permutation identity {name} failed: exact residual {res_exact:.3e}, "
                f"coset residual {res_coset:.3e}"
            )
        out.append(PermutationIdentity(
            name=name, settings=dict(settings), perm=perm, phase=phase, omega=om,
            exact=exact, residual_exact=res_exact, residual_coset=res_coset,
            residual_literal=res_literal,
        ))
    return out
