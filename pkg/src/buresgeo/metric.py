"""Bures metric tensors over the 2- and 3-level coset charts.

Two independent routes are provided and cross-validated:

  * pullback_metric: numerical pullback of the spectral (Hubner) form
    through central finite differences of the chart map;
  * closed_metric2 / closed_metric3: the closed-form tensors.

The 3-level closed form is assembled from the trace-formula coefficients
t12, t13, t23 (one per eigenvalue pair) times polynomial factors in the
coset parameters. Two printed variants of the coefficient formulas that
circulate with this parameterization are kept alongside
(`t_coeffs_printed`, `t_coeffs_printed_generic`) purely so the validator
can report how far they drift from the coefficient the oracle demands;
see ValidationReport.
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import coset
from .bures import dittmann2_form, dittmann3_form, hubner_form
from .coset import (
    BETA_MAX,
    CosetChart2,
    CosetChart3,
    DensityMatrix,
    THETA1_MAX,
    THETA2_MAX,
    THETA2_MIN,
    diag_entries3,
    one_minus_sinc,
    sin_half_over,
    sinc,
)
from .errors import (
    BoundaryTooClose,
    DegenerateSpectrum,
    OutOfChartRange,
    SingularState,
    VerificationFailure,
)

COORDS2 = ("theta", "alpha", "phi")
COORDS3 = ("theta1", "theta2", "alpha", "phi", "beta1", "beta2", "psi1", "psi2")

DEFAULT_STEP = 1e-5
GAP_TOL = 1e-6          # minimum eigenvalue gap for pullback / closed-form points
EIG_FLOOR = 1e-6        # minimum eigenvalue for the closed-form coefficients


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric real tensor together with its coordinate ordering."""

    ordering: tuple[str, ...]
    g: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "g", arr)
        d = len(self.ordering)
        if arr.shape != (d, d):
            raise VerificationFailure(f"tensor shape {arr.shape} does not match ordering")
        if np.max(np.abs(arr - arr.T)) > 1e-10:
            raise VerificationFailure("tensor not symmetric to 1e-10")

    def entry(self, a: str, b: str) -> float:
        return float(self.g[self.ordering.index(a), self.ordering.index(b)])

    def entry_names(self) -> list[str]:
        names = []
        for i, a in enumerate(self.ordering):
            for j in range(i, len(self.ordering)):
                names.append(f"g_{a}_{self.ordering[j]}")
        return names


def volume_element(metric: MetricTensor) -> float:
    """sqrt(max(det g, 0)): the Bures measure density in chart coordinates."""
    return math.sqrt(max(float(np.linalg.det(metric.g)), 0.0))


# ---------------------------------------------------------------------------
# numerical pullback
# ---------------------------------------------------------------------------

def _central_diff(builder: Callable[[Sequence[float]], DensityMatrix],
                  point: np.ndarray, i: int, h: float) -> np.ndarray:
    up, dn = point.copy(), point.copy()
    up[i] += h
    dn[i] -= h
    return (builder(up).mat - builder(dn).mat) / (2.0 * h)


def pullback_metric(point: Sequence[float],
                    builder: Callable[[Sequence[float]], DensityMatrix],
                    coords: Sequence[str],
                    h: float = DEFAULT_STEP,
                    *,
                    richardson: bool = False,
                    gap_tol: float = GAP_TOL) -> MetricTensor:
    """Pull the spectral form back through an arbitrary chart map.

    g_ij = hubner_form(rho, d_i rho, d_j rho) with the tangents from central
    differences of step ``h`` (optionally Richardson-extrapolated with a
    second pass at h/2, for use near spectral degeneracies). The spectrum at
    the centre must be nondegenerate: min gap > ``gap_tol``.
    """
    pt = np.asarray(point, dtype=float)
    rho0 = builder(pt)
    w = rho0.eigenvalues
    gaps = np.diff(np.sort(w))
    if len(gaps) and float(np.min(gaps)) <= gap_tol:
        raise DegenerateSpectrum(
            f"min eigenvalue gap {float(np.min(gaps)):.3e} <= {gap_tol:.1e}"
        )
    d = len(pt)
    tangents = []
    for i in range(d):
        t = _central_diff(builder, pt, i, h)
        if richardson:
            t_half = _central_diff(builder, pt, i, h / 2.0)
            t = (4.0 * t_half - t) / 3.0
        tangents.append(t)
    g = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            g[i, j] = g[j, i] = hubner_form(rho0, tangents[i], tangents[j])
    return MetricTensor(ordering=tuple(coords), g=g)


def _check_margin(name: str, value: float, lo: float, hi: float, margin: float) -> None:
    if value - lo <= margin or hi - value <= margin:
        raise BoundaryTooClose(
            f"{name}={value!r} within {margin:.1e} of a range boundary"
        )


def pullback_metric2(chart: CosetChart2, h: float = DEFAULT_STEP,
                     *, richardson: bool = False) -> MetricTensor:
    """Numerical pullback tensor on the 2-level chart, ordering (theta, alpha, phi)."""
    _check_margin("theta", chart.theta, 0.0, math.pi / 4, 2 * h)
    builder = lambda v: coset.rho2(CosetChart2(*v))
    return pullback_metric(chart.values(), builder, COORDS2, h, richardson=richardson)


def pullback_metric3(chart: CosetChart3, h: float = DEFAULT_STEP,
                     *, richardson: bool = False) -> MetricTensor:
    """Numerical pullback tensor on the 3-level chart, ordering COORDS3."""
    _check_margin("theta1", chart.theta1, 0.0, THETA1_MAX, 2 * h)
    _check_margin("theta2", chart.theta2, THETA2_MIN, THETA2_MAX, 2 * h)
    if BETA_MAX - chart.beta <= 2 * h:
        raise BoundaryTooClose(f"beta={chart.beta!r} within {2 * h:.1e} of pi")
    builder = lambda v: coset.rho3(CosetChart3(*v))
    return pullback_metric(chart.values(), builder, COORDS3, h, richardson=richardson)


# ---------------------------------------------------------------------------
# 2-level closed form
# ---------------------------------------------------------------------------

def closed_metric2(chart: CosetChart2) -> MetricTensor:
    """diag(1, cos^2 2theta, (1/4) sin^2 2alpha cos^2 2theta), ordering (theta, alpha, phi).

    Requires theta strictly inside (0, pi/4): the endpoints are singular
    (pure state) or spectrally degenerate (maximally mixed).
    """
    if not (0.0 < chart.theta < math.pi / 4):
        raise OutOfChartRange("theta", chart.theta, "must lie strictly in (0, pi/4)")
    c2t = math.cos(2 * chart.theta) ** 2
    s2a = math.sin(2 * chart.alpha) ** 2
    g = np.diag([1.0, c2t, 0.25 * s2a * c2t])
    return MetricTensor(ordering=COORDS2, g=g)


@dataclass(frozen=True)
class SCoeff2:
    """Coset-sector coefficient of the 2-level trace formula."""

    s12: float


def s_coeff(d2) -> SCoeff2:
    """S12 = (1/|D|) (D11 - D22)^2 (D11 + D22 - D11 D22 - |D| - 1) for diagonal 2x2 D."""
    dm = d2 if isinstance(d2, DensityMatrix) else coset.as_density(d2)
    d11 = float(dm.mat[0, 0].real)
    d22 = float(dm.mat[1, 1].real)
    detd = d11 * d22
    if detd <= 1e-12:
        raise SingularState(f"|D| = {detd:.3e} <= 1e-12")
    s12 = (d11 - d22) ** 2 * (d11 + d22 - d11 * d22 - detd - 1.0) / detd
    return SCoeff2(s12=s12)


# ---------------------------------------------------------------------------
# 3-level coefficients
# ---------------------------------------------------------------------------

def _check_spectrum3(lam: tuple[float, float, float]) -> None:
    l1, l2, l3 = lam
    if min(lam) < EIG_FLOOR:
        raise DegenerateSpectrum(f"eigenvalue {min(lam):.3e} below {EIG_FLOOR:.1e}")
    for a, b in ((l1, l2), (l1, l3), (l2, l3)):
        if abs(a - b) < GAP_TOL:
            raise DegenerateSpectrum(f"eigenvalue gap {abs(a - b):.3e} below {GAP_TOL:.1e}")


def t_coeffs(theta1: float, theta2: float) -> tuple[float, float, float]:
    """Eigenvalue-pair coefficients (t12, t13, t23) of the 3-level trace formula.

    Evaluating the trace expression on a tangent that excites a single
    eigenvector pair (i, j) gives the coefficient

        t_ij = -(1/2) (li - lj)^2 [ 1 + 3 (1-li)(1-lj)(1+lk) / (1 - Tr D^3) ]

    which simplifies (sum of eigenvalues being 1) to -(li - lj)^2/(li + lj).
    All three are <= 0; the tensor entries carry the opposite sign.
    """
    lam = diag_entries3(theta1, theta2)
    _check_spectrum3(lam)
    t3 = sum(x ** 3 for x in lam)
    out = []
    for (i, j, k) in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        li, lj, lk = lam[i], lam[j], lam[k]
        out.append(-0.5 * (li - lj) ** 2
                   * (1.0 + 3.0 * (1.0 - li) * (1.0 - lj) * (1.0 + lk) / (1.0 - t3)))
    return tuple(out)


def t_coeffs_printed(theta1: float, theta2: float) -> tuple[float, float, float]:
    """The explicit theta-space coefficient formulas as printed.

    Kept only for the validator: these disagree with `t_coeffs` (and with the
    pullback oracle); the validation report carries the residuals.
    """
    c1s, s1s = math.cos(theta1) ** 2, math.sin(theta1) ** 2
    c2s, s2s = math.cos(theta2) ** 2, math.sin(theta2) ** 2
    t12 = -0.5 * (c1s - s1s * c2s) ** 2 * (
        3.0 + (1.0 - s1s * c2s) * (1.0 + c1s ** 2 * c2s ** 2)
        / (c1s ** 2 * c2s ** 2 * (c1s + s1s ** 2 * s2s * c2s))
    )
    t13 = -0.5 * (c1s - s1s * s2s) ** 2 * (
        3.0 + (1.0 - s1s * s2s) * (c2s + s1s * c1s ** 2 * s2s ** 2)
        / (s1s * c1s ** 2 * c2s ** 2 * (c1s + s1s ** 2 * s2s * c2s))
    )
    t23 = -0.5 * (
        s1s * c2s * (1.0 + 3.0 * s1s)
        + c1s / (s1s ** 3 * s2s ** 2 * c2s)
    )
    return (t12, t13, t23)


def t_coeffs_printed_generic(theta1: float, theta2: float) -> tuple[float, float, float]:
    """The printed eigenvalue-space coefficient display. Validator-only; see
    `t_coeffs_printed`."""
    lam = diag_entries3(theta1, theta2)
    t3 = sum(x ** 3 for x in lam)
    q = lam[0] * lam[1] * lam[2]
    out = []
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        li, lj = lam[i], lam[j]
        mi, mj = 1.0 / li, 1.0 / lj
        out.append(3.0 / (2.0 * (1.0 - t3)) * (
            (li - lj) ** 2 * (li + lj - li * lj - t3 - 2.0)
            + q * (mi - mj) ** 2 * (mi + mj - mi * mj - 1.0)
        ))
    return tuple(out)


@dataclass(frozen=True)
class Coeffs3:
    """Coset-sector auxiliaries of the 3-level closed form.

    gamma = phi - psi1 + psi2 is the only combination of the three free
    angles that enters the tensor. The identities u1+u2 = 1+cos(beta) and
    v1+v2 = 1+sinc(beta) are asserted at construction.
    """

    gamma: float
    u1: float
    u2: float
    v1: float
    v2: float
    w1: float
    w2: float
    x: float
    y: float
    t12: float = field(default=math.nan)
    t13: float = field(default=math.nan)
    t23: float = field(default=math.nan)


def aux_coeffs(beta1: float, beta2: float, phi: float,
               psi1: float, psi2: float) -> Coeffs3:
    """Auxiliary coset quantities gamma, u1..u2, v1..v2, w1..w2, x, y.

    For beta below 1e-4 the sinc-type factors are evaluated by series
    (through beta^4), so the beta -> 0 limits u=v=1, w=2, x=y=0 come out
    exactly rather than as 0/0.
    """
    beta = math.hypot(beta1, beta2)
    gamma = phi - psi1 + psi2
    if beta == 0.0:
        n1sq = n2sq = 0.5  # direction undefined at the origin; limits are isotropic
    else:
        n1sq = (beta1 / beta) ** 2
        n2sq = (beta2 / beta) ** 2
    cb = math.cos(beta)
    sc = sinc(beta)
    omc = -coset.cosm1_over_sq(beta) * beta * beta  # 1 - cos(beta), stable near 0
    oms = one_minus_sinc(beta)
    u1 = n1sq + n2sq * cb
    u2 = n2sq + n1sq * cb
    v1 = n1sq + n2sq * sc
    v2 = n2sq + n1sq * sc
    w1 = (1.0 + cb) + 2.0 * n1sq * omc
    w2 = (1.0 + cb) + 2.0 * n2sq * omc
    if beta == 0.0:
        x = y = 0.0
    else:
        x = (beta1 * beta2 / beta ** 2) * oms
        y = (beta1 * beta2 / beta ** 2) * omc
    if abs(u1 + u2 - (1.0 + cb)) > 1e-12:
        raise VerificationFailure("u1 + u2 != 1 + cos(beta)")
    if abs(v1 + v2 - (1.0 + sc)) > 1e-12:
        raise VerificationFailure("v1 + v2 != 1 + sinc(beta)")
    return Coeffs3(gamma=gamma, u1=u1, u2=u2, v1=v1, v2=v2, w1=w1, w2=w2, x=x, y=y)


# ---------------------------------------------------------------------------
# 3-level closed form
# ---------------------------------------------------------------------------

def _coset_block_entries(chart: CosetChart3,
                         t: tuple[float, float, float],
                         *,
                         entries: str) -> dict[tuple[str, str], float]:
    """The 6x6 coset-sector entries as closed-form expressions.

    ``entries="validated"`` evaluates the oracle-checked formulas.
    ``entries="printed"`` evaluates the circulated list verbatim; it differs
    in exactly one place: g_phi_beta1 (and its multiple g_phi_beta2) is
    missing a sin(gamma) factor there. The validator reports the difference.
    """
    if entries not in ("validated", "printed"):
        raise ValueError(f"unknown entry convention {entries!r}")
    t12, t13, t23 = t
    b1, b2 = chart.beta1, chart.beta2
    beta = chart.beta
    aux = aux_coeffs(b1, b2, chart.phi, chart.psi1, chart.psi2)
    u1, u2, v1, v2 = aux.u1, aux.u2, aux.v1, aux.v2
    w1, w2, x, y = aux.w1, aux.w2, aux.x, aux.y
    cg, sg = math.cos(aux.gamma), math.sin(aux.gamma)
    s2g = math.sin(2 * aux.gamma)
    sa, ca = math.sin(chart.alpha), math.cos(chart.alpha)
    s2a, c2a = math.sin(2 * chart.alpha), math.cos(2 * chart.alpha)
    s4a = math.sin(4 * chart.alpha)
    shb = sin_half_over(beta) ** 2        # (sin(beta/2)/beta)^2
    shb2 = shb * shb
    snb = sinc(beta)                      # sin(beta)/beta
    snb2 = snb * snb

    phi_b1_gamma = sg if entries == "validated" else 1.0

    e: dict[tuple[str, str], float] = {}
    e[("alpha", "alpha")] = -t12
    e[("alpha", "phi")] = 0.0
    e[("alpha", "beta1")] = 2.0 * t12 * b2 * cg * shb
    e[("alpha", "beta2")] = -2.0 * t12 * b1 * cg * shb
    e[("alpha", "psi1")] = 2.0 * t12 * b1 * b2 * u2 * sg * shb
    e[("alpha", "psi2")] = 2.0 * t12 * b1 * b2 * u1 * sg * shb
    e[("phi", "phi")] = -0.25 * t12 * s2a ** 2
    e[("phi", "beta1")] = -0.5 * t12 * b2 * s4a * phi_b1_gamma * shb
    e[("phi", "beta2")] = 0.5 * t12 * b1 * s4a * phi_b1_gamma * shb
    e[("phi", "psi1")] = (0.5 * t12 * b1 * s2a
                          * (b1 * w2 * s2a + 2.0 * b2 * u2 * c2a * cg) * shb)
    e[("phi", "psi2")] = (-0.5 * t12 * b2 * s2a
                          * (b2 * w1 * s2a - 2.0 * b1 * u1 * c2a * cg) * shb)
    e[("beta1", "beta1")] = (
        -4.0 * t12 * b2 ** 2 * (1.0 - s2a ** 2 * sg ** 2) * shb2
        - t13 * (x ** 2 * sa ** 2 + v1 ** 2 * ca ** 2 - x * v1 * s2a * cg)
        - t23 * (x ** 2 * ca ** 2 + v1 ** 2 * sa ** 2 + x * v1 * s2a * cg))
    e[("beta1", "beta2")] = (
        4.0 * t12 * b1 * b2 * (1.0 - s2a ** 2 * sg ** 2) * shb2
        - t13 * (x * (v1 * ca ** 2 + v2 * sa ** 2)
                 - 0.5 * (v1 * v2 + x ** 2) * s2a * cg)
        - t23 * (x * (v1 * sa ** 2 + v2 * ca ** 2)
                 + 0.5 * (v1 * v2 + x ** 2) * s2a * cg))
    e[("beta1", "psi1")] = (
        -t12 * b1 * b2 * (2.0 * b2 * u2 * s2a ** 2 * s2g - b1 * w2 * s4a * sg) * shb2
        + 0.5 * (t13 - t23) * b1 * s2a * sg * (u2 * x + v1 * y) * snb)
    e[("beta1", "psi2")] = (
        -t12 * b2 ** 2 * (2.0 * b1 * u1 * s2a ** 2 * s2g + b2 * w1 * s4a * sg) * shb2
        - 0.5 * (t13 - t23) * b2 * s2a * sg * (u1 * v1 + x * y) * snb)
    e[("beta2", "beta2")] = (
        -4.0 * t12 * b1 ** 2 * (1.0 - s2a ** 2 * sg ** 2) * shb2
        - t13 * (x ** 2 * ca ** 2 + v2 ** 2 * sa ** 2 - x * v2 * s2a * cg)
        - t23 * (x ** 2 * sa ** 2 + v2 ** 2 * ca ** 2 + x * v2 * s2a * cg))
    e[("beta2", "psi1")] = (
        t12 * b1 ** 2 * (2.0 * b2 * u2 * s2a ** 2 * s2g - b1 * w2 * s4a * sg) * shb2
        + 0.5 * (t13 - t23) * b1 * s2a * sg * (u2 * v2 + x * y) * snb)
    e[("beta2", "psi2")] = (
        t12 * b1 * b2 * (2.0 * b1 * u1 * s2a ** 2 * s2g + b2 * w1 * s4a * sg) * shb2
        - 0.5 * (t13 - t23) * b2 * s2a * sg * (u1 * x + v2 * y) * snb)
    e[("psi1", "psi1")] = (
        -t12 * b1 ** 2 * (4.0 * b2 ** 2 * u2 ** 2 * (1.0 - s2a ** 2 * cg ** 2)
                          + b1 ** 2 * w2 ** 2 * s2a ** 2
                          + 2.0 * b1 * b2 * u2 * w2 * s4a * cg) * shb2
        - t13 * b1 ** 2 * (u2 ** 2 * ca ** 2 + y ** 2 * sa ** 2
                           + u2 * y * s2a * cg) * snb2
        - t23 * b1 ** 2 * (u2 ** 2 * sa ** 2 + y ** 2 * ca ** 2
                           - u2 * y * s2a * cg) * snb2)
    e[("psi1", "psi2")] = (
        -t12 * b1 * b2 * (4.0 * b1 * b2 * u1 * u2 * (1.0 - s2a ** 2 * cg ** 2)
                          - b1 * b2 * w1 * w2 * s2a ** 2
                          - s4a * cg * (b2 ** 2 * u2 * w1 - b1 ** 2 * u1 * w2)) * shb2
        + t13 * b1 * b2 * (y * (u1 * sa ** 2 + u2 * ca ** 2)
                           + 0.5 * s2a * cg * (u1 * u2 + y ** 2)) * snb2
        + t23 * b1 * b2 * (y * (u1 * ca ** 2 + u2 * sa ** 2)
                           - 0.5 * s2a * cg * (u1 * u2 + y ** 2)) * snb2)
    e[("psi2", "psi2")] = (
        -t12 * b2 ** 2 * (4.0 * b1 ** 2 * u1 ** 2 * (1.0 - s2a ** 2 * cg ** 2)
                          + b2 ** 2 * w1 ** 2 * s2a ** 2
                          - 2.0 * b1 * b2 * u1 * w1 * s4a * cg) * shb2
        - t13 * b2 ** 2 * (u1 ** 2 * sa ** 2 + y ** 2 * ca ** 2
                           + u1 * y * s2a * cg) * snb2
        - t23 * b2 ** 2 * (u1 ** 2 * ca ** 2 + y ** 2 * sa ** 2
                           - u1 * y * s2a * cg) * snb2)
    return e


def closed_metric3(chart: CosetChart3, *, entries: str = "validated") -> MetricTensor:
    """Closed-form 8x8 tensor, ordering COORDS3.

    Structure: top-left block diag(1, sin^2 theta1) for the two eigenvalue
    coordinates, zero eigenvalue-coset cross blocks, and a full 6x6 coset
    block assembled from t_coeffs and aux_coeffs. Needs an interior point:
    distinct eigenvalues bounded away from 0 and beta strictly in (0, pi).
    """
    if not (0.0 < chart.beta < BETA_MAX):
        raise OutOfChartRange("beta", chart.beta, "must lie strictly in (0, pi)")
    t = t_coeffs(chart.theta1, chart.theta2)
    e = _coset_block_entries(chart, t, entries=entries)
    g = np.zeros((8, 8))
    g[0, 0] = 1.0
    g[1, 1] = math.sin(chart.theta1) ** 2
    idx = {name: k for k, name in enumerate(COORDS3)}
    for (a, b), val in e.items():
        g[idx[a], idx[b]] = g[idx[b], idx[a]] = val
    return MetricTensor(ordering=COORDS3, g=g)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

GAMMA_SHIFT_TOL = 1e-12


@dataclass
class ValidationReport:
    """Cross-validation of the metric routes at one chart point.

    Carries the pullback and closed tensors, their entrywise deviations,
    Dittmann-vs-Hubner residuals along the coordinate tangents, the
    gamma-shift invariance residual, and (n=3) the residuals of the printed
    coefficient/entry variants against the oracle-backed values.
    """

    n: int
    chart: dict
    ordering: tuple[str, ...]
    pullback: np.ndarray
    closed: np.ndarray
    entry_abs_dev: dict[str, float]
    max_abs_dev: float
    max_rel_dev: float
    dittmann_max_rel_dev: float
    dittmann_reading: str
    volume_pullback: float
    volume_closed: float
    volume_rel_dev: float
    gamma_shift_dev: float | None = None
    printed_entry_dev: dict[str, float] | None = None
    t_coeff_table: dict[str, dict[str, float]] | None = None
    s_coeff_relation_dev: float | None = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "chart": self.chart,
            "ordering": list(self.ordering),
            "pullback": self.pullback.tolist(),
            "closed": self.closed.tolist(),
            "entry_abs_dev": self.entry_abs_dev,
            "max_abs_dev": self.max_abs_dev,
            "max_rel_dev": self.max_rel_dev,
            "dittmann_max_rel_dev": self.dittmann_max_rel_dev,
            "dittmann_reading": self.dittmann_reading,
            "volume_pullback": self.volume_pullback,
            "volume_closed": self.volume_closed,
            "volume_rel_dev": self.volume_rel_dev,
        }
        if self.gamma_shift_dev is not None:
            out["gamma_shift_dev"] = self.gamma_shift_dev
        if self.printed_entry_dev is not None:
            out["printed_entry_dev"] = self.printed_entry_dev
        if self.t_coeff_table is not None:
            out["t_coeff_table"] = self.t_coeff_table
        if self.s_coeff_relation_dev is not None:
            out["s_coeff_relation_dev"] = self.s_coeff_relation_dev
        return out


def _entry_devs(ordering, a: np.ndarray, b: np.ndarray) -> dict[str, float]:
    out = {}
    d = len(ordering)
    for i in range(d):
        for j in range(i, d):
            out[f"g_{ordering[i]}_{ordering[j]}"] = abs(float(a[i, j] - b[i, j]))
    return out


def _coordinate_tangents(builder, point, h):
    pt = np.asarray(point, dtype=float)
    return [_central_diff(builder, pt, i, h) for i in range(len(pt))]


def validate(chart, h: float = DEFAULT_STEP) -> ValidationReport:
    """Full cross-validation at one interior chart point (n inferred from the chart)."""
    if isinstance(chart, CosetChart2):
        return _validate2(chart, h)
    if isinstance(chart, CosetChart3):
        return _validate3(chart, h)
    raise TypeError(f"expected CosetChart2 or CosetChart3, got {type(chart)!r}")


REL_DEV_FLOOR = 1e-8


def _rel_dev(a: np.ndarray, b: np.ndarray) -> float:
    """Max entrywise relative deviation over entries of non-negligible size.

    Entries below REL_DEV_FLOOR in both tensors (structural zeros plus
    finite-difference noise) are excluded; their disagreement is only
    meaningful in absolute terms.
    """
    scale = np.maximum(np.abs(a), np.abs(b))
    mask = scale >= REL_DEV_FLOOR
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(a - b)[mask] / scale[mask]))


def _validate2(chart: CosetChart2, h: float) -> ValidationReport:
    pull = pullback_metric2(chart, h)
    closed = closed_metric2(chart)
    rho = coset.rho2(chart)
    builder = lambda v: coset.rho2(CosetChart2(*v))
    tangents = _coordinate_tangents(builder, chart.values(), h)
    dmax = 0.0
    for t in tangents:
        nrm = float(np.linalg.norm(t))
        if nrm < 1e-12:
            continue
        t = t / nrm
        hub = hubner_form(rho, t, t)
        dit = dittmann2_form(rho, t)
        dmax = max(dmax, abs(dit - hub) / max(abs(hub), 1e-300))
    vol_p, vol_c = volume_element(pull), volume_element(closed)
    s12 = s_coeff(coset.diag2(chart.theta)).s12
    g_aa = closed.entry("alpha", "alpha")
    s_rel_dev = abs(-s12 - 2.0 * g_aa)
    dev = _entry_devs(COORDS2, pull.g, closed.g)
    return ValidationReport(
        n=2, chart={k: v for k, v in zip(COORDS2, chart.values())},
        ordering=COORDS2, pullback=pull.g, closed=closed.g,
        entry_abs_dev=dev, max_abs_dev=max(dev.values()),
        max_rel_dev=_rel_dev(pull.g, closed.g),
        dittmann_max_rel_dev=dmax, dittmann_reading="printed",
        volume_pullback=vol_p, volume_closed=vol_c,
        volume_rel_dev=abs(vol_p - vol_c) / max(vol_c, 1e-300),
        s_coeff_relation_dev=s_rel_dev,
    )


def _gamma_shift_dev(chart: CosetChart3, shifts=((0.37, 0.0), (0.0, -0.61))) -> float:
    """Max entry change of the closed tensor under gamma-preserving shifts
    (phi, psi1, psi2) -> (phi + a + b, psi1 + a, psi2 - b)."""
    base = closed_metric3(chart).g
    dev = 0.0
    for a, b in shifts:
        shifted = CosetChart3(
            chart.theta1, chart.theta2, chart.alpha, chart.phi + a + b,
            chart.beta1, chart.beta2, chart.psi1 + a, chart.psi2 - b)
        dev = max(dev, float(np.max(np.abs(closed_metric3(shifted).g - base))))
    return dev


def _validate3(chart: CosetChart3, h: float) -> ValidationReport:
    pull = pullback_metric3(chart, h)
    closed = closed_metric3(chart)
    printed = closed_metric3(chart, entries="printed")
    rho = coset.rho3(chart)
    builder = lambda v: coset.rho3(CosetChart3(*v))
    tangents = _coordinate_tangents(builder, chart.values(), h)
    dmax = 0.0
    for t in tangents:
        nrm = float(np.linalg.norm(t))
        if nrm < 1e-12:
            continue
        t = t / nrm
        hub = hubner_form(rho, t, t)
        dit = dittmann3_form(rho, t)
        dmax = max(dmax, abs(dit - hub) / max(abs(hub), 1e-300))
    vol_p, vol_c = volume_element(pull), volume_element(closed)
    tt = t_coeffs(chart.theta1, chart.theta2)
    tp = t_coeffs_printed(chart.theta1, chart.theta2)
    tg = t_coeffs_printed_generic(chart.theta1, chart.theta2)
    t_table = {
        name: {"trace_form": tt[k], "printed_theta_form": tp[k],
               "printed_eigenvalue_form": tg[k],
               "printed_theta_dev": abs(tp[k] - tt[k]),
               "printed_eigenvalue_dev": abs(tg[k] - tt[k])}
        for k, name in enumerate(("t12", "t13", "t23"))
    }
    dev = _entry_devs(COORDS3, pull.g, closed.g)
    return ValidationReport(
        n=3, chart={k: v for k, v in zip(COORDS3, chart.values())},
        ordering=COORDS3, pullback=pull.g, closed=closed.g,
        entry_abs_dev=dev, max_abs_dev=max(dev.values()),
        max_rel_dev=_rel_dev(pull.g, closed.g),
        dittmann_max_rel_dev=dmax, dittmann_reading="printed",
        volume_pullback=vol_p, volume_closed=vol_c,
        volume_rel_dev=abs(vol_p - vol_c) / max(vol_c, 1e-300),
        gamma_shift_dev=_gamma_shift_dev(chart),
        printed_entry_dev=_entry_devs(COORDS3, pull.g, printed.g),
        t_coeff_table=t_table,
    )
