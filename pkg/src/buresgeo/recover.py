"""Recover chart coordinates from a density matrix.

Eigenvalues fix the theta coordinates directly (after choosing the
permutation that lands in the chart's eigenvalue box); the coset
coordinates are then fitted by minimizing || Omega(chart) D Omega† - rho ||_F.
The fit is seeded analytically from the eigenvector phases and polished
with a least-squares pass; random multistart is the fallback. The reached
residual is always returned alongside the chart.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import least_squares

from . import coset
from .coset import CosetChart2, CosetChart3, DensityMatrix, THETA1_MAX, THETA2_MAX, THETA2_MIN
from .errors import DegenerateSpectrum, FitFailure, OutOfChartRange

GAP_TOL = 1e-6
TARGET_RESIDUAL = 1e-8
FAIL_RESIDUAL = 1e-6
MULTISTART = 8


def _spectral_sorted_desc(rho: DensityMatrix):
    spec = rho.spectral
    order = np.argsort(spec.eigenvalues)[::-1]
    w = spec.eigenvalues[order]
    v = spec.eigenvectors[:, order]
    gaps = np.abs(np.diff(w))
    if len(gaps) and float(np.min(gaps)) < GAP_TOL:
        raise DegenerateSpectrum(
            f"min eigenvalue gap {float(np.min(gaps)):.3e} < {GAP_TOL:.1e}; "
            "the chart coordinates are not identifiable"
        )
    return w, v


def _residual(rho_mat: np.ndarray, built: DensityMatrix) -> float:
    return float(np.linalg.norm(built.mat - rho_mat))


def find_chart2(rho) -> tuple[CosetChart2, float]:
    """Chart coordinates of a nondegenerate 2-level state, with fit residual."""
    dm = coset.as_density(rho)
    if dm.dim != 2:
        raise OutOfChartRange("n", dm.dim, "find_chart2 needs a 2x2 state")
    w, v = _spectral_sorted_desc(dm)
    theta = math.acos(min(math.sqrt(max(w[0], 0.0)), 1.0))
    # eigenvector column 1 carries (cos a, -e^{-i phi} sin a) up to a phase
    alpha = math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 1]) > 1e-12 and abs(v[1, 1]) > 1e-12:
        phi = float(np.angle(v[0, 1]) - np.angle(v[1, 1]))
    else:
        phi = 0.0
    chart = CosetChart2(theta=theta, alpha=alpha, phi=phi)
    res = _residual(dm.mat, coset.rho2(chart))
    if res > TARGET_RESIDUAL:
        chart, res = _polish2(dm, theta, (alpha, phi), res)
    if res > FAIL_RESIDUAL:
        raise FitFailure(f"residual {res:.3e} > {FAIL_RESIDUAL:.1e} after multistart")
    return chart, res


def _polish2(dm: DensityMatrix, theta: float, seed_params, seed_res: float):
    def objective(p):
        built = coset.rho2(CosetChart2(theta, p[0], p[1]))
        diff = built.mat - dm.mat
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    best_chart = CosetChart2(theta, *seed_params)
    best_res = seed_res
    rng = np.random.default_rng(20)
    starts = [np.asarray(seed_params, dtype=float)]
    starts += [rng.uniform(0, 2 * math.pi, size=2) for _ in range(MULTISTART)]
    for p0 in starts:
        sol = least_squares(objective, p0, method="lm", xtol=1e-15, ftol=1e-15)
        chart = CosetChart2(theta, *sol.x)
        res = _residual(dm.mat, coset.rho2(chart))
        if res < best_res:
            best_chart, best_res = chart, res
        if best_res <= TARGET_RESIDUAL:
            break
    return best_chart, best_res


_THETA_EPS = 1e-12


def _theta3_from_spectrum(w_triple) -> tuple[float, float]:
    l1, l2, l3 = w_triple
    theta1 = math.acos(min(math.sqrt(max(l1, 0.0)), 1.0))
    theta2 = math.atan2(math.sqrt(max(l3, 0.0)), math.sqrt(max(l2, 0.0)))
    return theta1, theta2


def _assign_permutation3(w_desc: np.ndarray):
    """Pick the eigenvalue ordering that satisfies the chart's theta box.

    Tries the permutations of the (descending) spectrum in a fixed order and
    returns the first whose recovered (theta1, theta2) lie in range. Some
    perfectly valid spectra admit none (the box covers only part of the
    eigenvalue simplex sector); those raise OutOfChartRange.
    """
    for perm in itertools.permutations(range(3)):
        trip = tuple(float(w_desc[p]) for p in perm)
        t1, t2 = _theta3_from_spectrum(trip)
        if (-_THETA_EPS <= t1 <= THETA1_MAX + _THETA_EPS
                and THETA2_MIN - _THETA_EPS <= t2 <= THETA2_MAX + _THETA_EPS):
            t1 = min(max(t1, 0.0), THETA1_MAX)
            t2 = min(max(t2, THETA2_MIN), THETA2_MAX)
            return perm, t1, t2
    raise OutOfChartRange(
        "spectrum", tuple(float(x) for x in w_desc),
        "no eigenvalue ordering fits the chart box "
        "(needs lambda1 >= 1/3 and lambda2/lambda3 in [1, 3])"
    )


def _coset_params_from_eigvecs(v: np.ndarray):
    """Analytic coset parameters from an eigenvector matrix (column phases free)."""
    # third column of Omega is (n1 e^{i psi1} sin b, n2 e^{i psi2} sin b, cos b)
    col3 = v[:, 2].copy()
    if abs(col3[2]) > 1e-15:
        col3 = col3 * np.exp(-1j * np.angle(col3[2]))
    cb = min(max(float(col3[2].real), -1.0), 1.0)
    beta = math.acos(cb)
    sb = math.sin(beta)
    if sb > 1e-9:
        b1 = beta * abs(col3[0]) / sb
        b2 = beta * abs(col3[1]) / sb
        psi1 = float(np.angle(col3[0])) if abs(col3[0]) > 1e-12 else 0.0
        psi2 = float(np.angle(col3[1])) if abs(col3[1]) > 1e-12 else 0.0
    else:
        b1 = b2 = psi1 = psi2 = 0.0
    upper = coset.omega3_upper(b1, b2, psi1, psi2)
    m = upper.conj().T @ v   # should be Omega2 times a diagonal phase
    alpha = math.atan2(abs(m[1, 0]), abs(m[0, 0]))
    if abs(m[0, 1]) > 1e-12 and abs(m[1, 1]) > 1e-12:
        phi = float(np.angle(m[0, 1]) - np.angle(m[1, 1]))
    else:
        phi = 0.0
    return alpha, phi, b1, b2, psi1, psi2


def find_chart3(rho) -> tuple[CosetChart3, float]:
    """Chart coordinates of a nondegenerate 3-level state, with fit residual.

    theta1, theta2 come from the eigenvalues; the six coset coordinates from
    an analytically seeded least-squares fit of Omega(chart) D Omega† to rho.
    """
    dm = coset.as_density(rho)
    if dm.dim != 3:
        raise OutOfChartRange("n", dm.dim, "find_chart3 needs a 3x3 state")
    w_desc, v_desc = _spectral_sorted_desc(dm)
    perm, theta1, theta2 = _assign_permutation3(w_desc)
    v = v_desc[:, list(perm)]
    seed = _coset_params_from_eigvecs(v)
    chart = CosetChart3(theta1, theta2, *seed)
    res = _residual(dm.mat, coset.rho3(chart))
    if res > TARGET_RESIDUAL:
        chart, res = _polish3(dm, theta1, theta2, seed, res)
    if res > FAIL_RESIDUAL:
        raise FitFailure(f"residual {res:.3e} > {FAIL_RESIDUAL:.1e} after multistart")
    return chart, res


def _clip_beta(p):
    """Map an unconstrained 6-vector into a valid coset parameter tuple."""
    alpha, phi, b1, b2, psi1, psi2 = (float(x) for x in p)
    beta = math.hypot(b1, b2)
    if beta >= coset.BETA_MAX:
        scalefac = (coset.BETA_MAX - 1e-9) / beta
        b1, b2 = b1 * scalefac, b2 * scalefac
    return alpha, phi, b1, b2, psi1, psi2


def _polish3(dm: DensityMatrix, theta1: float, theta2: float, seed, seed_res: float):
    def objective(p):
        built = coset.rho3(CosetChart3(theta1, theta2, *_clip_beta(p)))
        diff = built.mat - dm.mat
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    best_chart = CosetChart3(theta1, theta2, *seed)
    best_res = seed_res
    rng = np.random.default_rng(21)
    starts = [np.asarray(seed, dtype=float)]
    for _ in range(MULTISTART):
        beta = rng.uniform(0.0, 0.95 * math.pi)
        chi = rng.uniform(0.0, 2 * math.pi)
        starts.append(np.array([
            rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi),
            beta * math.cos(chi), beta * math.sin(chi),
            rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)]))
    for p0 in starts:
        sol = least_squares(objective, p0, method="lm", xtol=1e-15, ftol=1e-15)
        chart = CosetChart3(theta1, theta2, *_clip_beta(sol.x))
        res = _residual(dm.mat, coset.rho3(chart))
        if res < best_res:
            best_chart, best_res = chart, res
        if best_res <= TARGET_RESIDUAL:
            break
    return best_chart, best_res


def find_chart(rho, n: int | None = None):
    """Dispatch on dimension: returns (chart, residual)."""
    dm = coset.as_density(rho)
    dim = dm.dim if n is None else n
    if dim == 2:
        return find_chart2(dm)
    if dim == 3:
        return find_chart3(dm)
    raise OutOfChartRange("n", dim, "only n=2 and n=3 are charted")
