"""Seeded random charts, states, tangents and unitaries.

All randomness flows through numpy's PCG64 generator: a given 64-bit seed
produces the same sequence on every platform, which keeps the validation
sweeps and the acceptance suite reproducible bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np

from . import coset
from .coset import BETA_MAX, CosetChart2, CosetChart3, THETA1_MAX, THETA2_MAX, THETA2_MIN

DEFAULT_MARGIN = 0.05     # fraction of each bounded range kept clear of the boundary
DEFAULT_MIN_GAP = 1e-4    # rejection threshold on eigenvalue gaps


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for the given seed (same seed -> same sequence everywhere)."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def _shrunk(lo: float, hi: float, margin: float) -> tuple[float, float]:
    width = hi - lo
    return (lo + margin * width, hi - margin * width)


def random_chart2(rng: np.random.Generator, margin: float = DEFAULT_MARGIN) -> CosetChart2:
    """Uniform interior 2-level chart: theta in the shrunk range, angles in [0, 2pi)."""
    lo, hi = _shrunk(0.0, math.pi / 4, margin)
    return CosetChart2(
        theta=rng.uniform(lo, hi),
        alpha=rng.uniform(0.0, 2 * math.pi),
        phi=rng.uniform(0.0, 2 * math.pi),
    )


def random_chart3(rng: np.random.Generator, margin: float = DEFAULT_MARGIN,
                  min_gap: float = DEFAULT_MIN_GAP) -> CosetChart3:
    """Uniform interior 3-level chart.

    theta coordinates are uniform in their ranges shrunk by ``margin`` from
    each boundary, rejecting draws whose eigenvalue gaps fall below
    ``min_gap``. The beta pair is drawn as a uniform radius in the shrunk
    [0, pi) ball with a uniform direction; the remaining angles are uniform
    over one period.
    """
    t1lo, t1hi = _shrunk(0.0, THETA1_MAX, margin)
    t2lo, t2hi = _shrunk(THETA2_MIN, THETA2_MAX, margin)
    for _ in range(1000):
        t1 = rng.uniform(t1lo, t1hi)
        t2 = rng.uniform(t2lo, t2hi)
        lam = coset.diag_entries3(t1, t2)
        gaps = (abs(lam[0] - lam[1]), abs(lam[0] - lam[2]), abs(lam[1] - lam[2]))
        if min(gaps) >= min_gap and min(lam) >= min_gap:
            break
    else:  # pragma: no cover - margin makes rejection extremely rare
        raise RuntimeError("could not sample a nondegenerate spectrum in 1000 tries")
    beta = rng.uniform(margin * BETA_MAX, (1.0 - margin) * BETA_MAX)
    chi = rng.uniform(0.0, 2 * math.pi)
    return CosetChart3(
        theta1=t1, theta2=t2,
        alpha=rng.uniform(0.0, 2 * math.pi),
        phi=rng.uniform(0.0, 2 * math.pi),
        beta1=beta * math.cos(chi), beta2=beta * math.sin(chi),
        psi1=rng.uniform(0.0, 2 * math.pi),
        psi2=rng.uniform(0.0, 2 * math.pi),
    )


def random_density(rng: np.random.Generator, n: int,
                   margin: float = DEFAULT_MARGIN) -> coset.DensityMatrix:
    """Random interior state built through the chart of the right dimension."""
    if n == 2:
        return coset.rho2(random_chart2(rng, margin))
    if n == 3:
        return coset.rho3(random_chart3(rng, margin))
    raise ValueError(f"only n=2 and n=3 are charted, got n={n}")


def random_tangent(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random traceless Hermitian matrix with unit Frobenius norm."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (g + g.conj().T) / 2
    h -= np.trace(h).real / n * np.eye(n)
    return h / np.linalg.norm(h)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish unitary from a product of coset blocks and diagonal phases."""
    u = np.diag(np.exp(1j * rng.uniform(0.0, 2 * math.pi, size=n)))
    for k in range(2, n + 1):
        b = rng.normal(size=k - 1) + 1j * rng.normal(size=k - 1)
        norm = np.linalg.norm(b)
        if norm > 0:
            b = b / norm * rng.uniform(0.0, math.pi)
        u = coset.omega_block(coset.CosetBlockSpec(n=n, k=k, B=b)) @ u
    return u
