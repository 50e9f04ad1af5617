import math

import numpy as np
import pytest

from buresgeo import coset
from buresgeo.coset import CosetChart2, CosetChart3
from buresgeo.errors import DegenerateSpectrum, OutOfChartRange
from buresgeo.recover import find_chart, find_chart2, find_chart3
from buresgeo.sampling import make_rng, random_chart2, random_chart3, random_unitary


def test_find_chart2_diagonal_example():
    chart, res = find_chart2(np.diag([0.75, 0.25]).astype(complex))
    assert chart.theta == pytest.approx(math.pi / 6, abs=1e-12)
    # alpha must be 0 mod pi (the state is already diagonal)
    assert min(abs(chart.alpha % math.pi), math.pi - (chart.alpha % math.pi)) <= 1e-9
    assert res <= 1e-10


def test_find_chart2_round_trip():
    rng = make_rng(0)
    for _ in range(50):
        ch = random_chart2(rng)
        rho = coset.rho2(ch)
        rec, res = find_chart2(rho)
        assert res <= 1e-8
        assert np.linalg.norm(coset.rho2(rec).mat - rho.mat) <= 1e-8


def test_find_chart3_round_trip():
    rng = make_rng(1)
    for _ in range(50):
        ch = random_chart3(rng)
        rho = coset.rho3(ch)
        rec, res = find_chart3(rho)
        assert res <= 1e-8
        assert np.linalg.norm(coset.rho3(rec).mat - rho.mat) <= 1e-8


def test_find_chart3_rotated_diagonal():
    # states built outside the chart machinery, from a generic unitary
    rng = make_rng(2)
    for _ in range(20):
        lam = np.sort(rng.dirichlet([4, 4, 4]))[::-1]
        if min(np.diff(np.sort(lam))) < 1e-3 or lam[1] > 3 * lam[2] or lam[0] < 1 / 3:
            continue  # keep only chart-reachable, well-separated spectra
        u = random_unitary(rng, 3)
        rho = coset.DensityMatrix(u @ np.diag(lam).astype(complex) @ u.conj().T)
        rec, res = find_chart3(rho)
        assert res <= 1e-8
        assert np.linalg.norm(coset.rho3(rec).mat - rho.mat) <= 1e-8


def test_find_chart_degenerate_raises():
    with pytest.raises(DegenerateSpectrum):
        find_chart2(np.eye(2, dtype=complex) / 2)
    with pytest.raises(DegenerateSpectrum):
        find_chart3(np.eye(3, dtype=complex) / 3)


def test_find_chart3_unreachable_spectrum():
    # lambda2/lambda3 > 3 in every admissible ordering: outside the theta box
    with pytest.raises(OutOfChartRange):
        find_chart3(np.diag([0.5, 0.4, 0.1]).astype(complex))


def test_find_chart_dispatch():
    rng = make_rng(3)
    rho2 = coset.rho2(random_chart2(rng))
    chart, _ = find_chart(rho2)
    assert isinstance(chart, CosetChart2)
    rho3 = coset.rho3(random_chart3(rng))
    chart, _ = find_chart(rho3)
    assert isinstance(chart, CosetChart3)


def test_find_chart3_beta_canonicalized():
    # recovery maps into the beta <= pi/2 representative; same state either way
    ch = CosetChart3(0.6, 0.7, alpha=0.5, phi=0.4, beta1=2.0, beta2=1.2,
                     psi1=0.9, psi2=0.1)
    rho = coset.rho3(ch)
    rec, res = find_chart3(rho)
    assert res <= 1e-8
    assert rec.beta <= math.pi / 2 + 1e-9
