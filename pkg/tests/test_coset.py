import math

import numpy as np
import pytest

from buresgeo import coset
from buresgeo.coset import (
    CosetBlockSpec,
    CosetChart2,
    CosetChart3,
    THETA1_MAX,
    diag2,
    diag3,
    omega2,
    omega3,
    omega_block,
    permutation_table,
    rho2,
    rho3,
)
from buresgeo.errors import DimensionMismatch, InvalidDensityMatrix, OutOfChartRange
from buresgeo.sampling import make_rng, random_chart2, random_chart3


def omega3_upper_printed(b1, b2, p1, p2):
    """Independent oracle: the 3x3 upper coset block written out entrywise."""
    beta = math.hypot(b1, b2)
    cb, sb = math.cos(beta), math.sin(beta)
    e1, e2 = np.exp(1j * p1), np.exp(1j * p2)
    return np.array([
        [1 + (b1 ** 2 / beta ** 2) * (cb - 1),
         (b1 * b2 / beta ** 2) * np.exp(1j * (p1 - p2)) * (cb - 1),
         (b1 / beta) * e1 * sb],
        [(b1 * b2 / beta ** 2) * np.exp(-1j * (p1 - p2)) * (cb - 1),
         1 + (b2 ** 2 / beta ** 2) * (cb - 1),
         (b2 / beta) * e2 * sb],
        [-(b1 / beta) * np.conj(e1) * sb,
         -(b2 / beta) * np.conj(e2) * sb,
         cb]], dtype=complex)


# ---------------------------------------------------------------------------
# 2-level pieces
# ---------------------------------------------------------------------------

def test_omega2_identity_at_alpha_zero():
    np.testing.assert_allclose(omega2(CosetChart2(0.1, 0.0, 0.7)), np.eye(2), atol=1e-15)


def test_omega2_transposition_up_to_phase():
    om = omega2(CosetChart2(0.1, math.pi / 2, math.pi / 2))
    np.testing.assert_allclose(om, np.array([[0, 1j], [1j, 0]]), atol=1e-15)


def test_omega2_direct_trig():
    om = omega2(CosetChart2(0.1, math.pi / 3, 0.0))
    expected = np.array([[0.5, math.sqrt(3) / 2], [-math.sqrt(3) / 2, 0.5]])
    np.testing.assert_allclose(om, expected, atol=1e-15)


def test_omega2_unitary_random():
    rng = make_rng(2)
    for _ in range(200):
        om = omega2(random_chart2(rng))
        np.testing.assert_allclose(om.conj().T @ om, np.eye(2), atol=1e-12)


def test_diag2_examples():
    np.testing.assert_allclose(diag2(0.0).mat, np.diag([1.0, 0.0]), atol=1e-15)
    np.testing.assert_allclose(diag2(math.pi / 4).mat, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(diag2(math.pi / 6).mat, np.diag([0.75, 0.25]), atol=1e-15)


def test_diag2_range_error():
    with pytest.raises(OutOfChartRange):
        diag2(1.0)


def test_rho2_maximally_mixed_fixed_point():
    for alpha, phi in [(0.3, 1.2), (2.0, -0.4)]:
        r = rho2(CosetChart2(math.pi / 4, alpha, phi))
        np.testing.assert_allclose(r.mat, np.eye(2) / 2, atol=1e-14)


def test_rho2_pure_state():
    np.testing.assert_allclose(rho2(CosetChart2(0.0, 0.0, 0.0)).mat,
                               np.diag([1.0, 0.0]), atol=1e-15)


def test_rho2_explicit_substitution():
    r = rho2(CosetChart2(0.0, math.pi / 4, 0.0))
    np.testing.assert_allclose(r.mat, np.array([[0.5, -0.5], [-0.5, 0.5]]), atol=1e-14)


def test_rho2_entry_formulas_random():
    # diagonal: sin^2 a sin^2 t + cos^2 a cos^2 t etc.;
    # off-diagonal: -(1/2) e^{i phi} sin 2a cos 2t
    rng = make_rng(3)
    for _ in range(100):
        ch = random_chart2(rng)
        r = rho2(ch).mat
        st, ct = math.sin(ch.theta), math.cos(ch.theta)
        sa, ca = math.sin(ch.alpha), math.cos(ch.alpha)
        d1 = sa ** 2 * st ** 2 + ca ** 2 * ct ** 2
        d2 = sa ** 2 * ct ** 2 + ca ** 2 * st ** 2
        off = -0.5 * np.exp(1j * ch.phi) * math.sin(2 * ch.alpha) * math.cos(2 * ch.theta)
        np.testing.assert_allclose(r[0, 0], d1, atol=1e-13)
        np.testing.assert_allclose(r[1, 1], d2, atol=1e-13)
        np.testing.assert_allclose(r[0, 1], off, atol=1e-13)


# ---------------------------------------------------------------------------
# generic coset blocks
# ---------------------------------------------------------------------------

def test_omega_block_zero_is_identity():
    spec = CosetBlockSpec(n=4, k=3, B=np.zeros(2, dtype=complex))
    np.testing.assert_allclose(omega_block(spec), np.eye(4), atol=1e-15)


def test_omega_block_matches_printed_display():
    rng = make_rng(4)
    for _ in range(1000):
        beta = rng.uniform(1e-3, math.pi - 1e-3)
        chi = rng.uniform(0, 2 * math.pi)
        b1, b2 = beta * math.cos(chi), beta * math.sin(chi)
        p1, p2 = rng.uniform(0, 2 * math.pi, size=2)
        got = coset.omega3_upper(b1, b2, p1, p2)
        np.testing.assert_allclose(got, omega3_upper_printed(b1, b2, p1, p2), atol=1e-12)


def test_omega_block_scalar_reduces_to_omega2():
    rng = make_rng(5)
    for _ in range(100):
        alpha, phi = rng.uniform(0, 2 * math.pi, size=2)
        block = omega_block(CosetBlockSpec(n=2, k=2, B=[alpha * np.exp(1j * phi)]))
        np.testing.assert_allclose(block, omega2(CosetChart2(0.1, alpha, phi)),
                                   atol=1e-12)


def test_omega_block_unitary_various_sizes():
    rng = make_rng(6)
    for n in (2, 3, 4, 5):
        for k in range(2, n + 1):
            b = rng.normal(size=k - 1) + 1j * rng.normal(size=k - 1)
            om = omega_block(CosetBlockSpec(n=n, k=k, B=b))
            np.testing.assert_allclose(om.conj().T @ om, np.eye(n), atol=1e-12)


def test_omega_block_bad_spec():
    with pytest.raises(DimensionMismatch):
        CosetBlockSpec(n=3, k=5, B=np.zeros(4, dtype=complex))
    with pytest.raises(DimensionMismatch):
        CosetBlockSpec(n=3, k=3, B=np.zeros(1, dtype=complex))


def test_omega_block_tiny_beta_series_branch():
    # cross-check the series branch against the trig branch just above the cutoff
    for scale in (1e-7, 1e-5, 9.9e-5, 1.1e-4, 1e-3):
        b = scale * np.array([0.6, 0.8j])
        om = omega_block(CosetBlockSpec(n=3, k=3, B=b))
        np.testing.assert_allclose(om.conj().T @ om, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(om, omega3_upper_printed(
            scale * 0.6, scale * 0.8, 0.0, math.pi / 2), atol=1e-13)


# ---------------------------------------------------------------------------
# 3-level pieces
# ---------------------------------------------------------------------------

def test_omega3_identity():
    ch = CosetChart3(0.2, math.pi / 5)
    np.testing.assert_allclose(omega3(ch), np.eye(3), atol=1e-15)


def test_omega3_unitary_random():
    rng = make_rng(7)
    for _ in range(200):
        om = omega3(random_chart3(rng))
        np.testing.assert_allclose(om.conj().T @ om, np.eye(3), atol=1e-12)


def test_diag3_examples():
    np.testing.assert_allclose(diag3(0.0, math.pi / 6).mat, np.diag([1.0, 0, 0]),
                               atol=1e-15)
    np.testing.assert_allclose(diag3(THETA1_MAX, math.pi / 4).mat,
                               np.eye(3) / 3, atol=1e-15)
    np.testing.assert_allclose(diag3(math.pi / 4, math.pi / 4).mat,
                               np.diag([0.5, 0.25, 0.25]), atol=1e-15)


def test_diag3_trace_exact():
    rng = make_rng(8)
    for _ in range(100):
        t1 = rng.uniform(0, THETA1_MAX)
        t2 = rng.uniform(math.pi / 6, math.pi / 4)
        assert abs(np.trace(diag3(t1, t2).mat).real - 1.0) <= 1e-15


def test_diag3_range_errors():
    with pytest.raises(OutOfChartRange):
        diag3(1.2, math.pi / 5)
    with pytest.raises(OutOfChartRange):
        diag3(0.3, 0.1)


def test_rho3_reduces_to_diag_at_zero_coset():
    ch = CosetChart3(0.5, 0.6)
    np.testing.assert_allclose(rho3(ch).mat, diag3(0.5, 0.6).mat, atol=1e-15)


def test_rho3_maximally_mixed_invariant():
    rng = make_rng(9)
    for _ in range(20):
        ch = random_chart3(rng)
        mixed = CosetChart3(THETA1_MAX, math.pi / 4, ch.alpha, ch.phi,
                            ch.beta1, ch.beta2, ch.psi1, ch.psi2)
        np.testing.assert_allclose(rho3(mixed).mat, np.eye(3) / 3, atol=1e-13)


def test_rho3_spectrum_preserved():
    rng = make_rng(10)
    for _ in range(200):
        ch = random_chart3(rng)
        r = rho3(ch)
        expected = np.sort(coset.diag_entries3(ch.theta1, ch.theta2))
        np.testing.assert_allclose(np.sort(r.eigenvalues), expected, atol=1e-10)


def test_produced_states_trace_hermitian_tight():
    rng = make_rng(12)
    for _ in range(200):
        r2 = rho2(random_chart2(rng)).mat
        r3 = rho3(random_chart3(rng)).mat
        for r in (r2, r3):
            assert abs(np.trace(r).real - 1.0) <= 1e-12
            assert np.max(np.abs(r - r.conj().T)) <= 1e-12


def test_chart3_beta_range():
    with pytest.raises(OutOfChartRange):
        CosetChart3(0.3, 0.6, beta1=3.0, beta2=1.5)  # hypot > pi


def test_chart_rejects_nonfinite():
    with pytest.raises(OutOfChartRange):
        CosetChart2(0.2, float("nan"), 0.0)


def test_density_matrix_invariant_errors():
    with pytest.raises(InvalidDensityMatrix):
        coset.as_density(np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex))  # not Hermitian
    with pytest.raises(InvalidDensityMatrix):
        coset.as_density(np.diag([0.9, 0.9]).astype(complex))  # trace 1.8
    with pytest.raises(InvalidDensityMatrix):
        coset.as_density(np.diag([1.5, -0.5]).astype(complex))  # not PSD


# ---------------------------------------------------------------------------
# permutation identities
# ---------------------------------------------------------------------------

def test_permutation_table_has_six_verified_entries():
    table = permutation_table()
    assert len(table) == 6
    for entry in table:
        assert entry.residual_exact <= 1e-12
        assert entry.residual_coset <= 1e-12


def test_permutation_identity_entry():
    table = permutation_table()
    first = table[0]
    assert first.name == "(Id)"
    assert first.phase == 1.0
    assert first.residual_literal <= 1e-15
    np.testing.assert_allclose(first.omega, np.eye(3), atol=1e-15)


def test_permutation_cycles_match_patterns():
    table = {p.name: p for p in permutation_table()}
    p123 = table["i(123)"]
    # the 3-cycle sends level 1 -> 2 -> 3 -> 1
    np.testing.assert_allclose(p123.perm, np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))
    assert p123.phase == 1j
    # the product realizes the cycle exactly modulo torus phases
    r = (p123.phase * p123.perm).conj().T @ p123.omega
    np.testing.assert_allclose(r - np.diag(np.diag(r)), np.zeros((3, 3)), atol=1e-14)
    np.testing.assert_allclose(np.abs(np.diag(r)), np.ones(3), atol=1e-14)
    p321 = table["i(321)"]
    np.testing.assert_allclose(p321.perm, np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]]))


def test_permutations_act_on_diagonals():
    # the meaningful content: Omega D Omega† permutes the diagonal entries
    d = np.diag([0.5, 0.3, 0.2]).astype(complex)
    for entry in permutation_table():
        conj = entry.omega @ d @ entry.omega.conj().T
        expected = entry.perm @ d @ entry.perm.T
        np.testing.assert_allclose(conj, expected, atol=1e-13)


def test_unitarity_mass_random():
    # chart unitarity at scale: 10^4 random charts across both dimensions
    rng = make_rng(14)
    for _ in range(5000):
        om = omega2(random_chart2(rng))
        assert np.linalg.norm(om.conj().T @ om - np.eye(2)) <= 1e-12
    for _ in range(5000):
        om = omega3(random_chart3(rng))
        assert np.linalg.norm(om.conj().T @ om - np.eye(3)) <= 1e-12
