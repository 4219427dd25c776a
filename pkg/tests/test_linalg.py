"""Eigensolver and norm checks against hand-derived and cross-solver oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochavg.errors import DimensionMismatch, NonFinite, NotSymmetric
from stochavg.linalg import frobenius_norm, spectral_norm, sym_eigenvalues


def test_eigenvalues_2x2_hand_derived():
    # det([[2-t, -1], [-1, 2-t]]) = t^2 - 4t + 3 = (t-1)(t-3)
    eigs = sym_eigenvalues([[2.0, -1.0], [-1.0, 2.0]])
    assert eigs == pytest.approx([1.0, 3.0], abs=1e-12)


def test_eigenvalues_diagonal_sorted():
    eigs = sym_eigenvalues(np.diag([3.0, -1.0, 2.0]))
    assert eigs == pytest.approx([-1.0, 2.0, 3.0], abs=0.0)


def test_eigenvalues_identity():
    assert sym_eigenvalues(np.eye(4)) == pytest.approx(np.ones(4), abs=0.0)


def test_eigenvalues_1x1():
    assert sym_eigenvalues([[-7.5]]) == pytest.approx([-7.5])


def test_eigenvalues_match_lapack_on_fixed_matrices():
    """Cross-check the Jacobi sweep against an unrelated solver."""
    rng = np.random.default_rng(20240817)
    for n in (2, 3, 5, 8, 13):
        b = rng.normal(size=(n, n))
        a = b + b.T
        got = sym_eigenvalues(a, tol=1e-12)
        want = np.linalg.eigvalsh(a)
        assert got == pytest.approx(want, abs=1e-9 * max(1.0, abs(want).max()))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-10, max_value=10, allow_nan=False),
        min_size=6,
        max_size=6,
    )
)
def test_eigenvalues_3x3_match_power_sums(vals):
    """For 3x3, the first three power sums pin down the spectrum."""
    a, b, c, d, e, f = vals
    m = np.array([[a, b, c], [b, d, e], [c, e, f]])
    eigs = sym_eigenvalues(m, tol=1e-13)
    scale = max(1.0, float(np.abs(m).max())) ** 3
    assert np.sum(eigs) == pytest.approx(np.trace(m), abs=1e-9 * scale)
    assert np.sum(eigs**2) == pytest.approx(np.trace(m @ m), abs=1e-9 * scale)
    assert np.sum(eigs**3) == pytest.approx(
        np.trace(m @ m @ m), abs=1e-8 * scale
    )


def test_eigenvalues_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        sym_eigenvalues([[0.0, 1.0], [0.0, 0.0]])


def test_eigenvalues_accepts_asymmetry_within_tol():
    eigs = sym_eigenvalues([[2.0, -1.0], [-1.0 + 1e-13, 2.0]])
    assert eigs == pytest.approx([1.0, 3.0], abs=1e-10)


def test_eigenvalues_rejects_nonfinite():
    with pytest.raises(NonFinite):
        sym_eigenvalues([[np.nan, 0.0], [0.0, 1.0]])


def test_eigenvalues_rejects_nonsquare():
    with pytest.raises(DimensionMismatch):
        sym_eigenvalues(np.zeros((2, 3)))


def test_spectral_norm_nilpotent():
    # [[0,1],[0,0]] has singular values {1, 0}.
    assert spectral_norm([[0.0, 1.0], [0.0, 0.0]]) == pytest.approx(1.0)


def test_spectral_norm_symmetric_is_spectral_radius():
    m = np.array([[2.0, -1.0], [-1.0, 2.0]])
    assert spectral_norm(m) == pytest.approx(3.0, abs=1e-10)


def test_spectral_norm_zero():
    assert spectral_norm(np.zeros((3, 3))) == 0.0


def test_spectral_norm_matches_lapack():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(6, 6))
    assert spectral_norm(m) == pytest.approx(
        np.linalg.norm(m, 2), rel=1e-9
    )


def test_frobenius_hand_derived():
    # sqrt(1 + 4 + 4 + 16) = 5
    assert frobenius_norm([[1.0, 2.0], [2.0, 4.0]]) == pytest.approx(5.0)


def test_frobenius_dominates_spectral():
    rng = np.random.default_rng(99)
    for _ in range(5):
        m = rng.normal(size=(4, 4))
        assert spectral_norm(m) <= frobenius_norm(m) + 1e-12
