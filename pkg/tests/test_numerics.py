import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symabs.errors import NonFinite, NonSquare, NotSymmetric
from symabs.numerics import eig_extremes, nsd_check, spectral_norm


def eig2_closed_form(a, b, c):
    """Eigenvalues of [[a, b], [b, c]] from the characteristic polynomial."""
    mean = 0.5 * (a + c)
    disc = math.sqrt((0.5 * (a - c)) ** 2 + b * b)
    return mean - disc, mean + disc


def test_extremes_match_closed_form_2x2():
    cases = [
        (2.0, 1.0, 2.0),
        (0.1, 0.0, 0.8),
        (-3.0, 0.7, 5.0),
        (1e-6, 1e-6, 1e-6),
    ]
    for a, b, c in cases:
        lo, hi = eig2_closed_form(a, b, c)
        ext = eig_extremes([[a, b], [b, c]])
        assert ext.lambda_min == pytest.approx(lo, abs=1e-9)
        assert ext.lambda_max == pytest.approx(hi, abs=1e-9)


def test_extremes_1x1():
    ext = eig_extremes([[-4.25]])
    assert ext.lambda_min == -4.25
    assert ext.lambda_max == -4.25


def test_extremes_diagonal_exact():
    ext = eig_extremes(np.diag([0.1, 0.8, -2.0]))
    assert ext.lambda_min == pytest.approx(-2.0, abs=1e-12)
    assert ext.lambda_max == pytest.approx(0.8, abs=1e-12)


@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2**31 - 1))
def test_extremes_cross_check_against_lapack(n, seed):
    # numpy.linalg is the independent oracle here, nothing else in the
    # package calls it for eigenvalues.
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    sym = 0.5 * (m + m.T)
    ref = np.linalg.eigvalsh(sym)
    ext = eig_extremes(sym)
    scale = max(1.0, float(np.max(np.abs(ref))))
    assert abs(ext.lambda_min - ref[0]) <= 1e-8 * scale
    assert abs(ext.lambda_max - ref[-1]) <= 1e-8 * scale


def test_nsd_check_verdicts():
    assert nsd_check(np.diag([-1.0, -2.0])).holds
    assert nsd_check(np.zeros((2, 2))).holds
    # within-tolerance positive part still counts as holding
    assert nsd_check(np.diag([1e-12, -1.0])).holds
    verdict = nsd_check(np.diag([1.0, -1.0]))
    assert not verdict.holds
    assert verdict.lambda_max == pytest.approx(1.0, abs=1e-9)


def test_nsd_check_respects_tol_argument():
    m = np.diag([5e-4, -1.0])
    assert not nsd_check(m).holds
    assert nsd_check(m, tol=1e-3).holds


def test_spectral_norm_values():
    assert spectral_norm(np.diag([3.0, 4.0])) == pytest.approx(4.0, abs=1e-9)
    # wide matrix: norm of a single row is its Euclidean length
    assert spectral_norm([[1.0, 2.0, 3.0]]) == pytest.approx(math.sqrt(14.0), abs=1e-9)
    assert spectral_norm(np.zeros((2, 3))) == 0.0


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_spectral_norm_transpose_symmetry(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(2, 5))
    a = spectral_norm(m)
    b = spectral_norm(m.T)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_spectral_norm_bounds_matvec(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(3, 3))
    x = rng.normal(size=3)
    bound = spectral_norm(m) * np.linalg.norm(x)
    assert np.linalg.norm(m @ x) <= bound * (1.0 + 1e-9) + 1e-12


def test_rejects_non_square():
    with pytest.raises(NonSquare):
        eig_extremes(np.zeros((2, 3)))
    with pytest.raises(NonSquare):
        eig_extremes(np.zeros((0, 0)))
    with pytest.raises(NonSquare):
        eig_extremes(np.zeros(3))


def test_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        eig_extremes([[0.0, 1.0], [0.0, 0.0]])


def test_rejects_non_finite():
    with pytest.raises(NonFinite):
        eig_extremes([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(NonFinite):
        spectral_norm([[np.inf, 0.0]])
