import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhsing.errors import SymmetryError
from rhsing.laurent import I, LaurentPoly, QI, ZETA
from rhsing.spaces import (
    AliasingWarning, BoundaryFunction, ConstrainedFunction, fft_reconstruct, fft_sample, grid, random_rm_element,
    rm_check, rm_odd_unfold, rm_shift, szego_projection, tau_m, tau_m_inverse, tau_m_of,
)

W = LaurentPoly.one_minus_zeta
ONE_MINUS_INV = LaurentPoly({0: 1, -1: -1})


@pytest.mark.parametrize("v, m, expected", [
    (ONE_MINUS_INV, 1, True),
    (LaurentPoly.constant(1), 0, True),
    (ZETA, 0, False),
    (LaurentPoly.monomial(-1), 2, True),
    (LaurentPoly.monomial(-1, I), 1, False),
])
def test_rm_check_examples(v, m, expected):
    assert rm_check(v, m) is expected


def test_rm_check_on_samples():
    v = BoundaryFunction.exact(ONE_MINUS_INV)
    assert rm_check(fft_sample(v, 6), 1)
    assert not rm_check(fft_sample(v, 6), 0)


def test_tau_examples():
    assert tau_m_of(LaurentPoly({-1: -1, 0: 2, 1: -1}), 1).laurent == ONE_MINUS_INV
    p = LaurentPoly({-1: 3, 0: 1, 1: 3})
    assert tau_m_of(p, 0).laurent == p
    with pytest.raises(SymmetryError):
        tau_m_inverse(ZETA, 0)


def test_rm_shift_examples():
    assert rm_shift(LaurentPoly.monomial(-1), 2).laurent == LaurentPoly.constant(1)
    p = LaurentPoly({-1: 2, 0: 5, 1: 2})
    assert rm_shift(p, 0).laurent == p
    assert rm_shift(ONE_MINUS_INV, 1).laurent == ONE_MINUS_INV
    with pytest.raises(SymmetryError):
        rm_shift(ZETA, 0)


def test_odd_unfold_example():
    u = rm_odd_unfold(ONE_MINUS_INV, 1)
    z = grid(64)
    np.testing.assert_allclose(u.values(64), -2 * z.imag, atol=1e-12)
    assert rm_odd_unfold(LaurentPoly(), 1).laurent.is_zero()
    with pytest.raises(SymmetryError):
        rm_odd_unfold(LaurentPoly.monomial(-1, I), 1)
    with pytest.raises(ValueError):
        rm_odd_unfold(LaurentPoly.constant(1), 0)


def test_szego_examples():
    assert szego_projection(LaurentPoly({-1: 1, 0: 2, 1: 1})).laurent == LaurentPoly({0: 2, 1: 1})
    p = LaurentPoly({0: 1, 3: I})
    assert szego_projection(p).laurent == p
    assert szego_projection(ONE_MINUS_INV).laurent == LaurentPoly.constant(1)


def test_szego_is_idempotent_on_samples():
    v = fft_sample(LaurentPoly({-2: 1, 0: 2, 3: I}), 5)
    once = szego_projection(v)
    twice = szego_projection(once)
    np.testing.assert_allclose(once.values(32), twice.values(32), atol=1e-13)


def test_fft_round_trip():
    c = fft_reconstruct(fft_sample(LaurentPoly.monomial(3), 4))
    assert set(c) == {3} and abs(c[3] - 1) < 1e-14


def test_fft_geometric_decay():
    z = grid(64)
    v = BoundaryFunction.sampled(1 / (2 + z))
    c = fft_reconstruct(v)
    for k in range(10):
        assert abs(c[k] - (-1) ** k / 2 ** (k + 1)) < 1e-12


def test_fft_aliasing_detected():
    with pytest.warns(AliasingWarning):
        fft_reconstruct(fft_sample(LaurentPoly.monomial(9), 3))


def test_constrained_full():
    phi = ConstrainedFunction(1, BoundaryFunction.exact(ONE_MINUS_INV))
    assert phi.full().laurent == W() * ONE_MINUS_INV
    assert tau_m(phi).laurent == ONE_MINUS_INV


def test_constrained_rejects_non_rm_core():
    with pytest.raises(SymmetryError):
        ConstrainedFunction(0, BoundaryFunction.exact(ZETA))


@given(st.integers(0, 5), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_random_elements_lie_in_rm(m, degree, seed):
    v = random_rm_element(m, degree, np.random.default_rng(seed))
    assert rm_check(v, m)
    full = (W(m) * v)(grid(32))
    assert np.max(np.abs(full.imag)) < 1e-9


@given(st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_tau_round_trip(m, seed):
    v = random_rm_element(m, 3, np.random.default_rng(seed))
    phi = tau_m_inverse(v, m)
    assert tau_m(phi).laurent == v
    assert tau_m_of(W(m) * v, m).laurent == v


@given(st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_shift_lands_in_r0_or_r1(m, seed):
    v = random_rm_element(m, 3, np.random.default_rng(seed))
    assert rm_check(rm_shift(v, m), m % 2)


@given(st.integers(0, 2).map(lambda k: 2 * k + 1), st.integers(0, 2**32 - 1))
def test_odd_unfold_is_real_and_odd(m, seed):
    v = random_rm_element(m, 3, np.random.default_rng(seed))
    u = rm_odd_unfold(v, m).values(128)
    assert np.max(np.abs(u.imag)) < 1e-10
    np.testing.assert_allclose(u[64:], -u[:64], atol=1e-10)


def test_sampled_and_exact_agree():
    p = LaurentPoly({-2: QI(1, 1), 1: 3})
    np.testing.assert_allclose(fft_sample(p, 5).values(32), BoundaryFunction.exact(p).values(32), atol=1e-13)


def test_no_warning_for_band_limited():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fft_reconstruct(fft_sample(LaurentPoly({-3: 1, 3: 1}), 4))
