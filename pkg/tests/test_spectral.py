import numpy as np
import pytest

from _oracles import scalar_residual
from rhsing.catalog import example_factorization, example_g, example_gtilde, example_profile
from rhsing.errors import ShapeError
from rhsing.indices import ConstraintProfile, kernel_basis_from_factorization
from rhsing.laurent import LaurentPoly, SymbolMatrix, ZETA
from rhsing.scalar import scalar_kernel_dim, scalar_witness
from rhsing.spaces import BoundaryFunction, ConstrainedFunction, fft_sample, random_rm_element
from rhsing.spectral import (
    BandwidthError, IllSeparatedWarning, assemble, assemble_kernel_problem, exact_column_coeffs, numerical_kernel,
    rh_residual, solve_ls,
)


def _kdim(G, profile, dg=32):
    return numerical_kernel(assemble(G, profile, dg)).dim


def test_trivial_system():
    sysm = assemble(SymbolMatrix([[1]]), ConstraintProfile.uniform(1), 0)
    assert sysm.matrix.shape[1] == 2
    kr = numerical_kernel(sysm)
    assert kr.dim == 1
    # kernel direction is purely imaginary
    assert abs(kr.basis[0][0]) < 1e-12 and abs(kr.basis[0][1]) > 0.9


@pytest.mark.parametrize("G, profile, dim", [
    (SymbolMatrix([[ZETA]]), ConstraintProfile.uniform(1, 0), 3),
    (SymbolMatrix.identity(4), ConstraintProfile.uniform(4, 0), 4),
    (SymbolMatrix([[ZETA]]), ConstraintProfile.uniform(1, 2), 1),
    (example_gtilde(), example_profile(), 6),
])
def test_kernel_dimensions(G, profile, dim):
    assert _kdim(G, profile) == dim


def test_monomial_kernel_needs_small_truncation_only():
    assert _kdim(SymbolMatrix([[ZETA]]), ConstraintProfile.uniform(1, 0), 2) == 3


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("l, m", [(-1, 0), (2, 0), (3, 1), (5, 2), (4, 4)])
def test_kernel_problem_matches_formula(sign, l, m):
    assert numerical_kernel(assemble_kernel_problem(sign, l, m, 24)).dim == scalar_kernel_dim(l, m)


def test_scalar_solve_recovers_closed_form():
    phi = ConstrainedFunction(1, BoundaryFunction.exact(LaurentPoly({0: 1, -1: -1})))
    sysm = assemble(SymbolMatrix([[1]]), ConstraintProfile.uniform(1, 1), 16)
    sol = solve_ls(sysm, [phi])
    assert sol.residual < 1e-10
    expected = np.zeros(sol.functions.shape[1], dtype=complex)
    expected[:2] = [1, -1]
    np.testing.assert_allclose(sol.functions[0], expected, atol=1e-10)


def test_sampled_rhs_matches_exact_rhs():
    v = LaurentPoly({0: 1, -1: -1})
    sysm = assemble(SymbolMatrix([[1]]), ConstraintProfile.uniform(1, 1), 16)
    a = solve_ls(sysm, [ConstrainedFunction(1, BoundaryFunction.exact(v))])
    b = solve_ls(sysm, [ConstrainedFunction(1, fft_sample(v, 6))])
    np.testing.assert_allclose(a.functions, b.functions, atol=1e-10)


def test_example_random_rhs_is_solved():
    rng = np.random.default_rng(11)
    rhs = [ConstrainedFunction(m, BoundaryFunction.exact(random_rm_element(m, 4, rng)))
           for m in example_profile().column_orders()]
    sol = solve_ls(assemble(example_gtilde(), example_profile(), 32), rhs)
    assert sol.residual < 1e-8


@pytest.mark.parametrize("dg", [32, 64, 128])
def test_witness_is_not_solved(dg):
    assert scalar_residual(0, 2, scalar_witness(0, 2), dg) >= 0.05


def test_rhs_count_mismatch():
    sysm = assemble(SymbolMatrix.identity(2), ConstraintProfile.uniform(2), 4)
    with pytest.raises(ShapeError):
        solve_ls(sysm, [ConstrainedFunction(0, BoundaryFunction.exact(LaurentPoly.constant(1)))])


def test_bandwidth_violation():
    sysm = assemble(SymbolMatrix([[1]]), ConstraintProfile.uniform(1), 2, K=4)
    phi = ConstrainedFunction(0, BoundaryFunction.exact(LaurentPoly({-9: 1, 9: 1})))
    with pytest.raises(BandwidthError):
        solve_ls(sysm, [phi])


def test_ill_separated_warning():
    sysm = assemble(SymbolMatrix([[1]]), ConstraintProfile.uniform(1), 4)
    with pytest.warns(IllSeparatedWarning):
        numerical_kernel(sysm, rel_tol=0.9)


def test_full_example_uses_raw_output():
    sysm = assemble(example_g(), example_profile(), 16)
    assert not sysm.well_defined and sysm.notes


def test_exact_basis_residuals():
    G = example_gtilde()
    for f in kernel_basis_from_factorization(G, example_factorization(), example_profile()):
        assert rh_residual(G, exact_column_coeffs(f)) < 1e-12


def test_numerical_kernel_vectors_are_annihilated():
    sysm = assemble(example_gtilde(), example_profile(), 24)
    kr = numerical_kernel(sysm)
    for x in kr.basis:
        assert rh_residual(example_gtilde(), sysm.vector_to_functions(x)) < 1e-8
