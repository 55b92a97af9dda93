import numpy as np
import pytest

from rhsing.catalog import (
    example_factorization, example_g, example_gtilde, example_profile, random_triangular_symbol,
)
from rhsing.errors import BlockStructureError, CircleSingularError, FactorizationError, ShapeError
from rhsing.indices import (
    ConstraintProfile, FactorizationData, ScanConfig, classify, jet_matrix, kernel_basis_from_factorization,
    maslov_index, nullity_scan, partial_indices, rh_apply, scan_range, toeplitz_nullity, verify_factorization,
    well_definedness_violations,
)
from rhsing.laurent import I, LaurentPoly, SymbolMatrix, ZETA, winding_number
from rhsing.spectral import kernel_dimension

Z = LaurentPoly.monomial


def test_profile_parse_and_layout():
    p = ConstraintProfile.parse("1:0,2:2,1:0")
    assert p == example_profile()
    assert p.size == 4
    assert p.column_orders() == [0, 2, 2, 0]
    assert [list(r) for r in p.ranges()] == [[0], [1, 2], [3]]
    assert str(p) == "1:0,2:2,1:0"
    with pytest.raises(ValueError):
        ConstraintProfile.parse("1:-1")
    with pytest.raises(ValueError):
        ConstraintProfile.parse("two")


@pytest.mark.parametrize("G, k", [
    (SymbolMatrix.identity(3), 0),
    (SymbolMatrix([[ZETA]]), 2),
    (example_gtilde(), 6),
    (example_g(), 6),
])
def test_maslov(G, k):
    assert maslov_index(G) == k


def test_maslov_rejects_circle_singular():
    with pytest.raises(CircleSingularError):
        maslov_index(SymbolMatrix([[1 - ZETA]]))


@pytest.mark.parametrize("G, kappas", [
    (SymbolMatrix.identity(3), [0, 0, 0]),
    (SymbolMatrix.diag([1, ZETA]), [0, 2]),
    (SymbolMatrix([[ZETA]]), [2]),
    (SymbolMatrix.diag([Z(-1), Z(2, I)]), [-2, 4]),
    (example_gtilde(), [0, 1, 1, 4]),
    (example_g(), [1, 1, 2, 2]),
])
def test_partial_indices(G, kappas):
    assert partial_indices(G) == kappas


def test_scan_second_differences_sum_to_size():
    scan = nullity_scan(example_gtilde())
    assert scan.second_difference_sum == 4
    assert scan.counts == {0: 1, 1: 2, 4: 1}
    assert scan.min_gap > 1e3
    lo, hi = scan_range(example_gtilde())
    assert lo <= 0 and hi >= 4


def test_toeplitz_nullity_of_monomial():
    # G = (zeta) has the single index 2, so d(j) = max(j - 2, 0)
    G = SymbolMatrix([[ZETA]])
    for j in range(-1, 6):
        assert toeplitz_nullity(G, j)[0] == max(j - 2, 0)


def test_verify_factorization_examples():
    assert verify_factorization(example_gtilde(), example_factorization())[0]
    iI = FactorizationData(SymbolMatrix.identity(2).scale(I), (0, 0))
    assert verify_factorization(SymbolMatrix.identity(2), iI)[0]
    bad = FactorizationData(example_factorization().Theta, (0, 1, 1, 3))
    ok, defect = verify_factorization(example_gtilde(), bad)
    assert not ok and defect > 0


def test_classify_example():
    rep = classify(example_gtilde(), example_profile())
    assert rep.partial_indices == [0, 1, 1, 4]
    assert rep.maslov == 6 and rep.onto and rep.kernel_dim == 6 and rep.jet_order == 4
    assert rep.diagnostics["well_defined"]


def test_classify_full_example_reports_block_formula_and_flags_well_definedness():
    rep = classify(example_g(), example_profile())
    assert rep.block_indices == [[0], [1, 1], [4]]
    assert rep.kernel_dim == 6
    assert not rep.diagnostics["well_defined"]
    bad = {(v["row"], v["col"]) for v in rep.diagnostics["well_defined_violations"]}
    assert bad == {(1, 3), (2, 3)}  # zero-based


def test_well_definedness_violations_empty_for_block_diagonal():
    assert well_definedness_violations(example_gtilde(), example_profile()) == []


def test_classify_identity_and_not_onto():
    rep = classify(SymbolMatrix.identity(3), ConstraintProfile.uniform(3, 0))
    assert rep.onto and rep.kernel_dim == 3
    rep = classify(SymbolMatrix([[1]]), ConstraintProfile.uniform(1, 2))
    assert not rep.onto and rep.kernel_dim == "not-applicable"


def test_classify_errors():
    with pytest.raises(ShapeError):
        classify(SymbolMatrix.identity(2), ConstraintProfile.uniform(3))
    lower = SymbolMatrix([[1, 0], [ZETA, 1]])
    with pytest.raises(BlockStructureError):
        classify(lower, ConstraintProfile.parse("1:0,1:1"))


def test_kernel_basis_identity():
    basis = kernel_basis_from_factorization(
        SymbolMatrix.identity(2), FactorizationData(SymbolMatrix.identity(2).scale(I), (0, 0)),
        ConstraintProfile.uniform(2))
    assert basis == [SymbolMatrix([[I], [0]]), SymbolMatrix([[0], [I]])]


def test_kernel_basis_monomial_symbol():
    G = SymbolMatrix([[ZETA]])
    basis = kernel_basis_from_factorization(G, FactorizationData(SymbolMatrix([[I]]), (2,)),
                                            ConstraintProfile.uniform(1))
    assert len(basis) == 3
    assert all(rh_apply(G, f) == SymbolMatrix([[0]]) for f in basis)


def test_kernel_basis_example_is_exact():
    G = example_gtilde()
    basis = kernel_basis_from_factorization(G, example_factorization(), example_profile())
    assert len(basis) == 6
    zero = SymbolMatrix([[0]] * 4)
    assert all(rh_apply(G, f) == zero for f in basis)
    _, rank = jet_matrix(basis, 4)
    assert rank == 6


def test_kernel_basis_rejects_bad_factorization():
    bad = FactorizationData(example_factorization().Theta, (0, 1, 1, 3))
    with pytest.raises(FactorizationError):
        kernel_basis_from_factorization(example_gtilde(), bad, example_profile())


def test_jet_examples():
    basis = [SymbolMatrix([[I], [0]]), SymbolMatrix([[0], [I]])]
    assert jet_matrix(basis, 0)[1] == 2
    scalar = [SymbolMatrix([[1 - ZETA]]), SymbolMatrix([[(1 + ZETA).scale(I)]])]
    assert jet_matrix(scalar, 1)[1] == 2
    assert jet_matrix(scalar, 0)[1] == 1
    numeric = [np.array([[1, -1]]), np.array([[1j, 1j]])]
    assert jet_matrix(numeric, 1)[1] == 2


@pytest.mark.parametrize("seed", range(6))
def test_random_symbols_match_spectral_oracle(seed):
    """``sum max(k + 1, 0)`` is the kernel dimension on the unconstrained space."""
    rng = np.random.default_rng(seed)
    G = random_triangular_symbol(rng, int(rng.integers(1, 4)))
    kappas = partial_indices(G)
    assert sum(kappas) == 2 * winding_number(G.det())
    res = kernel_dimension(G, ConstraintProfile.uniform(G.n_rows), dgs=(96, 128), output="raw")
    assert res["stable"]
    assert set(res["dims"].values()) == {sum(max(k + 1, 0) for k in kappas)}


def test_scan_config_threshold_is_used():
    scan = nullity_scan(SymbolMatrix.identity(2), ScanConfig(rel_tol=1e-6))
    assert scan.counts == {0: 2}
