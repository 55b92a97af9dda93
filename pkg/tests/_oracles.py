"""Spectral cross-checks shared by the unit and acceptance tests."""
import numpy as np

from rhsing.indices import ConstraintProfile
from rhsing.laurent import LaurentPoly, SymbolMatrix
from rhsing.scalar import pair_symbol
from rhsing.spaces import BoundaryFunction, ConstrainedFunction, random_rm_element
from rhsing.spectral import assemble, solve_ls


def scalar_residual(r: int, m: int, core: LaurentPoly, dg: int) -> float:
    """Least-squares residual of ``2 Re[zeta**-r f] = (1-zeta)**m core``."""
    G = SymbolMatrix([[LaurentPoly.monomial(r)]])
    sysm = assemble(G, ConstraintProfile.uniform(1, m), dg)
    return solve_ls(sysm, [ConstrainedFunction(m, BoundaryFunction.exact(core))]).residual


def pair_residual(r1: int, r2: int, m: int, cores, dg: int = 32) -> float:
    G = pair_symbol(r1, r2).circle_conjugate()
    sysm = assemble(G, ConstraintProfile(((2, m),)), dg)
    rhs = [ConstrainedFunction(m, BoundaryFunction.exact(c)) for c in cores]
    return solve_ls(sysm, rhs).residual


def random_pair_cores(m: int, rng: np.random.Generator, degree: int = 4):
    return tuple(random_rm_element(m, degree, rng) for _ in range(2))
