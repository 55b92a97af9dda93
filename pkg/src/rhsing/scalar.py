"""One- and two-dimensional constrained Riemann-Hilbert problems.

Operator convention throughout: ``L(f) = 2 Re[zeta**(-r) f]`` acting on
``f = (1 - zeta)**m f'`` with ``f'`` holomorphic.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NotSurjectiveError, SymmetryError
from .laurent import I, LaurentPoly, QI, SymbolMatrix, ZETA
from .spaces import BoundaryFunction, ConstrainedFunction, rm_check, rm_shift, tau_m_of


@dataclass(frozen=True)
class ScalarProblem:
    """Either the twisted problem ``(r, m)`` or the kernel problem ``(sign, l, m)``."""

    m: int
    r: int | None = None
    sign: int | None = None
    l: int | None = None

    def __post_init__(self):
        twisted = self.r is not None
        kernel = self.sign is not None or self.l is not None
        if twisted == kernel:
            raise ValueError("exactly one of (r, m) or (sign, l, m) must be given")
        if kernel and (self.sign not in (1, -1) or self.l is None):
            raise ValueError("kernel problems need sign in {+1, -1} and l")


@dataclass(frozen=True)
class PairProblem:
    r1: int
    r2: int
    m: int


def scalar_kernel_dim(l: int, m: int) -> int:
    return max(l + 1 - m, 0)


def scalar_kernel_basis(sign: int, l: int, m: int) -> list[LaurentPoly]:
    """Real basis of ``{f in (1-zeta)**m A : f + sign * zeta**l conj(f) = 0}``.

    Writing ``f = (1-zeta)**m g`` turns the condition into
    ``g + s zeta**(l-m) conj(g) = 0`` with ``s = sign * (-1)**m``, i.e.
    ``g_k = -s conj(g_{l-m-k})``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    L = l - m
    if L < 0:
        return []
    s = sign * (-1) ** m
    w = LaurentPoly.one_minus_zeta(m)
    out = []
    for k in range(L // 2 + 1):
        partner = L - k
        if partner == k:
            # a = -s conj(a): real if -s = 1, imaginary otherwise
            gens = [QI(1)] if -s == 1 else [I]
        else:
            gens = [QI(1), I]
        for t in gens:
            g = {k: t} if partner == k else {k: t, partner: t.conj() * (-s)}
            out.append(w * LaurentPoly(g))
    return out


def scalar_onto(r: int, m: int) -> bool:
    return 2 * r - m >= -1


def pair_onto(r1: int, r2: int, m: int) -> bool:
    return 2 * r1 - m >= 0 and 2 * r2 - m >= 0


def scalar_witness(r: int, m: int) -> LaurentPoly:
    """Core ``v`` in R_m of a right-hand side ``(1-zeta)**m v`` outside the image.

    Only meaningful when ``2r - m < -1``.  Built from ``1 - 1/zeta`` in R_1 (odd m)
    or from ``(1 - zeta)(1 - 1/zeta)`` in R_0 (even m), shifted back by
    ``zeta**(-m//2)``.
    """
    u = LaurentPoly({0: 1, -1: -1})
    if m % 2 == 0:
        u = LaurentPoly({-1: -1, 0: 2, 1: -1})
    return u.shift(-(m // 2))


def solve_scalar(r: int, m: int, phi: ConstrainedFunction | BoundaryFunction | LaurentPoly) -> LaurentPoly:
    """Exact solution ``f in (1-zeta)**m A`` of ``2 Re[zeta**(-r) f] = phi``.

    ``phi`` may be given raw (a real function divisible by ``(1-zeta)**m``) or
    as a :class:`ConstrainedFunction`.
    """
    if not scalar_onto(r, m):
        raise NotSurjectiveError(
            f"not-surjective: 2r - m = {2 * r - m} < -1", witness=scalar_witness(r, m)
        )
    if isinstance(phi, ConstrainedFunction):
        if phi.m != m:
            raise ValueError(f"constraint order {phi.m} does not match m = {m}")
        v = phi.core
    else:
        v = tau_m_of(phi, m)
    if not v.is_exact:
        raise TypeError("solve_scalar needs an exact right-hand side; use the spectral solver for samples")
    if not rm_check(v, m):
        raise SymmetryError(f"right-hand side core is not in R_{m}")
    mp = m // 2
    u = rm_shift(v, m).laurent
    s = r - mp
    if m % 2 == 0:
        # zeta**-s f' + zeta**s conj(f') = u, u real
        half = LaurentPoly({k: (c / 2 if k == 0 else c) for k, c in u.items() if k >= 0})
        fprime = half.shift(s)
    else:
        # zeta**-s f' - conj(zeta**(s+1) f') = u, u in R_1; f' = zeta**s P(u)
        fprime = u.nonnegative_part().shift(s)
    return LaurentPoly.one_minus_zeta(m) * fprime


def scalar_operator(r: int, f: LaurentPoly) -> LaurentPoly:
    """``2 Re[zeta**(-r) f]`` as a Laurent polynomial."""
    a = f.shift(-r)
    return a + a.conj_circle()


# ----------------------------------------------------------------------------
# Pair problems
# ----------------------------------------------------------------------------

ROTATION_CORE = SymbolMatrix([[1 + ZETA, (1 - ZETA).scale(-I)], [(1 - ZETA).scale(I), 1 + ZETA]])


def pair_symbol(r1: int, r2: int) -> SymbolMatrix:
    """The matrix ``[[1+z, -i(1-z)], [i(1-z), 1+z]] diag(z**-r1, z**-r2)``.

    It plays the role of ``conj(G)`` in ``2 Re[conj(G) f]``.
    """
    return ROTATION_CORE @ SymbolMatrix.diag([LaurentPoly.monomial(-r1), LaurentPoly.monomial(-r2)])


@dataclass(frozen=True)
class PairReduction:
    """Outcome of the square-root substitution for odd ``m``.

    ``exponents[j] = (2 r_j - m - 1) / 2`` is the twist of the j-th scalar problem
    ``2 Re[zeta**(-e) g_j] = u_j`` with ``m = 0``.  ``scalar_problems`` carries the
    pair as :class:`ScalarProblem` instances.
    """

    problem: PairProblem
    exponents: tuple[int, int]
    scalar_problems: tuple[ScalarProblem, ScalarProblem]
    onto: bool

    def transform_rhs(self, v: tuple[LaurentPoly, LaurentPoly]) -> tuple[LaurentPoly, LaurentPoly]:
        return pair_rhs_transform(self.problem.m, v)

    def lift_solution(self, g: tuple[LaurentPoly, LaurentPoly]) -> tuple[LaurentPoly, LaurentPoly]:
        return pair_lift_solution(self.problem, g)


def pair_reduce_odd(problem: PairProblem) -> PairReduction:
    if problem.m % 2 == 0:
        raise ValueError("pair_reduce_odd needs odd m")
    ex = tuple((2 * r - problem.m - 1) // 2 for r in (problem.r1, problem.r2))
    sp = tuple(ScalarProblem(m=0, r=e) for e in ex)
    return PairReduction(problem, ex, sp, all(scalar_onto(e, 0) for e in ex))


# On the circle the core matrix factors as 2 zeta**(1/2) R(theta/2) with R a real
# rotation.  With f = (1-zeta)**m f' and (1-zeta)**m = zeta**(m/2) (-2i s)**m,
# s = sin(theta/2), the real output becomes
#     4 (-2)**m s**m R(theta/2) y,    y_j = Re[i**m zeta**((m+1)/2 - r_j) f'_j].
# For odd m all exponents are integers, so y_j is a twisted scalar problem.

def pair_rhs_transform(m: int, v: tuple[LaurentPoly, LaurentPoly]) -> tuple[LaurentPoly, LaurentPoly]:
    """Map cores ``v`` (each in R_m, odd ``m``) to the scalar right-hand sides ``2 y_j``.

    From ``v = 4 i**(-m) zeta**(-m/2) R(theta/2) y`` we get
    ``y = R(-theta/2) (i**m zeta**(m/2) v / 4)``.  Writing
    ``zeta**(1/2) cos(theta/2) = (zeta+1)/2`` and
    ``zeta**(1/2) sin(theta/2) = (zeta-1)/(2i)`` leaves the integral power
    ``zeta**((m-1)/2)``.
    """
    if m % 2 == 0:
        raise ValueError("transform defined for odd m")
    c2 = (ZETA + 1).scale(QI(1, 0) / 2)
    s2 = (ZETA - 1).scale(QI(1) / (2 * I))
    w = [x.scale(I ** m / 4).shift((m - 1) // 2) for x in v]
    y1 = c2 * w[0] + s2 * w[1]
    y2 = -(s2 * w[0]) + c2 * w[1]
    return (y1.scale(2), y2.scale(2))


def pair_lift_solution(problem: PairProblem, g: tuple[LaurentPoly, LaurentPoly]) -> tuple[LaurentPoly, LaurentPoly]:
    """From scalar solutions ``g_j`` of ``2 Re[zeta**(-e_j) g_j] = 2 y_j`` rebuild ``f``.

    ``y_j = Re[i**m zeta**((m+1)/2 - r_j) f'_j]`` and ``e_j = r_j - (m+1)/2`` give
    ``f'_j = i**(-m) g_j``.
    """
    m = problem.m
    w = LaurentPoly.one_minus_zeta(m)
    return tuple(w * gj.scale(I ** (-m)) for gj in g)


def solve_pair(problem: PairProblem, v: tuple[LaurentPoly, LaurentPoly]) -> tuple[LaurentPoly, LaurentPoly]:
    """Exact solution of ``2 Re[P f] = (1-zeta)**m v`` for odd ``m`` via the scalar reduction."""
    red = pair_reduce_odd(problem)
    if not red.onto:
        raise NotSurjectiveError(f"pair problem {problem} is not onto")
    rhs = red.transform_rhs(v)
    g = tuple(solve_scalar(e, 0, ConstrainedFunction(0, BoundaryFunction.exact(y))) for e, y in zip(red.exponents, rhs))
    return red.lift_solution(g)


def pair_operator(problem: PairProblem, f: tuple[LaurentPoly, LaurentPoly]) -> tuple[LaurentPoly, LaurentPoly]:
    """``2 Re[P f]`` componentwise."""
    P = pair_symbol(problem.r1, problem.r2)
    out = []
    for i in range(2):
        a = P[i, 0] * f[0] + P[i, 1] * f[1]
        out.append(a + a.conj_circle())
    return tuple(out)


def pair_witness(r1: int, r2: int, m: int) -> tuple[LaurentPoly, LaurentPoly]:
    """Cores ``(v_1, v_2)`` in R_m outside the image when the pair problem is not onto.

    With ``v = 4 i**(-m) zeta**(-m/2) R(theta/2) y`` we put ``y_j = 1`` (odd m) or
    ``y_j = cos(theta/2)`` (even m) on the first failing component; every image
    element has ``y_j`` of zero mean, respectively orthogonal to ``cos(theta/2)``.
    """
    bad = [j for j, r in enumerate((r1, r2)) if 2 * r - m < 0]
    if not bad:
        raise ValueError(f"pair problem ({r1}, {r2}, {m}) is onto; no witness")
    j = bad[0]
    unit = I ** (-m) * 4
    if m % 2:
        # zeta**(-m/2) cos(theta/2) and zeta**(-m/2) sin(theta/2), both integral
        c = (ZETA + 1).scale(QI(1, 0) / 2).shift(-(m + 1) // 2)
        s = (ZETA - 1).scale(QI(1) / (2 * I)).shift(-(m + 1) // 2)
    else:
        # zeta**(-m/2) cos**2(theta/2) and zeta**(-m/2) sin(theta/2) cos(theta/2)
        c = LaurentPoly({-1: QI(1, 0) / 4, 0: QI(1, 0) / 2, 1: QI(1, 0) / 4}).shift(-m // 2)
        s = LaurentPoly({1: 1, -1: -1}).scale(QI(1) / (4 * I)).shift(-m // 2)
    # column j of R(theta/2) = [[cos, -sin], [sin, cos]]
    col = (c, s) if j == 0 else (-s, c)
    return tuple(x.scale(unit) for x in col)
