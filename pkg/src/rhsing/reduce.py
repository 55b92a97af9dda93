"""Reduction of a singular symbol ``G'`` to an invertible ``G`` plus column constraints.

``G' = G conj(D)`` with ``D = diag((1 - zeta)**m_j)``; on the circle
``conj((1 - zeta)**m) = (-1)**m zeta**(-m) (1 - zeta)**m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BlockStructureError, CircleSingularError, IrreducibleSingularityError
from .indices import ConstraintProfile, block_triangular_violations, diagonal_blocks
from .laurent import LaurentPoly, QI, SymbolMatrix, divide_by_one_minus_zeta, vanishing_order_at_one, winding_number


@dataclass(frozen=True)
class SingularReduction:
    G: SymbolMatrix
    m: tuple[int, ...]

    @property
    def D(self) -> SymbolMatrix:
        return SymbolMatrix.diag([LaurentPoly.one_minus_zeta(k) for k in self.m])

    def reassemble(self) -> SymbolMatrix:
        return self.G @ self.D.circle_conjugate()

    def describe_D(self) -> list[str]:
        return [f"(1-z)^{k}" if k else "1" for k in self.m]


def column_reduce(Gp: SymbolMatrix) -> SingularReduction:
    """Strip the largest power of ``(1 - zeta)`` common to each column."""
    if not Gp.is_square():
        raise ValueError("symbol must be square")
    orders = []
    cols = []
    for j in range(Gp.n_cols):
        col = Gp.column(j)
        o = min(vanishing_order_at_one(e) for e in col)
        if o == math.inf:
            raise IrreducibleSingularityError(f"column {j} is identically zero")
        o = int(o)
        unit = LaurentPoly.monomial(o, (-1) ** o)
        cols.append([divide_by_one_minus_zeta(e, o) * unit for e in col])
        orders.append(o)
    G = SymbolMatrix([list(r) for r in zip(*cols)])
    det_gp = Gp.det()
    try:
        winding_number(G.det())
    except CircleSingularError as exc:
        if vanishing_order_at_one(det_gp) > sum(orders):
            raise IrreducibleSingularityError(
                f"det still vanishes at 1 after removing column orders {orders}"
            ) from exc
        raise CircleSingularError(f"unsupported: det vanishes on the circle away from 1 ({exc})") from exc
    return SingularReduction(G, tuple(orders))


def block_structure(G: SymbolMatrix, m) -> ConstraintProfile:
    """Group consecutive equal orders and check the upper block-triangular shape."""
    m = list(m)
    if len(m) != G.n_cols:
        raise ValueError("one order per column required")
    blocks = []
    for k in m:
        if blocks and blocks[-1][1] == k:
            blocks[-1][0] += 1
        else:
            blocks.append([1, k])
    profile = ConstraintProfile(tuple((n, k) for n, k in blocks))
    bad = block_triangular_violations(G, profile)
    if bad:
        raise BlockStructureError(
            "not upper block-triangular; nonzero entries at " + ", ".join(f"({a + 1},{b + 1})" for a, b in bad),
            bad,
        )
    for idx, Gj in enumerate(diagonal_blocks(G, profile)):
        try:
            winding_number(Gj.det())
        except CircleSingularError as exc:
            raise BlockStructureError(f"diagonal block {idx + 1} is singular on the circle", [idx]) from exc
    return profile


ROTATIONS = {0: QI(1), 90: QI(0, 1), 180: QI(-1), 270: QI(0, -1)}


def rotation_from_degrees(angle: float) -> QI:
    """Exact unit for quarter-turn angles; other angles are not exact-layer citizens."""
    a = int(round(angle)) % 360
    if abs(angle - round(angle)) > 1e-12 or a not in ROTATIONS:
        raise ValueError("exact rotation supported for multiples of 90 degrees only")
    return ROTATIONS[a]


def rotate_symbol(G: SymbolMatrix, z0) -> SymbolMatrix:
    """``zeta -> G(z0 * zeta)``: a constraint at ``z0`` becomes one at ``1``."""
    return G.map(lambda e: e.rotate(z0))
