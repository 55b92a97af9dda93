"""Built-in symbols: the worked four-dimensional example and its pieces."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .indices import ConstraintProfile, FactorizationData
from .laurent import I, LaurentPoly, QI, SymbolMatrix, ZETA

_z = LaurentPoly.monomial
_w2 = LaurentPoly.one_minus_zeta(2)
_half_i = QI(0, Fraction(1, 2))


def example_gprime() -> SymbolMatrix:
    """The singular symbol, ``det = (1 - zeta)**4 / zeta``."""
    return SymbolMatrix([
        [-1, _w2.shift(1), 0, 0],
        [0, _w2.shift(-1), 0, ZETA],
        [0, _w2.shift(-1).scale(-_half_i), _w2.shift(-2).scale(-I), _z(2, -I)],
        [0, 0, 0, _z(2, -I)],
    ])


def example_g() -> SymbolMatrix:
    """The invertible symbol obtained after removing ``(1 - zeta)**2`` from columns 2 and 3."""
    return SymbolMatrix([
        [-1, _z(3), 0, 0],
        [0, ZETA, 0, ZETA],
        [0, _z(1, -_half_i), _z(0, -I), _z(2, -I)],
        [0, 0, 0, _z(2, -I)],
    ])


def example_gtilde() -> SymbolMatrix:
    """Block-diagonal part of :func:`example_g` for the profile ``1:0,2:2,1:0``."""
    return SymbolMatrix([
        [-1, 0, 0, 0],
        [0, ZETA, 0, 0],
        [0, _z(1, -_half_i), _z(0, -I), 0],
        [0, 0, 0, _z(2, -I)],
    ])


def example_profile() -> ConstraintProfile:
    return ConstraintProfile(((1, 0), (2, 2), (1, 0)))


def example_display_factors() -> tuple[SymbolMatrix, tuple[int, ...], SymbolMatrix]:
    """The displayed splitting of ``conj(Gtilde)^{-1} Gtilde`` as ``A diag(zeta**k) B``."""
    A = SymbolMatrix([[1, 0, 0, 0], [0, -1, -ZETA, 0], [0, 0, 1, 0], [0, 0, 0, I]])
    B = SymbolMatrix([[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, _z(-1, -1), 0], [0, 0, 0, I]])
    return A, (0, 1, 1, 4), B


def example_factorization() -> FactorizationData:
    """``Theta`` with ``-conj(Gt)^{-1} Gt = Theta diag(1, z, z, z^4) conj(Theta)^{-1}``.

    The middle block is the displayed left factor times the constant
    ``[[-1, i], [1, i]]``, which turns the displayed right factor into
    ``conj(Theta)^{-1}`` and absorbs the overall sign.
    """
    T = SymbolMatrix([
        [I, 0, 0, 0],
        [0, 1 - ZETA, (1 + ZETA).scale(-I), 0],
        [0, 1, I, 0],
        [0, 0, 0, 1],
    ])
    return FactorizationData(T, (0, 1, 1, 4))


BUILTINS = {
    "paper-example": example_g,
    "paper-example-gprime": example_gprime,
    "paper-example-gtilde": example_gtilde,
}


def _zero_free_factor(rng: np.random.Generator) -> LaurentPoly:
    """``zeta - rho`` with ``rho`` a Gaussian rational well inside or outside the circle."""
    while True:
        rho = QI(Fraction(int(rng.integers(-6, 7)), 4), Fraction(int(rng.integers(-6, 7)), 4))
        a = float(rho.abs2()) ** 0.5
        if a < 0.75 or a > 1.4:
            return LaurentPoly({1: 1, 0: -rho})


def random_triangular_symbol(rng: np.random.Generator, n: int, span: int = 4, bound: int = 3) -> SymbolMatrix:
    """Upper-triangular Laurent symbol with zero-free diagonal on the circle.

    Diagonal entries are ``c zeta**s prod(zeta - rho)``; off-diagonal entries are
    random integer Laurent polynomials.  Every entry has span at most ``span``.
    """
    rows = [[LaurentPoly() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        deg = int(rng.integers(0, span + 1))
        d = LaurentPoly.constant(QI(int(rng.integers(1, bound + 1)) * (1 if rng.random() < 0.5 else -1)))
        for _ in range(deg):
            d = d * _zero_free_factor(rng)
        rows[i][i] = d.shift(int(rng.integers(-2, 3)))
        for j in range(i + 1, n):
            lo = int(rng.integers(-2, 3))
            width = int(rng.integers(0, span + 1))
            coeffs = {lo + k: QI(int(rng.integers(-bound, bound + 1)), int(rng.integers(-bound, bound + 1)))
                      for k in range(width + 1)}
            rows[i][j] = LaurentPoly(coeffs)
    return SymbolMatrix(rows)
