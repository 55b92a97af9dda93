"""Exact Laurent polynomials over the Gaussian rationals, and matrices of them.

Everything here is exact except :func:`winding_number`, which locates roots
numerically with a guard band around the unit circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CircleSingularError, NotDivisibleError, ShapeError

ROOT_GUARD = 1e-8


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class QI:
    """Gaussian rational ``re + i*im`` with :class:`~fractions.Fraction` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x, 0)

    def __add__(self, other):
        o = QI.coerce(other)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = QI.coerce(other)
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QI.coerce(other) - self

    def __mul__(self, other):
        o = QI.coerce(other)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QI.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QI((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        return QI.coerce(other) / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            return (QI(1) / self) ** (-n)
        out, base = QI(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "QI":
        return QI(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


I = QI(0, 1)


class LaurentPoly:
    """Finite sum ``sum_k c_k zeta**k`` with exact Gaussian-rational coefficients.

    Instances are immutable and kept canonical: zero coefficients are never stored.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        for k, v in (coeffs or {}).items():
            q = QI.coerce(v)
            if q:
                c[int(k)] = q
        self._c = dict(sorted(c.items()))
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, k: int, c=1) -> "LaurentPoly":
        return cls({k: c})

    @classmethod
    def constant(cls, c) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one_minus_zeta(cls, m: int = 1) -> "LaurentPoly":
        if m < 0:
            raise ValueError("m must be nonnegative")
        return cls({k: (-1) ** k * math.comb(m, k) for k in range(m + 1)})

    @classmethod
    def from_coeff_list(cls, kmin: int, coeffs: Iterable) -> "LaurentPoly":
        return cls({kmin + i: c for i, c in enumerate(coeffs)})

    # -- accessors ----------------------------------------------------------
    @property
    def coeffs(self) -> dict[int, QI]:
        return dict(self._c)

    def items(self):
        return self._c.items()

    def coeff(self, k: int) -> QI:
        return self._c.get(k, QI(0))

    def is_zero(self) -> bool:
        return not self._c

    @property
    def kmin(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no degree range")
        return next(iter(self._c))

    @property
    def kmax(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no degree range")
        return next(reversed(self._c))

    @property
    def span(self) -> int:
        return 0 if not self._c else self.kmax - self.kmin

    def is_constant(self) -> bool:
        return not self._c or (len(self._c) == 1 and 0 in self._c)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = _as_lp(other)
        c = dict(self._c)
        for k, v in o._c.items():
            c[k] = c.get(k, QI(0)) + v
        return LaurentPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-_as_lp(other))

    def __rsub__(self, other):
        return _as_lp(other) - self

    def __mul__(self, other):
        o = _as_lp(other)
        c: dict[int, QI] = {}
        for k1, v1 in self._c.items():
            for k2, v2 in o._c.items():
                k = k1 + k2
                c[k] = c.get(k, QI(0)) + v1 * v2
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._c) != 1:
                raise ValueError("only monomials can be raised to negative powers")
            (k, v), = self._c.items()
            return LaurentPoly({k * n: v ** n})
        out, base = LaurentPoly.constant(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``zeta**k``."""
        return LaurentPoly({j + k: v for j, v in self._c.items()})

    def scale(self, c) -> "LaurentPoly":
        q = QI.coerce(c)
        return LaurentPoly({k: v * q for k, v in self._c.items()})

    def __eq__(self, other):
        try:
            o = _as_lp(other)
        except TypeError:
            return NotImplemented
        return self._c == o._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._c.items()))
        return self._hash

    # -- circle operations --------------------------------------------------
    def conj_circle(self) -> "LaurentPoly":
        return LaurentPoly({-k: v.conj() for k, v in self._c.items()})

    def substitute_power(self, d: int) -> "LaurentPoly":
        """Return ``p(zeta**d)``."""
        return LaurentPoly({d * k: v for k, v in self._c.items()})

    def rotate(self, z0) -> "LaurentPoly":
        """Return ``p(z0*zeta)`` for an exact Gaussian-rational ``z0``."""
        z = QI.coerce(z0)
        return LaurentPoly({k: v * z ** k for k, v in self._c.items()})

    def nonnegative_part(self) -> "LaurentPoly":
        return LaurentPoly({k: v for k, v in self._c.items() if k >= 0})

    def derivative(self, order: int = 1) -> "LaurentPoly":
        out = self
        for _ in range(order):
            out = LaurentPoly({k - 1: v * k for k, v in out._c.items() if k})
        return out

    def at_one(self) -> QI:
        s = QI(0)
        for v in self._c.values():
            s = s + v
        return s

    def __call__(self, z):
        """Evaluate at a scalar or numpy array of complex points."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, v in self._c.items():
            out = out + complex(v) * z ** k
        return out if out.ndim else complex(out)

    def to_array(self) -> tuple[int, np.ndarray]:
        """``(kmin, coefficients)`` as a dense complex array; zero gives ``(0, [])``."""
        if not self._c:
            return 0, np.zeros(0, dtype=complex)
        lo = self.kmin
        arr = np.zeros(self.kmax - lo + 1, dtype=complex)
        for k, v in self._c.items():
            arr[k - lo] = complex(v)
        return lo, arr

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        for k, v in self._c.items():
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if mono and v == 1:
                parts.append(mono)
            elif mono and v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{v!r}{'*' + mono if mono else ''}")
        return " + ".join(parts).replace("+ -", "- ")


def _as_lp(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction, QI, complex, float)):
        return LaurentPoly.constant(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as LaurentPoly")


ZETA = LaurentPoly.monomial(1)
ONE = LaurentPoly.constant(1)


def lp_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    ops: dict[str, Callable] = {
        "add": lambda x, y: x + y,
        "sub": lambda x, y: x - y,
        "mul": lambda x, y: x * y,
    }
    try:
        return ops[op](a, b)
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None


def circle_conjugate(p: LaurentPoly) -> LaurentPoly:
    """The Laurent polynomial equal to ``conj(p(zeta))`` for ``|zeta| = 1``."""
    return p.conj_circle()


def vanishing_order_at_one(p: LaurentPoly) -> float | int:
    """Order of the zero of ``p`` at ``zeta = 1``; ``math.inf`` for the zero polynomial."""
    if p.is_zero():
        return math.inf
    m = 0
    while not p.at_one():
        p = _divide_once(p)
        m += 1
    return m


def _divide_once(p: LaurentPoly) -> LaurentPoly:
    # p = (1 - z) s  <=>  s_k = sum_{j<=k} p_j
    if p.is_zero():
        return p
    out, acc = {}, QI(0)
    for k in range(p.kmin, p.kmax):
        acc = acc + p.coeff(k)
        out[k] = acc
    return LaurentPoly(out)


def divide_by_one_minus_zeta(p: LaurentPoly, m: int) -> LaurentPoly:
    """Exact quotient ``p / (1 - zeta)**m``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    order = vanishing_order_at_one(p)
    if order < m:
        raise NotDivisibleError(f"vanishing order at 1 is {order} < {m}")
    for _ in range(m):
        p = _divide_once(p)
    return p


def roots_of(p: LaurentPoly) -> np.ndarray:
    """Roots of ``zeta**(-kmin) * p`` as a polynomial (complex floats)."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    _, arr = p.to_array()
    if len(arr) == 1:
        return np.zeros(0, dtype=complex)
    return np.roots(arr[::-1])


def _monic_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic gcd of two polynomials (no negative powers) by exact Euclid."""
    while not b.is_zero():
        a, b = b, _poly_rem(a, b)
    return a.scale(QI(1) / a.coeff(a.kmax))


def _poly_divmod(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    q: dict[int, QI] = {}
    lead = b.coeff(b.kmax)
    while not a.is_zero() and a.kmax >= b.kmax:
        k = a.kmax - b.kmax
        c = a.coeff(a.kmax) / lead
        q[k] = c
        a = a - b.shift(k).scale(c)
    return LaurentPoly(q), a


def _poly_rem(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return _poly_divmod(a, b)[1]


def _exact_quotient(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    q, r = _poly_divmod(a, b)
    assert r.is_zero()
    return q


def squarefree_factors(p: LaurentPoly) -> list[tuple[LaurentPoly, int]]:
    """Yun decomposition ``zeta**(-kmin) p = c * prod f_i**i`` with squarefree ``f_i``."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    a = p.shift(-p.kmin)
    if a.kmax == 0:
        return []
    da = a.derivative()
    g = _monic_gcd(a, da)
    c = _exact_quotient(a, g)
    d = _exact_quotient(da, g) - c.derivative()
    out, i = [], 1
    while c.kmax > 0:
        f = _monic_gcd(c, d)
        if f.kmax > 0:
            out.append((f, i))
        c = _exact_quotient(c, f)
        d = _exact_quotient(d, f) - c.derivative()
        i += 1
    return out


CLUSTER_RADIUS = 1e-3


def roots_with_multiplicity(p: LaurentPoly) -> list[tuple[complex, int]]:
    """Roots of ``zeta**(-kmin) p``; exact squarefree splitting near the circle.

    ``numpy.roots`` smears a ``k``-fold root by about ``eps**(1/k)``, harmless
    unless the cluster straddles the circle.  When any computed root is within
    ``CLUSTER_RADIUS`` of ``|zeta| = 1`` the roots are recomputed from the exact
    squarefree factors instead.
    """
    r = roots_of(p)
    if not np.any(np.abs(np.abs(r) - 1.0) <= CLUSTER_RADIUS):
        return [(complex(x), 1) for x in r]
    return [(complex(x), mult) for f, mult in squarefree_factors(p) for x in roots_of(f)]


def winding_number(p: LaurentPoly, guard: float = ROOT_GUARD) -> int:
    """Winding number of ``p`` around 0 along the positively oriented unit circle."""
    total = p.kmin
    for x, mult in roots_with_multiplicity(p):
        if abs(1.0 - abs(x)) <= guard:
            raise CircleSingularError(
                f"symbol-singular-on-circle: root {x:.6g} within {guard:g} of |zeta|=1"
            )
        total += mult * int(abs(x) < 1.0)
    return int(total)


def is_unimodular_constant(p: LaurentPoly) -> bool:
    return p.is_constant() and not p.is_zero()


@dataclass(frozen=True)
class CirclePoint:
    """Point on the unit circle, either by angle or as the j-th of 2**p roots of unity."""

    theta: float | None = None
    index: tuple[int, int] | None = None

    @property
    def value(self) -> complex:
        if self.index is not None:
            j, p = self.index
            return complex(np.exp(2j * np.pi * j / 2 ** p))
        return complex(np.exp(1j * (self.theta or 0.0)))


# ----------------------------------------------------------------------------
# Matrices
# ----------------------------------------------------------------------------

class SymbolMatrix:
    """Dense matrix of :class:`LaurentPoly` entries (immutable)."""

    __slots__ = ("_rows",)

    def __init__(self, rows: Sequence[Sequence[object]]):
        rows = tuple(tuple(_as_lp(e) for e in r) for r in rows)
        if not rows or not rows[0]:
            raise ShapeError("empty matrix")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("ragged rows")
        self._rows = rows

    @classmethod
    def identity(cls, n: int) -> "SymbolMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[object]) -> "SymbolMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def block_diag(cls, blocks: Sequence["SymbolMatrix"]) -> "SymbolMatrix":
        n = sum(b.n_rows for b in blocks)
        rows = [[LaurentPoly() for _ in range(n)] for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.n_rows):
                for j in range(b.n_cols):
                    rows[off + i][off + j] = b[i, j]
            off += b.n_rows
        return cls(rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), len(self._rows[0])

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    @property
    def n_cols(self) -> int:
        return len(self._rows[0])

    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    @property
    def rows(self):
        return self._rows

    def column(self, j: int) -> list[LaurentPoly]:
        return [r[j] for r in self._rows]

    def map(self, fn: Callable[[LaurentPoly], LaurentPoly]) -> "SymbolMatrix":
        return SymbolMatrix([[fn(e) for e in r] for r in self._rows])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SymbolMatrix":
        return SymbolMatrix([[self._rows[i][j] for j in cols] for i in rows])

    def transpose(self) -> "SymbolMatrix":
        return SymbolMatrix([list(c) for c in zip(*self._rows)])

    def circle_conjugate(self) -> "SymbolMatrix":
        return self.map(LaurentPoly.conj_circle)

    def __add__(self, other: "SymbolMatrix"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        return SymbolMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)])

    def __sub__(self, other: "SymbolMatrix"):
        return self + other.scale(-1)

    def scale(self, c) -> "SymbolMatrix":
        p = _as_lp(c)
        return self.map(lambda e: e * p)

    def __matmul__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        if self.n_cols != other.n_rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other._rows))
        out = []
        for r in self._rows:
            row = []
            for c in cols:
                acc = LaurentPoly()
                for a, b in zip(r, c):
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return SymbolMatrix(out)

    def __eq__(self, other):
        return isinstance(other, SymbolMatrix) and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def det(self) -> LaurentPoly:
        if not self.is_square():
            raise ShapeError("determinant of non-square matrix")
        rows = self._rows
        n = len(rows)
        memo: dict[tuple[int, tuple[int, ...]], LaurentPoly] = {}

        def minor(r: int, cols: tuple[int, ...]) -> LaurentPoly:
            if r == n:
                return ONE
            key = (r, cols)
            if key in memo:
                return memo[key]
            acc = LaurentPoly()
            for pos, c in enumerate(cols):
                e = rows[r][c]
                if e.is_zero():
                    continue
                sub = minor(r + 1, cols[:pos] + cols[pos + 1:])
                if sub.is_zero():
                    continue
                term = e * sub
                acc = acc - term if pos % 2 else acc + term
            memo[key] = acc
            return acc

        return minor(0, tuple(range(n)))

    def adjugate(self) -> "SymbolMatrix":
        n = self.n_rows
        if not self.is_square():
            raise ShapeError("adjugate of non-square matrix")
        if n == 1:
            return SymbolMatrix([[1]])
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                rs = [r for r in range(n) if r != j]
                cs = [c for c in range(n) if c != i]
                cof = self.submatrix(rs, cs).det()
                out[i][j] = -cof if (i + j) % 2 else cof
        return SymbolMatrix(out)

    def evaluate(self, z) -> np.ndarray:
        """Values on an array of points: shape ``z.shape + (n_rows, n_cols)``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + self.shape, dtype=complex)
        for i, r in enumerate(self._rows):
            for j, e in enumerate(r):
                if not e.is_zero():
                    out[..., i, j] = e(z)
        return out

    def to_numeric(self) -> tuple[int, np.ndarray]:
        """``(kmin, C)`` with ``C[k - kmin]`` the coefficient matrix of ``zeta**k``."""
        nz = [e for r in self._rows for e in r if not e.is_zero()]
        if not nz:
            return 0, np.zeros((1,) + self.shape, dtype=complex)
        lo = min(e.kmin for e in nz)
        hi = max(e.kmax for e in nz)
        C = np.zeros((hi - lo + 1,) + self.shape, dtype=complex)
        for i, r in enumerate(self._rows):
            for j, e in enumerate(r):
                for k, v in e.items():
                    C[k - lo, i, j] = complex(v)
        return lo, C

    def span(self) -> int:
        nz = [e for r in self._rows for e in r if not e.is_zero()]
        if not nz:
            return 0
        return max(e.kmax for e in nz) - min(e.kmin for e in nz)

    def __repr__(self):
        return "SymbolMatrix([" + ", ".join("[" + ", ".join(map(repr, r)) + "]" for r in self._rows) + "])"


def matrix_ops(A: SymbolMatrix, B: SymbolMatrix | None = None, op: str = "mul"):
    """Dispatch for the matrix operations: ``mul``, ``det``, ``conj``, ``adj``."""
    if op == "mul":
        return A @ B
    if op == "det":
        return A.det()
    if op == "conj":
        return A.circle_conjugate()
    if op == "adj":
        return A.adjugate()
    raise ValueError(f"unknown op {op!r}")
