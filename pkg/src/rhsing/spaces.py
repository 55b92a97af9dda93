"""Boundary functions on the unit circle and the symmetry classes R_m.

A function ``v`` lies in ``R_m`` when ``v = (-1)**m zeta**(-m) conj(v)`` on the
circle, equivalently ``(1 - zeta)**m v`` is real-valued.  At coefficient level
this reads ``c_k = (-1)**m conj(c_{-m-k})``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SymmetryError
from .laurent import I, LaurentPoly, QI, divide_by_one_minus_zeta

DEFAULT_TOL = 1e-10


class AliasingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BoundaryFunction:
    """A function on the circle, held exactly or as samples on a ``2**p`` grid.

    ``k`` and ``alpha`` record the nominal Hölder regularity; they are not enforced.
    """

    laurent: LaurentPoly | None = None
    samples: np.ndarray | None = field(default=None, compare=False)
    k: int = 0
    alpha: float = 0.5

    def __post_init__(self):
        if self.laurent is None and self.samples is None:
            raise ValueError("need a Laurent or a sampled representation")
        if self.samples is not None:
            n = len(self.samples)
            if n & (n - 1) or n == 0:
                raise ValueError("sample grid size must be a power of two")

    @classmethod
    def exact(cls, p: LaurentPoly, **meta) -> "BoundaryFunction":
        return cls(laurent=p, **meta)

    @classmethod
    def sampled(cls, values, **meta) -> "BoundaryFunction":
        return cls(samples=np.asarray(values, dtype=complex), **meta)

    @property
    def is_exact(self) -> bool:
        return self.laurent is not None

    @property
    def grid_exponent(self) -> int | None:
        if self.samples is None:
            return None
        return int(np.log2(len(self.samples)))

    def values(self, n: int = 4096) -> np.ndarray:
        """Values on the ``n``-point grid ``exp(2*pi*i*j/n)``."""
        if self.laurent is not None:
            return self.laurent(grid(n))
        if len(self.samples) == n:
            return self.samples
        return _resample(self.samples, n)

    def _with(self, laurent=None, samples=None) -> "BoundaryFunction":
        return BoundaryFunction(laurent=laurent, samples=samples, k=self.k, alpha=self.alpha)


@dataclass(frozen=True)
class ConstrainedFunction:
    """A real boundary function written as ``(1 - zeta)**m * core``."""

    m: int
    core: BoundaryFunction

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if not rm_check(self.core, self.m):
            raise SymmetryError(f"core is not in R_{self.m}")

    def full(self) -> BoundaryFunction:
        if self.core.is_exact:
            return self.core._with(laurent=LaurentPoly.one_minus_zeta(self.m) * self.core.laurent)
        z = grid(len(self.core.samples))
        return self.core._with(samples=(1 - z) ** self.m * self.core.samples)


def grid(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


# ----------------------------------------------------------------------------
# FFT bridge
# ----------------------------------------------------------------------------

def fft_sample(v: BoundaryFunction | LaurentPoly, p: int) -> BoundaryFunction:
    """Sample an exact function on the ``2**p`` grid, warning when it would alias."""
    if isinstance(v, LaurentPoly):
        v = BoundaryFunction.exact(v)
    if not v.is_exact:
        return v._with(samples=_resample(v.samples, 2 ** p))
    n = 2 ** p
    lp = v.laurent
    if not lp.is_zero() and (lp.kmax >= n // 2 or lp.kmin < -(n // 2)):
        warnings.warn(
            f"grid of {n} points cannot resolve degrees [{lp.kmin}, {lp.kmax}]", AliasingWarning,
            stacklevel=2,
        )
    return v._with(samples=lp(grid(n)))


def fourier_coefficients(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modes ``k = -n/2 .. n/2-1`` and their coefficients."""
    n = len(samples)
    c = np.fft.fft(samples) / n
    ks = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    order = np.argsort(ks)
    return ks[order], c[order]


def tail_energy(samples: np.ndarray) -> float:
    """Relative energy in the outermost quarter of the resolved spectrum."""
    ks, c = fourier_coefficients(samples)
    total = float(np.sum(np.abs(c) ** 2))
    if total == 0.0:
        return 0.0
    n = len(samples)
    outer = np.abs(ks) >= 3 * n // 8
    return float(np.sum(np.abs(c[outer]) ** 2)) / total


def fft_reconstruct(v: BoundaryFunction, tol: float = 1e-12, warn_tail: float = 1e-9) -> dict[int, complex]:
    """Fourier coefficients of sampled data, dropping those below ``tol``.

    Emits :class:`AliasingWarning` when the spectral tail carries relative energy
    above ``warn_tail``.
    """
    if v.is_exact:
        return {k: complex(c) for k, c in v.laurent.items()}
    if tail_energy(v.samples) > warn_tail:
        warnings.warn("spectral tail above threshold; grid probably too coarse", AliasingWarning, stacklevel=2)
    ks, c = fourier_coefficients(v.samples)
    return {int(k): complex(x) for k, x in zip(ks, c) if abs(x) > tol}


def _resample(samples: np.ndarray, n: int) -> np.ndarray:
    ks, c = fourier_coefficients(samples)
    z = grid(n)
    return sum(ci * z ** int(k) for k, ci in zip(ks, c) if ci != 0) + 0 * z


def _numeric_coeffs(v: BoundaryFunction) -> tuple[np.ndarray, np.ndarray]:
    if v.is_exact:
        lo, arr = v.laurent.to_array()
        return np.arange(lo, lo + len(arr)), arr
    return fourier_coefficients(v.samples)


# ----------------------------------------------------------------------------
# R_m machinery
# ----------------------------------------------------------------------------

def rm_check(v: BoundaryFunction | LaurentPoly, m: int, tol: float = DEFAULT_TOL) -> bool:
    if isinstance(v, LaurentPoly):
        v = BoundaryFunction.exact(v)
    sign = -1 if m % 2 else 1
    if v.is_exact:
        p = v.laurent
        return p == p.conj_circle().shift(-m).scale(sign)
    z = grid(len(v.samples))
    x = v.samples
    return bool(np.max(np.abs(x - sign * z ** (-m) * np.conj(x)), initial=0.0) <= tol)


def _require_rm(v: BoundaryFunction, m: int, tol: float):
    if not rm_check(v, m, tol):
        raise SymmetryError(f"function is not in R_{m}")


def tau_m(phi: ConstrainedFunction) -> BoundaryFunction:
    """``(1 - zeta)**m v  ->  v``; the core is stored, so this is a projection."""
    return phi.core


def tau_m_of(phi: BoundaryFunction | LaurentPoly, m: int) -> BoundaryFunction:
    """Divide a real boundary function with an order-``m`` zero at 1 by ``(1 - zeta)**m``."""
    if isinstance(phi, LaurentPoly):
        phi = BoundaryFunction.exact(phi)
    if phi.is_exact:
        v = divide_by_one_minus_zeta(phi.laurent, m)
        out = phi._with(laurent=v)
    else:
        ks, c = fourier_coefficients(phi.samples)
        c = c.copy()
        # deconvolve (1 - z)^m from the coefficient sequence, lowest mode first
        for _ in range(m):
            c = np.cumsum(c)
        out = phi._with(samples=_eval_modes(ks, c, len(phi.samples)))
    _require_rm(out, m, DEFAULT_TOL * max(1.0, _scale(out)))
    return out


def _eval_modes(ks, c, n):
    z = grid(n)
    return sum(ci * z ** int(k) for k, ci in zip(ks, c)) + 0 * z


def _scale(v: BoundaryFunction) -> float:
    return float(np.max(np.abs(v.values(256)), initial=1.0))


def tau_m_inverse(v: BoundaryFunction | LaurentPoly, m: int, tol: float = DEFAULT_TOL) -> ConstrainedFunction:
    if isinstance(v, LaurentPoly):
        v = BoundaryFunction.exact(v)
    _require_rm(v, m, tol)
    return ConstrainedFunction(m, v)


def rm_shift(v: BoundaryFunction | LaurentPoly, m: int, tol: float = DEFAULT_TOL) -> BoundaryFunction:
    """``v -> zeta**(m // 2) v``, landing in R_0 (m even) or R_1 (m odd)."""
    if isinstance(v, LaurentPoly):
        v = BoundaryFunction.exact(v)
    _require_rm(v, m, tol)
    mp = m // 2
    if v.is_exact:
        return v._with(laurent=v.laurent.shift(mp))
    return v._with(samples=grid(len(v.samples)) ** mp * v.samples)


def rm_unshift(u: BoundaryFunction | LaurentPoly, m: int) -> BoundaryFunction:
    if isinstance(u, LaurentPoly):
        u = BoundaryFunction.exact(u)
    mp = m // 2
    if u.is_exact:
        return u._with(laurent=u.laurent.shift(-mp))
    return u._with(samples=grid(len(u.samples)) ** (-mp) * u.samples)


def rm_odd_unfold(v: BoundaryFunction | LaurentPoly, m: int, tol: float = DEFAULT_TOL) -> BoundaryFunction:
    """``v(zeta) -> i zeta**m v(zeta**2)``: R_m (m odd) onto real odd functions.

    For sampled input on ``2**p`` points the result lives on ``2**(p+1)`` points;
    point ``j`` of the finer grid squares to point ``j mod 2**p`` of the coarser one.
    """
    if m % 2 == 0:
        raise ValueError("rm_odd_unfold needs odd m")
    if isinstance(v, LaurentPoly):
        v = BoundaryFunction.exact(v)
    _require_rm(v, m, tol)
    if v.is_exact:
        return v._with(laurent=v.laurent.substitute_power(2).shift(m).scale(I))
    n = len(v.samples)
    xi = grid(2 * n)
    idx = np.arange(2 * n) % n
    return v._with(samples=1j * xi ** m * v.samples[idx])


def szego_projection(v: BoundaryFunction | LaurentPoly) -> BoundaryFunction:
    """Keep the nonnegative Fourier modes."""
    if isinstance(v, LaurentPoly):
        v = BoundaryFunction.exact(v)
    if v.is_exact:
        return v._with(laurent=v.laurent.nonnegative_part())
    n = len(v.samples)
    c = np.fft.fft(v.samples)
    ks = np.fft.fftfreq(n, d=1.0 / n)
    c[ks < 0] = 0
    c[ks == -(n // 2)] = 0
    return v._with(samples=np.fft.ifft(c))


def random_rm_element(m: int, degree: int, rng: np.random.Generator, bound: int = 5) -> LaurentPoly:
    """Random exact element of R_m with Gaussian-integer coefficients.

    Built as ``zeta**(-m//2) w`` with ``w`` in R_0 (real) or R_1, ``w`` having
    nonnegative modes up to ``degree``.
    """
    c: dict[int, QI] = {}
    for k in range(degree + 1):
        a = QI(int(rng.integers(-bound, bound + 1)), int(rng.integers(-bound, bound + 1)))
        if m % 2 == 0:
            if k == 0:
                a = QI(a.re)
            c[k] = a
            if k:
                c[-k] = a.conj()
        else:
            c[k] = a
            c[-1 - k] = -a.conj()
    return LaurentPoly(c).shift(-(m // 2))
