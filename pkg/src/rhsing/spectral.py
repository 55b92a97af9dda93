"""Truncated-Fourier discretisation of real-linear boundary operators.

Unknowns are the coefficients of ``f'_l`` (degrees ``0..Dg``) with
``f_l = (1 - zeta)**m_l f'_l``; each complex coefficient gives two real
unknowns.  A row of the operator is ``A f' + B conj(f')`` with Laurent
coefficients.  For ``2 Re[conj(G) f]`` the output of a row whose block carries
order ``mu`` is replaced by its cofactor ``v = tau_mu(...)`` and shifted into R_0
or R_1, so only modes ``0..K`` are kept.  Least squares and nullity then use the
cofactor norm.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ShapeError
from .indices import ConstraintProfile, well_definedness_violations
from .laurent import LaurentPoly, SymbolMatrix, divide_by_one_minus_zeta
from .spaces import ConstrainedFunction, fourier_coefficients, grid

log = logging.getLogger(__name__)


class IllSeparatedWarning(UserWarning):
    pass


class BandwidthError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralConfig:
    dg: int = 32
    k: int | None = None
    rel_tol: float = 1e-8
    samples: int = 4096
    output: str = "cofactor"

    @property
    def modes(self) -> int:
        return self.k if self.k is not None else 2 * self.dg


@dataclass
class RealLinearSystem:
    """Real matrix of a discretised operator plus everything needed to read it back."""

    matrix: np.ndarray
    A_ops: list[list[LaurentPoly]]
    B_ops: list[list[LaurentPoly]]
    row_classes: list[str]
    col_orders: list[int]
    row_shifts: list[int]
    row_orders: list[int]
    dg: int
    K: int
    well_defined: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.col_orders)

    def vector_to_cofactors(self, x: np.ndarray) -> np.ndarray:
        """Complex ``(N, Dg+1)`` coefficients of ``f'``."""
        x = np.asarray(x, dtype=float).reshape(self.n_components, self.dg + 1, 2)
        return x[..., 0] + 1j * x[..., 1]

    def vector_to_functions(self, x: np.ndarray) -> np.ndarray:
        """Complex ``(N, D)`` coefficients of ``f = (1-zeta)**m f'`` from degree 0."""
        fp = self.vector_to_cofactors(x)
        D = self.dg + 1 + max(self.col_orders)
        out = np.zeros((self.n_components, D), dtype=complex)
        for l, m in enumerate(self.col_orders):
            w = LaurentPoly.one_minus_zeta(m).to_array()[1]
            c = np.convolve(fp[l], w)
            out[l, :len(c)] = c
        return out

    def apply_on_grid(self, x: np.ndarray, n: int) -> np.ndarray:
        """Values of every output row on the ``n``-point grid, shape ``(N_rows, n)``."""
        fp = self.vector_to_cofactors(x)
        z = grid(n)
        powers = z[None, :] ** np.arange(self.dg + 1)[:, None]
        fv = fp @ powers
        out = np.zeros((len(self.A_ops), n), dtype=complex)
        for a in range(len(self.A_ops)):
            for l in range(self.n_components):
                A, B = self.A_ops[a][l], self.B_ops[a][l]
                if not A.is_zero():
                    out[a] += A(z) * fv[l]
                if not B.is_zero():
                    out[a] += B(z) * np.conj(fv[l])
        return out


def _row_layout(row_classes: Sequence[str], K: int) -> tuple[list[int], int]:
    offsets, total = [], 0
    for c in row_classes:
        offsets.append(total)
        total += 2 * (K + 1) if c in ("r0", "r1") else 2 * (2 * K + 1)
    return offsets, total


def assemble_general(A_ops, B_ops, row_classes, col_orders, dg: int, K: int, **meta) -> RealLinearSystem:
    """Discretise ``w_a = sum_l A[a][l] f'_l + B[a][l] conj(f'_l)``.

    Rows of class ``r0``/``r1`` keep modes ``0..K`` (the rest follow by symmetry);
    class ``full`` keeps modes ``-K..K``.
    """
    n_rows, N = len(A_ops), len(col_orders)
    offsets, total = _row_layout(row_classes, K)
    M = np.zeros((total, 2 * N * (dg + 1)))
    for a in range(n_rows):
        lo_mode = 0 if row_classes[a] in ("r0", "r1") else -K
        width = K - lo_mode + 1
        for l in range(N):
            A, B = A_ops[a][l], B_ops[a][l]
            alo, aco = A.to_array()
            blo, bco = B.to_array()
            for d in range(dg + 1):
                for part, ph in enumerate((1.0, 1j)):
                    col = np.zeros(width, dtype=complex)
                    for lo, co, shift, c in ((alo, aco, d, ph), (blo, bco, -d, np.conj(ph))):
                        if not len(co):
                            continue
                        modes = np.arange(lo, lo + len(co)) + shift
                        if modes.max() > K or (lo_mode < 0 and modes.min() < -K):
                            raise BandwidthError(
                                f"output mode range [{modes.min()}, {modes.max()}] exceeds K={K}"
                            )
                        keep = modes >= lo_mode
                        np.add.at(col, modes[keep] - lo_mode, c * co[keep])
                    j = 2 * (l * (dg + 1) + d) + part
                    M[offsets[a]:offsets[a] + 2 * width:2, j] = col.real
                    M[offsets[a] + 1:offsets[a] + 2 * width:2, j] = col.imag
    return RealLinearSystem(M, A_ops, B_ops, list(row_classes), list(col_orders), dg=dg, K=K, **meta)


def assemble(G: SymbolMatrix, profile: ConstraintProfile, dg: int = 32, K: int | None = None,
             output: str = "cofactor") -> RealLinearSystem:
    """Discretise ``f' -> 2 Re[conj(G) D f']`` with ``D = diag((1-zeta)**m_j)``.

    With ``output="cofactor"`` each row is divided by ``(1-zeta)**mu`` of its block
    (exact when the operator is well defined); otherwise, or when some entry
    breaks well-definedness, the raw real output is used.
    """
    N = G.n_rows
    if not G.is_square() or profile.size != N:
        raise ShapeError(f"profile {profile} does not fit a {G.shape} symbol")
    K = 2 * dg if K is None else K
    orders = profile.column_orders()
    notes = []
    well = not well_definedness_violations(G, profile)
    if output == "cofactor" and not well:
        notes.append("operator not well defined into the constrained target; using raw output")
    mu = orders if (output == "cofactor" and well) else [0] * N
    Gb = G.circle_conjugate()
    A_ops, B_ops, classes, shifts = [], [], [], []
    for a in range(N):
        ra, rb = [], []
        mp = mu[a] // 2
        for l in range(N):
            e = Gb[a, l]
            if e.is_zero():
                ra.append(LaurentPoly())
                rb.append(LaurentPoly())
                continue
            c = e * LaurentPoly.one_minus_zeta(orders[l])
            c = divide_by_one_minus_zeta(c, mu[a])
            ra.append(c.shift(mp))
            rb.append(c.conj_circle().shift(mp - mu[a]).scale((-1) ** mu[a]))
        A_ops.append(ra)
        B_ops.append(rb)
        classes.append("r1" if mu[a] % 2 else "r0")
        shifts.append(mp)
    return assemble_general(A_ops, B_ops, classes, orders, dg, K, row_shifts=shifts, row_orders=list(mu),
                            well_defined=well, notes=notes)


def assemble_kernel_problem(sign: int, l: int, m: int, dg: int = 32, K: int | None = None) -> RealLinearSystem:
    """Discretise ``f' -> f + sign * zeta**l conj(f)`` with ``f = (1-zeta)**m f'``."""
    K = 2 * dg + abs(l) + m if K is None else K
    w = LaurentPoly.one_minus_zeta(m)
    A = [[w]]
    B = [[w.conj_circle().shift(l).scale(sign)]]
    return assemble_general(A, B, ["full"], [m], dg, K, row_shifts=[0], row_orders=[0])


# ----------------------------------------------------------------------------
# Kernel and least squares
# ----------------------------------------------------------------------------

@dataclass
class KernelResult:
    dim: int
    basis: np.ndarray
    singular_values: np.ndarray
    threshold: float
    gap_ratio: float

    def to_dict(self):
        return {
            "dim": self.dim,
            "threshold": self.threshold,
            "gap_ratio": self.gap_ratio,
            "smallest_singular_values": self.singular_values[-max(self.dim + 2, 4):].tolist(),
        }


def numerical_kernel(system: RealLinearSystem, rel_tol: float = 1e-8) -> KernelResult:
    """Count singular values below ``rel_tol * sigma_max``; report the gap across the cut."""
    M = system.matrix
    if M.shape[0] < M.shape[1]:
        M = np.vstack([M, np.zeros((M.shape[1] - M.shape[0], M.shape[1]))])
    _, s, vt = np.linalg.svd(M, full_matrices=False)
    thr = rel_tol * s[0] if s.size and s[0] > 0 else 0.0
    null = s < thr if thr else np.ones_like(s, dtype=bool)
    k = int(np.count_nonzero(null))
    if 0 < k < s.size:
        gap = float(s[-k - 1] / max(s[-k], np.finfo(float).tiny))
    elif k == 0:
        gap = float(s[-1] / thr) if thr else np.inf
    else:
        gap = np.inf
    if gap < 10:
        warnings.warn(f"ill-separated singular values (gap ratio {gap:.3g})", IllSeparatedWarning, stacklevel=2)
    return KernelResult(k, vt[s.size - k:].copy(), s, float(thr), gap)


def rhs_targets(system: RealLinearSystem, rhs: Sequence[ConstrainedFunction], n: int = 4096):
    """Right-hand side in the system's row layout, plus its values on the grid."""
    if len(rhs) != len(system.A_ops):
        raise ShapeError(f"expected {len(system.A_ops)} right-hand side components, got {len(rhs)}")
    offsets, total = _row_layout(system.row_classes, system.K)
    b = np.zeros(total)
    vals = np.zeros((len(rhs), n), dtype=complex)
    z = grid(n)
    for a, phi in enumerate(rhs):
        mu = system.row_orders[a]
        if phi.m < mu:
            raise ShapeError(f"row {a}: right-hand side order {phi.m} below block order {mu}")
        core = phi.core
        if core.is_exact:
            p = core.laurent * LaurentPoly.one_minus_zeta(phi.m - mu)
            p = p.shift(system.row_shifts[a])
            lo, co = p.to_array()
            modes = np.arange(lo, lo + len(co))
            vals[a] = p(z) if not p.is_zero() else 0
        else:
            ks, co = fourier_coefficients(core.samples)
            co = np.convolve(co, LaurentPoly.one_minus_zeta(phi.m - mu).to_array()[1])
            modes = np.arange(ks[0], ks[0] + len(co)) + system.row_shifts[a]
            vals[a] = sum(c * z ** int(k) for k, c in zip(modes, co)) + 0 * z
        lo_mode = 0 if system.row_classes[a] in ("r0", "r1") else -system.K
        width = system.K - lo_mode + 1
        keep = (modes >= lo_mode) & (modes <= system.K)
        if np.any(np.abs(co[modes > system.K]) > 1e-14):
            raise BandwidthError(f"right-hand side row {a} exceeds K={system.K}")
        col = np.zeros(width, dtype=complex)
        col[modes[keep] - lo_mode] = co[keep]
        b[offsets[a]:offsets[a] + 2 * width:2] = col.real
        b[offsets[a] + 1:offsets[a] + 2 * width:2] = col.imag
    return b, vals


@dataclass
class SpectralSolution:
    dg: int
    cofactors: np.ndarray
    functions: np.ndarray
    residual: float
    coefficient_residual: float
    rank: int
    kernel_dim: int
    well_defined: bool

    def to_dict(self):
        return {
            "truncation": self.dg,
            "residual": self.residual,
            "coefficient_residual": self.coefficient_residual,
            "rank": self.rank,
            "kernel_dim": self.kernel_dim,
            "well_defined": self.well_defined,
            "functions": [
                [[float(c.real), float(c.imag)] for c in row] for row in self.functions
            ],
        }


def solve_ls(system: RealLinearSystem, rhs: Sequence[ConstrainedFunction], rel_tol: float = 1e-8,
             samples: int = 4096) -> SpectralSolution:
    """Minimum-norm least-squares solution; residual is a max over ``samples`` grid points."""
    b, vals = rhs_targets(system, rhs, samples)
    M = system.matrix
    u, s, vt = np.linalg.svd(M, full_matrices=False)
    keep = s >= rel_tol * s[0]
    x = vt[keep].T @ ((u[:, keep].T @ b) / s[keep])
    out = system.apply_on_grid(x, samples)
    residual = float(np.max(np.abs(out - vals)))
    coeff_res = float(np.linalg.norm(M @ x - b))
    rank = int(np.count_nonzero(keep))
    return SpectralSolution(system.dg, system.vector_to_cofactors(x), system.vector_to_functions(x), residual,
                            coeff_res, rank, M.shape[1] - rank, system.well_defined)


# ----------------------------------------------------------------------------
# Helpers for oracles
# ----------------------------------------------------------------------------

def rh_residual(G: SymbolMatrix, f_coeffs: np.ndarray, n: int = 4096) -> float:
    """``max |2 Re[conj(G) f]|`` on ``n`` grid points, ``f`` given by coefficients from degree 0."""
    z = grid(n)
    f_coeffs = np.atleast_2d(f_coeffs)
    fv = f_coeffs @ (z[None, :] ** np.arange(f_coeffs.shape[1])[:, None])
    Gv = G.evaluate(z)
    out = 2 * np.real(np.einsum("tab,bt->at", np.conj(Gv), fv))
    return float(np.max(np.abs(out)))


def exact_column_coeffs(f: SymbolMatrix) -> np.ndarray:
    """Dense ``(N, D)`` array of an exact column whose entries have no negative powers."""
    ents = [f[a, 0] for a in range(f.n_rows)]
    D = max((e.kmax + 1 for e in ents if not e.is_zero()), default=1)
    out = np.zeros((len(ents), D), dtype=complex)
    for a, e in enumerate(ents):
        if e.is_zero():
            continue
        if e.kmin < 0:
            raise ValueError("column has negative powers")
        lo, co = e.to_array()
        out[a, lo:lo + len(co)] = co
    return out


def kernel_dimension(G: SymbolMatrix, profile: ConstraintProfile, dgs: Sequence[int] = (32, 64),
                     rel_tol: float = 1e-8, output: str = "cofactor") -> dict:
    """Numerical kernel dimension at several truncations, with gap ratios."""
    res = {}
    for dg in dgs:
        kr = numerical_kernel(assemble(G, profile, dg, output=output), rel_tol)
        res[dg] = kr
    dims = [r.dim for r in res.values()]
    return {
        "dims": dict(zip(dgs, dims)),
        "stable": len(set(dims)) == 1,
        "gap_ratios": {dg: r.gap_ratio for dg, r in res.items()},
        "results": res,
    }
