"""Maslov and partial indices, factorization checks and operator classification.

Partial indices are recovered from Toeplitz nullities.  If
``W = -conj(G)^{-1} G = Theta diag(zeta**k_i) conj(Theta)^{-1}`` then the
transpose ``W^T`` has the factorization with the anti-holomorphic factor on the
left, so the Toeplitz operator of ``zeta**(-j) W^T`` has complex nullity
``d(j) = sum_i max(j - k_i, 0)`` and ``#{k_i = j} = d(j+1) - 2 d(j) + d(j-1)``.

The nullities are not taken from finite sections: the rational symbol is split
into factors invertible inside and outside the disc, which turns ``d(j)`` into
the nullity of a finite polynomial divisibility problem (see :class:`_Reduced`).
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    BlockStructureError,
    ConsistencyError,
    FactorizationError,
    InconclusiveError,
    ShapeError,
)
from .laurent import (
    LaurentPoly,
    QI,
    SymbolMatrix,
    _exact_quotient,
    _monic_gcd,
    roots_with_multiplicity,
    vanishing_order_at_one,
    winding_number,
)
from .scalar import scalar_kernel_basis

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanConfig:
    rel_tol: float = 1e-8
    min_gap: float = 1e3


@dataclass(frozen=True)
class ConstraintProfile:
    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("empty profile")
        for n, m in self.blocks:
            if n <= 0 or m < 0:
                raise ValueError(f"bad block ({n}, {m})")

    @classmethod
    def parse(cls, text: str) -> "ConstraintProfile":
        """Parse ``"N1:m1,N2:m2,..."``."""
        try:
            blocks = tuple(tuple(int(x) for x in part.split(":")) for part in text.split(",") if part.strip())
        except ValueError:
            raise ValueError(f"cannot parse profile {text!r}") from None
        if any(len(b) != 2 for b in blocks):
            raise ValueError(f"cannot parse profile {text!r}")
        return cls(blocks)

    @classmethod
    def uniform(cls, n: int, m: int = 0) -> "ConstraintProfile":
        return cls(((n, m),))

    @property
    def size(self) -> int:
        return sum(n for n, _ in self.blocks)

    def column_orders(self) -> list[int]:
        return [m for n, m in self.blocks for _ in range(n)]

    def ranges(self) -> list[range]:
        out, off = [], 0
        for n, _ in self.blocks:
            out.append(range(off, off + n))
            off += n
        return out

    def __str__(self):
        return ",".join(f"{n}:{m}" for n, m in self.blocks)


@dataclass(frozen=True)
class FactorizationData:
    """``Theta`` holomorphic and invertible on the closed disc, plus the exponents."""

    Theta: SymbolMatrix
    kappas: tuple[int, ...]


@dataclass
class NullityScan:
    j_values: list[int]
    nullities: list[int]
    counts: dict[int, int]
    second_difference_sum: int
    min_gap: float

    def to_dict(self):
        return asdict(self)


@dataclass
class IndexReport:
    partial_indices: list[int]
    block_indices: list[list[int]]
    maslov: int
    onto: bool
    kernel_dim: int | str
    jet_order: int
    profile: str
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


# ----------------------------------------------------------------------------
# Maslov index
# ----------------------------------------------------------------------------

def maslov_index(G: SymbolMatrix) -> int:
    """Winding number of ``det(-conj(G)^{-1} G)``, i.e. twice that of ``det G``."""
    return 2 * winding_number(G.det())


def rh_symbol(G: SymbolMatrix) -> tuple[SymbolMatrix, LaurentPoly]:
    """Numerator and denominator of ``-conj(G)^{-1} G = num / conj(det G)``."""
    Gb = G.circle_conjugate()
    return (Gb.adjugate() @ G).scale(-1), Gb.det()


# ----------------------------------------------------------------------------
# Toeplitz nullity scan
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class _Reduced:
    """``zeta**(-j) W^T`` reduced to polynomial data.

    ``W^T = num^T / den`` with ``den = c zeta**w u_minus u_plus``; ``u_plus`` has its
    roots outside the disc and ``u_minus = prod(1 - alpha/zeta)`` its roots inside,
    both invertible on their side.  With ``num^T = zeta**nlo P`` the kernel of the
    Toeplitz operator is isomorphic to
    ``{q in C^N[zeta], deg q < s : P^{-1} q holomorphic in the disc}``,
    ``s = j + w - nlo``.  Since ``P^{-1} = -zeta**e Rhat / dhat`` with
    ``Rhat = conj(G)^T adj(G)^T`` and ``dhat = det conj(G) det G`` (both shifted to
    polynomials), holomorphy means ``Rhat q = 0`` modulo the monic polynomial
    ``mod`` collecting the roots of ``zeta**max(-e, 0) dhat`` in the open disc.
    """

    N: int
    nlo: int
    w: int
    R: np.ndarray        # (deg+1, N, N) coefficients of Rhat, ascending
    mod: np.ndarray      # monic modulus, ascending coefficients


def _reduce(G: SymbolMatrix) -> _Reduced:
    num, den = rh_symbol(G)
    nlo = min(e.kmin for r in num.rows for e in r if not e.is_zero())
    R = G.circle_conjugate().transpose() @ G.adjugate().transpose()
    delta = den * G.det()
    rlo = min(x.kmin for r in R.rows for x in r if not x.is_zero())
    e = nlo + rlo - delta.kmin
    # cancel the scalar factor common to delta and every entry of R, exactly
    R = R.map(lambda x: x.shift(-rlo))
    delta = delta.shift(-delta.kmin)
    g = delta
    for x in (x for r in R.rows for x in r if not x.is_zero()):
        if g.kmax == 0:
            break
        g = _monic_gcd(g, x)
    if g.kmax > 0:
        delta = _exact_quotient(delta, g)
        R = R.map(lambda x: _exact_quotient(x, g))
    C = R.to_numeric()[1]
    inside = [0j] * max(-e, 0)
    for r, mult in roots_with_multiplicity(delta):
        if abs(r) < 1:
            inside.extend([r] * mult)
    mod = np.poly(inside)[::-1] if inside else np.ones(1, dtype=complex)
    return _Reduced(G.n_rows, nlo, winding_number(den), C, mod)


def _remainders(mod: np.ndarray, top: int) -> np.ndarray:
    """Row ``p`` holds ``zeta**p mod mod`` in the basis ``1..zeta**(D-1)``."""
    D = len(mod) - 1
    out = np.zeros((top + 1, D), dtype=complex)
    for p in range(min(D, top + 1)):
        out[p, p] = 1
    for p in range(D, top + 1):
        prev = out[p - 1]
        # zeta * prev, then replace zeta**D by -sum mod[i] zeta**i
        nxt = np.concatenate([[0], prev[:-1]]) - prev[-1] * mod[:-1]
        out[p] = nxt
    return out


def _condition_matrix(red: _Reduced, s: int) -> np.ndarray:
    """Linear map ``q -> Rhat q mod mod``; columns ordered ``(l, k)``."""
    N, C = red.N, red.R
    D = len(red.mod) - 1
    if D == 0:
        return np.zeros((0, N * s), dtype=complex)
    rem = _remainders(red.mod, C.shape[0] - 1 + s - 1)
    M = np.zeros((N * D, N * s), dtype=complex)
    for k in range(s):
        # sum_p C[p] (zeta**(p+k) mod m): shape (N, N, D) -> rows (a, i), column (l, k)
        blk = np.einsum("pal,pi->ail", C, rem[k:k + C.shape[0]])
        for l in range(N):
            M[:, l * s + k] = blk[:, :, l].ravel()
    return M


def _nullity(A: np.ndarray, rel_tol: float, scale: float = 0.0) -> tuple[int, float]:
    """Nullity of ``A`` and the gap ratio around the rank cut.

    Singular values count toward the rank when above ``rel_tol * max(sigma_max, scale)``;
    ``scale`` guards against matrices that vanish up to rounding.
    """
    if A.shape[1] == 0:
        return 0, np.inf
    s = np.linalg.svd(A, compute_uv=False) if A.size else np.zeros(0)
    if s.size == 0 or s[0] <= rel_tol * scale:
        return A.shape[1], np.inf
    rank = int(np.count_nonzero(s >= rel_tol * max(s[0], scale)))
    gap = float(s[rank - 1] / s[rank]) if rank < s.size and s[rank] > 0 else np.inf
    return A.shape[1] - rank, gap


def toeplitz_nullity(G: SymbolMatrix, j: int, config: ScanConfig = ScanConfig(),
                     _red: _Reduced | None = None) -> tuple[int, float]:
    """Complex nullity of the Toeplitz operator of ``zeta**(-j) W^T`` and its rank gap."""
    red = _reduce(G) if _red is None else _red
    s = j + red.w - red.nlo
    if s <= 0:
        return 0, np.inf
    M = _condition_matrix(red, s)
    return _nullity(M, config.rel_tol, scale=float(np.abs(red.R).sum()) * 1e-8)


def scan_range(G: SymbolMatrix) -> tuple[int, int]:
    """Window of ``j`` guaranteed to contain every partial index, widened by ``N``.

    Indices of ``num / den`` lie between ``kmin(num) - kmax(den)`` and
    ``kmax(num) - kmin(den)``; the denominator's winding shifts them all.
    """
    num, den = rh_symbol(G)
    nz = [e for r in num.rows for e in r if not e.is_zero()]
    lo = min(e.kmin for e in nz) - den.kmax
    hi = max(e.kmax for e in nz) - den.kmin
    N = G.n_rows
    return lo - N, hi + N


def nullity_scan(G: SymbolMatrix, config: ScanConfig = ScanConfig()) -> NullityScan:
    if not G.is_square():
        raise ShapeError("symbol must be square")
    winding_number(G.det())  # raises on circle-singular symbols
    red = _reduce(G)
    lo, hi = scan_range(G)
    js = list(range(lo - 1, hi + 2))
    d, gaps = [], []
    for j in js:
        k, gap = toeplitz_nullity(G, j, config, red)
        d.append(k)
        gaps.append(gap)
    if min(gaps) < config.min_gap:
        worst = js[int(np.argmin(gaps))]
        raise InconclusiveError(
            f"rank cut not separated at j={worst} (gap {min(gaps):.3g})",
            {"j_values": js, "nullities": d, "gaps": gaps},
        )
    counts = {}
    total = 0
    for i in range(1, len(js) - 1):
        c = d[i + 1] - 2 * d[i] + d[i - 1]
        if c < 0:
            raise ConsistencyError(f"negative second difference {c} at j={js[i]}")
        if c:
            counts[js[i]] = c
        total += c
    return NullityScan(js, d, counts, total, float(min(gaps)))


def partial_indices(G: SymbolMatrix, config: ScanConfig = ScanConfig(), check: bool = True) -> list[int]:
    """Sorted partial indices of ``-conj(G)^{-1} G``."""
    scan = nullity_scan(G, config)
    out = sorted(j for j, c in scan.counts.items() for _ in range(c))
    if check:
        N = G.n_rows
        if len(out) != N:
            raise ConsistencyError(f"recovered {len(out)} indices for a {N}x{N} symbol")
        kappa = maslov_index(G)
        if sum(out) != kappa:
            raise ConsistencyError(f"sum of partial indices {sum(out)} != Maslov index {kappa}")
    return out


# ----------------------------------------------------------------------------
# Factorizations
# ----------------------------------------------------------------------------

def max_coeff_abs(M: SymbolMatrix) -> Fraction:
    best = Fraction(0)
    for r in M.rows:
        for e in r:
            for _, c in e.items():
                a = abs(c.re) + abs(c.im)
                if a > best:
                    best = a
    return best


def verify_factorization(G: SymbolMatrix, data: FactorizationData) -> tuple[bool, float]:
    """Exact check of ``-conj(G)^{-1} G conj(Theta) = Theta diag(zeta**k)``.

    Cleared of the inverse: ``-G conj(Theta) = conj(G) Theta diag(zeta**k)``.
    Also requires ``Theta`` holomorphic with ``det Theta`` zero-free on the closed disc.
    """
    N = G.n_rows
    T = data.Theta
    if T.shape != (N, N) or len(data.kappas) != N:
        raise ShapeError("factorization data does not match the symbol")
    lam = SymbolMatrix.diag([LaurentPoly.monomial(k) for k in data.kappas])
    lhs = (G @ T.circle_conjugate()).scale(-1)
    rhs = G.circle_conjugate() @ T @ lam
    defect = max_coeff_abs(lhs - rhs)
    ok = defect == 0 and _is_holomorphic_invertible(T)
    return ok, float(defect)


def _is_holomorphic_invertible(T: SymbolMatrix) -> bool:
    if any(not e.is_zero() and e.kmin < 0 for r in T.rows for e in r):
        return False
    d = T.det()
    if d.is_zero() or d.kmin != 0:
        return False
    try:
        return winding_number(d) == 0
    except Exception:
        return False


def verify_triple_product(target: SymbolMatrix, left: SymbolMatrix, kappas: Sequence[int],
                          right: SymbolMatrix) -> tuple[bool, float]:
    """Exact check of ``target = left diag(zeta**k) right``."""
    lam = SymbolMatrix.diag([LaurentPoly.monomial(k) for k in kappas])
    defect = max_coeff_abs(target - left @ lam @ right)
    return defect == 0, float(defect)


def rh_apply(G: SymbolMatrix, f: SymbolMatrix) -> SymbolMatrix:
    """``2 Re[conj(G) f]`` for a column ``f``, as a column of Laurent polynomials."""
    a = G.circle_conjugate() @ f
    return a + a.circle_conjugate()


def kernel_basis_from_factorization(G: SymbolMatrix, data: FactorizationData,
                                    profile: ConstraintProfile) -> list[SymbolMatrix]:
    """Exact real basis of ``ker 2 Re[conj(G) f]`` on the constrained space.

    With ``f = Theta g`` the kernel equation becomes ``g_i = zeta**k_i conj(g_i)``
    componentwise, each solved by :func:`scalar_kernel_basis`.
    """
    ok, defect = verify_factorization(G, data)
    if not ok:
        raise FactorizationError(f"factorization does not verify (defect {defect})")
    orders = profile.column_orders()
    if len(orders) != G.n_rows:
        raise ShapeError("profile size does not match symbol")
    if not _preserves_constraints(data.Theta, orders):
        raise FactorizationError("Theta does not preserve the constrained space")
    onto_ok = all(k >= m - 1 for k, m in zip(data.kappas, orders))
    if not onto_ok:
        raise FactorizationError("kernel basis only constructed in the onto case")
    N = G.n_rows
    basis = []
    for i, (k, m) in enumerate(zip(data.kappas, orders)):
        col = [data.Theta[a, i] for a in range(N)]
        for b in scalar_kernel_basis(-1, k, m):
            basis.append(SymbolMatrix([[c * b] for c in col]))
    return basis


def _preserves_constraints(T: SymbolMatrix, orders: Sequence[int]) -> bool:
    for M in (T, T.adjugate()):
        for a in range(M.n_rows):
            for i in range(M.n_cols):
                e = M[a, i]
                if not e.is_zero() and vanishing_order_at_one(e) + orders[i] < orders[a]:
                    return False
    return True


# ----------------------------------------------------------------------------
# Jets
# ----------------------------------------------------------------------------

def _falling(k: int, l: int) -> int:
    out = 1
    for t in range(l):
        out *= k - t
    return out


def jet_matrix(basis: Sequence, l0: int):
    """Real matrix of stacked jets ``(f(1), f'(1), ..., f^(l0)(1))`` and its rank.

    ``basis`` holds exact columns (:class:`SymbolMatrix`) or numeric coefficient
    arrays of shape ``(N, D)`` in the monomials ``zeta**0..zeta**(D-1)``.  Exact
    input gives an exact rank.
    """
    if not basis:
        return np.zeros((0, 0)), 0
    if isinstance(basis[0], SymbolMatrix):
        rows = []
        for f in basis:
            col = []
            for l in range(l0 + 1):
                for a in range(f.n_rows):
                    v = QI(0)
                    for k, c in f[a, 0].items():
                        v = v + c * _falling(k, l)
                    col.extend([v.re, v.im])
            rows.append(col)
        M = [list(r) for r in zip(*rows)]
        return np.array([[float(x) for x in r] for r in M]), _exact_rank(M)
    cols = []
    for arr in basis:
        arr = np.atleast_2d(arr)
        ks = np.arange(arr.shape[1])
        col = []
        for l in range(l0 + 1):
            w = np.array([_falling(int(k), l) for k in ks], dtype=float)
            jet = arr @ w
            col.extend(np.column_stack([jet.real, jet.imag]).ravel())
        cols.append(col)
    M = np.array(cols).T
    s = np.linalg.svd(M, compute_uv=False)
    rank = int(np.count_nonzero(s > 1e-8 * s[0])) if s.size and s[0] > 0 else 0
    return M, rank


def _exact_rank(M: list[list[Fraction]]) -> int:
    M = [list(r) for r in M]
    rank, rows = 0, len(M)
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(rows):
            if r != rank and M[r][c] != 0:
                f = M[r][c] / M[rank][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


# ----------------------------------------------------------------------------
# Classification
# ----------------------------------------------------------------------------

def block_triangular_violations(G: SymbolMatrix, profile: ConstraintProfile) -> list[tuple[int, int]]:
    """Nonzero entries below the diagonal blocks (row, col), 0-based."""
    ranges = profile.ranges()
    owner = [b for b, r in enumerate(ranges) for _ in r]
    return [(a, i) for a in range(G.n_rows) for i in range(G.n_cols)
            if owner[a] > owner[i] and not G[a, i].is_zero()]


def well_definedness_violations(G: SymbolMatrix, profile: ConstraintProfile) -> list[dict]:
    """Entries for which ``2 Re[conj(G) f]`` can leave the target class.

    Row ``a`` must vanish to order ``m(a)`` whenever column ``i`` carries order
    ``m(i)``; sufficient condition ``ord_1 G[a, i] + m(i) >= m(a)``.
    """
    orders = profile.column_orders()
    bad = []
    for a in range(G.n_rows):
        for i in range(G.n_cols):
            e = G[a, i]
            if e.is_zero():
                continue
            o = vanishing_order_at_one(e)
            if o + orders[i] < orders[a]:
                bad.append({"row": a, "col": i, "entry_order": int(o), "needed": orders[a] - orders[i]})
    return bad


def diagonal_blocks(G: SymbolMatrix, profile: ConstraintProfile) -> list[SymbolMatrix]:
    return [G.submatrix(list(r), list(r)) for r in profile.ranges()]


def classify(G: SymbolMatrix, profile: ConstraintProfile, config: ScanConfig = ScanConfig()) -> IndexReport:
    """Surjectivity verdict and kernel dimension for ``2 Re[conj(G) f]`` on the profile's space."""
    N = G.n_rows
    if not G.is_square() or profile.size != N:
        raise ShapeError(f"profile {profile} does not fit a {G.shape} symbol")
    viol = block_triangular_violations(G, profile)
    if viol:
        raise BlockStructureError("symbol is not upper block-triangular for this profile", viol)
    block_idx, scans = [], []
    for Gj in diagonal_blocks(G, profile):
        scan = nullity_scan(Gj, config)
        idx = sorted(j for j, c in scan.counts.items() for _ in range(c))
        if len(idx) != Gj.n_rows:
            raise ConsistencyError(f"block of size {Gj.n_rows} produced {len(idx)} indices")
        block_idx.append(idx)
        scans.append(scan)
    merged = [k for b in block_idx for k in b]
    kappa = sum(merged)
    maslov = maslov_index(G)
    wind = winding_number(G.det())
    onto = all(k >= m - 1 for b, (_, m) in zip(block_idx, profile.blocks) for k in b)
    kdim = kappa + N - sum(n * m for n, m in profile.blocks) if onto else "not-applicable"
    diagnostics = {
        "maslov_from_winding": maslov,
        "twice_winding_det": 2 * wind,
        "sum_partial_indices": kappa,
        "sum_matches_maslov": kappa == maslov,
        "second_difference_sums": [s.second_difference_sum for s in scans],
        "block_sizes": [n for n, _ in profile.blocks],
        "nullity_scans": [s.to_dict() for s in scans],
        "well_defined_violations": well_definedness_violations(G, profile),
    }
    diagnostics["well_defined"] = not diagnostics["well_defined_violations"]
    if kappa != maslov:
        raise ConsistencyError(f"sum of partial indices {kappa} != Maslov index {maslov}")
    return IndexReport(
        partial_indices=sorted(merged),
        block_indices=block_idx,
        maslov=maslov,
        onto=onto,
        kernel_dim=kdim,
        jet_order=max(merged),
        profile=str(profile),
        diagnostics=diagnostics,
    )
