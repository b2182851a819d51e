"""Exact rational linear algebra, an integer-pivoting simplex and a Jacobi eigensolver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Rat = Fraction


class BudgetExceeded(RuntimeError):
    """Raised when a search or pivot budget runs out."""


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class RatMatrix:
    """Dense matrix of Fractions."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self.rows = [[_frac(v) for v in r] for r in rows]
        self.nrows = len(self.rows)
        if self.rows:
            self.ncols = len(self.rows[0])
            if any(len(r) != self.ncols for r in self.rows):
                raise ValueError("ragged matrix")
        else:
            self.ncols = ncols or 0

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> RatMatrix:
        if not cols:
            return cls([[] for _ in range(nrows or 0)], 0)
        return cls([list(r) for r in zip(*cols)])

    def column(self, j: int) -> list[Fraction]:
        return [r[j] for r in self.rows]

    def transpose(self) -> RatMatrix:
        return RatMatrix.from_columns(self.rows, self.ncols) if self.rows else RatMatrix([], 0)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            cols = list(zip(*other.rows))
            return RatMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])
        vec = [_frac(v) for v in other]
        if len(vec) != self.ncols:
            raise ValueError("dimension mismatch")
        return [sum(a * b for a, b in zip(r, vec)) for r in self.rows]

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.rows == other.rows

    def __repr__(self) -> str:
        return f"RatMatrix({self.nrows}x{self.ncols})"

    def to_float(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.rows], dtype=float).reshape(self.nrows, self.ncols)


def _as_rows(m) -> list[list[Fraction]]:
    if isinstance(m, RatMatrix):
        return [list(r) for r in m.rows]
    return [[_frac(v) for v in r] for r in m]


def _integer_rows(rows: list[list[Fraction]]) -> list[list[int]]:
    out = []
    for r in rows:
        den = 1
        for v in r:
            den = math.lcm(den, v.denominator)
        out.append([int(v * den) for v in r])
    return out


def rank(m) -> int:
    """Rank via fraction-free (Bareiss) elimination on an integer-scaled copy."""
    a = _integer_rows(_as_rows(m))
    if not a or not a[0]:
        return 0
    nr, nc = len(a), len(a[0])
    r, prev = 0, 1
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        rowr = a[r]
        for i in range(r + 1, nr):
            ai = a[i]
            f = ai[c]
            for j in range(c + 1, nc):
                ai[j] = (ai[j] * p - f * rowr[j]) // prev
            ai[c] = 0
        prev = p
        r += 1
        if r == nr:
            break
    return r


def rref(m) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = _as_rows(m)
    nr = len(a)
    nc = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        rowr = a[r]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], rowr)]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a[:r], pivots


def nullspace(m) -> list[list[Fraction]]:
    """Basis of {v : m v = 0}."""
    rows = _as_rows(m)
    nc = len(rows[0]) if rows else (m.ncols if isinstance(m, RatMatrix) else 0)
    red, pivots = rref(rows) if rows else ([], [])
    free = [j for j in range(nc) if j not in set(pivots)]
    basis = []
    for fj in free:
        v = [Fraction(0)] * nc
        v[fj] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fj]
        basis.append(v)
    return basis


@dataclass
class SpanResult:
    member: bool
    witness: list[Fraction] | None = None

    def __bool__(self) -> bool:
        return self.member


def in_column_span(m, v: Sequence) -> SpanResult:
    """Decide whether v is a combination of m's columns; return exact coefficients if so."""
    rows = _as_rows(m)
    vec = [_frac(x) for x in v]
    if len(vec) != len(rows):
        raise ValueError("dimension mismatch")
    nc = len(rows[0]) if rows else 0
    aug = [r + [x] for r, x in zip(rows, vec)]
    red, pivots = rref(aug)
    if nc in pivots:
        return SpanResult(False)
    coef = [Fraction(0)] * nc
    for row, pc in zip(red, pivots):
        coef[pc] = row[nc]
    if [sum(a * c for a, c in zip(r, coef)) for r in rows] != vec:
        raise ArithmeticError("span witness failed to reproduce the vector")
    return SpanResult(True, coef)


def solve_square(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve a x = b for nonsingular square a."""
    n = len(a)
    red, pivots = rref([[_frac(x) for x in r] + [_frac(y)] for r, y in zip(a, b)])
    if pivots != list(range(n)):
        raise ArithmeticError("singular system")
    return [row[n] for row in red]


def integer_vector(v: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to a primitive integer vector."""
    den = 1
    for x in v:
        den = math.lcm(den, _frac(x).denominator)
    ints = [int(_frac(x) * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints] if g > 1 else ints


# ---------------------------------------------------------------- linear programming

LE, EQ, GE = "<=", "=", ">="


@dataclass
class LinearProgram:
    """max/min c.x subject to rows A x (rel) b and per-variable bounds.

    Bounds default to (0, None); None means unbounded on that side.
    """

    c: Sequence
    A: Sequence[Sequence]
    relations: Sequence[str]
    b: Sequence
    maximize: bool = True
    bounds: Sequence[tuple] | None = None

    def __post_init__(self):
        nv = len(self.c)
        if any(len(r) != nv for r in self.A):
            raise ValueError("constraint rows must match the objective length")
        if len(self.relations) != len(self.A) or len(self.b) != len(self.A):
            raise ValueError("one relation and right-hand side per row")
        if any(r not in (LE, EQ, GE) for r in self.relations):
            raise ValueError("relations must be <=, = or >=")
        if self.bounds is not None and len(self.bounds) != nv:
            raise ValueError("one bound pair per variable")


@dataclass
class StandardForm:
    """max c.x, A x = b, x >= 0 with b >= 0; produced from a LinearProgram."""

    A: list[list[Fraction]]
    b: list[Fraction]
    c: list[Fraction]
    var_map: list[list[tuple[int, int]]]  # original var -> [(column, sign)]
    offsets: list[Fraction]
    row_sign: list[int]
    n_structural: int
    n_original_rows: int


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | None = None
    x: list[Fraction] | None = None
    duals: list[Fraction] | None = None
    basis: tuple[int, ...] | None = None
    pivots: int = 0
    standard: StandardForm | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _standardize(lp: LinearProgram) -> StandardForm:
    nv = len(lp.c)
    bounds = list(lp.bounds) if lp.bounds is not None else [(0, None)] * nv
    var_map: list[list[tuple[int, int]]] = []
    offsets: list[Fraction] = []
    ncol = 0
    extra_rows: list[tuple[int, Fraction]] = []
    for lo, hi in bounds:
        if lo is not None:
            var_map.append([(ncol, 1)])
            offsets.append(_frac(lo))
            if hi is not None:
                if _frac(hi) < _frac(lo):
                    raise ValueError("empty variable bounds")
                extra_rows.append((ncol, _frac(hi) - _frac(lo)))
            ncol += 1
        elif hi is not None:
            var_map.append([(ncol, -1)])
            offsets.append(_frac(hi))
            ncol += 1
        else:
            var_map.append([(ncol, 1), (ncol + 1, -1)])
            offsets.append(Fraction(0))
            ncol += 2
    n_struct = ncol
    rows: list[list[Fraction]] = []
    rels: list[str] = []
    rhs: list[Fraction] = []
    for arow, rel, bi in zip(lp.A, lp.relations, lp.b):
        row = [Fraction(0)] * n_struct
        shift = Fraction(0)
        for j, a in enumerate(arow):
            a = _frac(a)
            if not a:
                continue
            shift += a * offsets[j]
            for col, sg in var_map[j]:
                row[col] += a * sg
        rows.append(row)
        rels.append(rel)
        rhs.append(_frac(bi) - shift)
    for col, cap in extra_rows:
        row = [Fraction(0)] * n_struct
        row[col] = Fraction(1)
        rows.append(row)
        rels.append(LE)
        rhs.append(cap)
    n_slack = sum(1 for r in rels if r != EQ)
    total = n_struct + n_slack
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    row_sign: list[int] = []
    k = n_struct
    for row, rel, bi in zip(rows, rels, rhs):
        full = row + [Fraction(0)] * n_slack
        if rel == LE:
            full[k] = Fraction(1)
            k += 1
        elif rel == GE:
            full[k] = Fraction(-1)
            k += 1
        sign = 1
        if bi < 0:
            full = [-v for v in full]
            bi = -bi
            sign = -1
        A.append(full)
        b.append(bi)
        row_sign.append(sign)
    csign = 1 if lp.maximize else -1
    c = [Fraction(0)] * total
    for j, cj in enumerate(lp.c):
        for col, sg in var_map[j]:
            c[col] += csign * _frac(cj) * sg
    return StandardForm(A, b, c, var_map, offsets, row_sign, n_struct, len(lp.A))


def _pivot(T: list[list[int]], z: list[int], r: int, c: int, det: int) -> int:
    rowr = T[r]
    if rowr[c] < 0:
        rowr[:] = [-v for v in rowr]
    p = rowr[c]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[c]
        if f:
            row[:] = [(v * p - f * w) // det for v, w in zip(row, rowr)]
        else:
            row[:] = [(v * p) // det for v in row]
    f = z[c]
    z[:] = [(v * p - f * w) // det for v, w in zip(z, rowr)]
    return p


def _run_simplex(T, z, basis, det, allowed, pivots, max_pivots):
    """Bland's rule on an integer tableau; returns (status, det, pivots)."""
    width = len(z) - 1
    while True:
        enter = next((j for j in range(width) if allowed[j] and z[j] < 0), None)
        if enter is None:
            return "optimal", det, pivots
        best = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                if best is None:
                    best = i
                    continue
                lhs = row[-1] * T[best][enter]
                rhs = T[best][-1] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[best]):
                    best = i
        if best is None:
            return "unbounded", det, pivots
        if max_pivots is not None and pivots >= max_pivots:
            raise BudgetExceeded(f"simplex exceeded {max_pivots} pivots")
        det = _pivot(T, z, best, enter, det)
        basis[best] = enter
        pivots += 1


def lp_solve(lp: LinearProgram, max_pivots: int | None = None) -> LPResult:
    """Two-phase exact simplex with Bland's anti-cycling rule.

    The tableau is kept in integers (fraction-free pivoting); duals are
    recovered from the final basis with rational arithmetic.
    """
    std = _standardize(lp)
    m = len(std.A)
    ncol = len(std.c)
    T: list[list[int]] = []
    basis: list[int] = []
    art_rows = []
    n_art = 0
    for i, (row, bi) in enumerate(zip(std.A, std.b)):
        den = bi.denominator
        for v in row:
            den = math.lcm(den, v.denominator)
        irow = [int(v * den) for v in row]
        slack = next((j for j in range(std.n_structural, ncol) if row[j] == 1 and all(
            std.A[k][j] == 0 for k in range(m) if k != i)), None)
        if slack is not None:
            irow[slack] = 1  # rescaled slack variable
            basis.append(slack)
        else:
            basis.append(ncol + n_art)
            art_rows.append(i)
            n_art += 1
        T.append(irow + [int(bi * den)])
    width = ncol + n_art
    for i, row in enumerate(T):
        rhs = row.pop()
        row.extend([0] * n_art)
        row.append(rhs)
    for k, i in enumerate(art_rows):
        T[i][ncol + k] = 1
    slack_scale = {}
    for i, bcol in enumerate(basis):
        if bcol < ncol:
            den = std.b[i].denominator
            for v in std.A[i]:
                den = math.lcm(den, v.denominator)
            slack_scale[bcol] = den
    det = 1
    pivots = 0
    allowed = [True] * width
    if n_art:
        z = [0] * (width + 1)
        for i in art_rows:
            for j in range(width + 1):
                z[j] -= T[i][j]
        for k in range(n_art):
            z[ncol + k] = 0
        status, det, pivots = _run_simplex(T, z, basis, det, allowed, pivots, max_pivots)
        if z[-1] != 0:
            return LPResult("infeasible", pivots=pivots, standard=std)
        for i in range(len(T) - 1, -1, -1):
            if basis[i] >= ncol:
                col = next((j for j in range(ncol) if T[i][j] != 0), None)
                if col is None:
                    del T[i]
                    del basis[i]
                    continue
                det = _pivot(T, z, i, col, det)
                basis[i] = col
                pivots += 1
        for row in T:
            del row[ncol:width]
        width = ncol
        allowed = [True] * width
    # phase 2 objective, scaled to integers
    cden = 1
    for v in std.c:
        cden = math.lcm(cden, v.denominator)
    cint = [int(v * cden) for v in std.c]
    cint_basis = []
    for bcol in basis:
        cb = cint[bcol]
        if bcol in slack_scale and cb:
            raise AssertionError("slack columns carry no cost")
        cint_basis.append(cb)
    z = [-cj * det for cj in cint] + [0]
    for cb, row in zip(cint_basis, T):
        if cb:
            for j in range(width + 1):
                z[j] += cb * row[j]
    status, det, pivots = _run_simplex(T, z, basis, det, allowed, pivots, max_pivots)
    if status == "unbounded":
        return LPResult("unbounded", pivots=pivots, standard=std)
    xs = [Fraction(0)] * ncol
    for i, bcol in enumerate(basis):
        val = Fraction(T[i][-1], det)
        if bcol in slack_scale:
            val /= slack_scale[bcol]
        xs[bcol] = val
    x = []
    for j, cols in enumerate(std.var_map):
        x.append(std.offsets[j] + sum(sg * xs[col] for col, sg in cols))
    value = sum(_frac(cj) * xj for cj, xj in zip(lp.c, x))
    duals = _duals(std, basis, lp.maximize)
    return LPResult("optimal", value, x, duals, tuple(basis), pivots, std)


def _duals(std: StandardForm, basis: list[int], maximize: bool) -> list[Fraction]:
    m = len(std.A)
    rows_used = _basis_rows(std, basis)
    B = [[std.A[i][col] for i in rows_used] for col in basis]  # B^T
    cb = [std.c[col] for col in basis]
    y_part = solve_square(B, cb) if basis else []
    y = [Fraction(0)] * m
    for i, v in zip(rows_used, y_part):
        y[i] = v
    sign = 1 if maximize else -1
    return [sign * std.row_sign[i] * y[i] for i in range(std.n_original_rows)]


def _basis_rows(std: StandardForm, basis: list[int]) -> list[int]:
    """Rows of A on which the basis columns are nonsingular (redundant rows dropped)."""
    m = len(std.A)
    if len(basis) == m:
        return list(range(m))
    cols = [[std.A[i][c] for c in basis] for i in range(m)]
    chosen: list[int] = []
    for i in range(m):
        if rank([cols[k] for k in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == len(basis):
            break
    return chosen


def verify_basis(std: StandardForm, basis: Sequence[int]) -> bool:
    """Independently check that a basis is primal and dual feasible (hence optimal)."""
    basis = list(basis)
    rows = _basis_rows(std, basis)
    Bm = [[std.A[i][c] for c in basis] for i in rows]
    try:
        xb = solve_square(Bm, [std.b[i] for i in rows])
    except ArithmeticError:
        return False
    if any(v < 0 for v in xb):
        return False
    x = [Fraction(0)] * len(std.c)
    for c, v in zip(basis, xb):
        x[c] = v
    for row, bi in zip(std.A, std.b):
        if sum(a * xv for a, xv in zip(row, x)) != bi:
            return False
    y = solve_square([list(r) for r in zip(*Bm)], [std.c[c] for c in basis])
    yfull = dict(zip(rows, y))
    for j in range(len(std.c)):
        red = sum(yfull.get(i, 0) * std.A[i][j] for i in range(len(std.A))) - std.c[j]
        if red < 0:
            return False
    return True


# ---------------------------------------------------------------- eigenvalues


@dataclass
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray
    residual: float
    sweeps: int


def symmetric_eigen(m, tol: float = 1e-12, max_sweeps: int = 100) -> EigenResult:
    """Cyclic Jacobi rotations; eigenvalues returned in ascending order."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if not np.allclose(a, a.T, atol=tol * scale):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2
    orig = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                rot_p = a[:, p].copy()
                rot_q = a[:, q].copy()
                a[:, p] = c * rot_p - s * rot_q
                a[:, q] = s * rot_p + c * rot_q
                rot_p = a[p, :].copy()
                rot_q = a[q, :].copy()
                a[p, :] = c * rot_p - s * rot_q
                a[q, :] = s * rot_p + c * rot_q
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    vals, v = vals[order], v[:, order]
    residual = float(np.abs(orig @ v - v * vals).max(initial=0.0))
    return EigenResult(vals, v, residual, sweeps)
