"""Pseudo-characters, cube-inducing witnesses, t-good matrices and Hoffman checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .domain import Domain, bits, max_link_size, popcount
from .exact import nullspace, rank, symmetric_eigen
from .measures import (BooleanFunction, UnsupportedDomainError, annihilator, degree,
                       inclusion_links, level_dimension, sensitivity)


# ---------------------------------------------------------------- tableaux


def partitions(n: int, max_part: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of n in reverse lexicographic order."""
    max_part = n if max_part is None else max_part
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first, *rest))
    return out


@dataclass(frozen=True)
class Tabloid:
    """A filling of a Young diagram; e-functions only see the rows as (multi)sets."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def columns(self) -> list[list[int]]:
        return [[r[c] for r in self.rows if len(r) > c] for c in range(len(self.rows[0]))]

    def is_standard(self) -> bool:
        rows_ok = all(list(r) == sorted(r) and len(set(r)) == len(r) for r in self.rows)
        cols_ok = all(all(a < b for a, b in zip(col, col[1:])) for col in self.columns)
        return rows_ok and cols_ok

    def row_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(r)) for r in self.rows)


def _check_shape(shape: Sequence[int]) -> None:
    if not shape or any(a < b for a, b in zip(shape, shape[1:])) or min(shape) < 1:
        raise ValueError(f"{tuple(shape)} is not a partition")


def fillings(shape: Sequence[int], content: Sequence[int]) -> list[Tabloid]:
    """All fillings of ``shape`` by the multiset ``content`` (distinct fillings only)."""
    _check_shape(shape)
    if sum(shape) != len(content):
        raise ValueError("content size does not match the shape")
    seen = set()
    out = []
    for perm in itertools.permutations(sorted(content)):
        if perm in seen:
            continue
        seen.add(perm)
        rows, i = [], 0
        for k in shape:
            rows.append(tuple(perm[i:i + k]))
            i += k
        out.append(Tabloid(tuple(rows)))
    return out


def tabloids(shape: Sequence[int], content: Sequence[int]) -> list[Tabloid]:
    """Fillings up to reordering inside rows (one sorted representative each)."""
    reps = {Tabloid(t.row_sets()) for t in fillings(shape, content)}
    return sorted(reps, key=lambda t: t.rows)


def column_permutations(t: Tabloid):
    """(sign, permuted filling) for every product of per-column permutations."""
    cols = t.columns
    per_col = [list(itertools.permutations(range(len(c)))) for c in cols]
    for choice in itertools.product(*per_col):
        sign = 1
        rows = [list(r) for r in t.rows]
        for c, p in enumerate(choice):
            sign *= _perm_sign(p)
            for r, src in enumerate(p):
                rows[r][c] = cols[c][src]
        yield sign, Tabloid(tuple(tuple(r) for r in rows))


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------- points as combinatorial objects


def _kind(d: Domain) -> str:
    spec = d.spec
    if spec is None:
        raise UnsupportedDomainError("pseudo-characters need a catalog domain")
    if spec.kind == "sym":
        return "sym"
    if spec.kind == "ms":
        return "ms"
    if spec.kind == "pm" and spec.params[1:] == (2,):
        return "pm"
    raise UnsupportedDomainError(
        f"pseudo-characters are available for S_n, perfect matchings and multislices, not {spec}")


def point_arrays(d: Domain) -> np.ndarray:
    """sym: pi(i)-1 per i; ms: colour per coordinate; pm: mate of each vertex (0-based)."""
    def build():
        kind = _kind(d)
        rows = []
        for p in d.points:
            labs = d.label_set(p)
            if kind in ("sym", "ms"):
                rows.append([v - 1 if kind == "sym" else v for _, v in labs])
            else:
                mate = [0] * (2 * d.spec.n)
                for (_, a), (_, b) in labs:
                    mate[a - 1], mate[b - 1] = b - 1, a - 1
                rows.append(mate)
        return np.array(rows, dtype=np.int64)
    return d.cached("point_arrays", build)


# ---------------------------------------------------------------- pseudo-characters


@dataclass(frozen=True)
class PseudoCharacter:
    """``kind`` is "sym", "ms" or "pm". For pm, ``B`` is None.

    sym: columns of B are permuted; ms and pm: columns of A are permuted.
    """

    kind: str
    A: Tabloid
    B: Tabloid | None
    values: tuple[int, ...] = field(compare=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.A.shape

    @property
    def level(self) -> int:
        return character_level(self.kind, self.shape)

    @property
    def support(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if v]

    def normalized(self) -> tuple[int, ...]:
        g = 0
        for v in self.values:
            g = math.gcd(g, v)
        return tuple(v // g for v in self.values) if g else self.values


def _e_sym(P: np.ndarray, A: Tabloid, B: Tabloid) -> np.ndarray:
    ok = np.ones(P.shape[0], dtype=bool)
    for ra, rb in zip(A.rows, B.rows):
        img = np.zeros(P.shape[0], dtype=np.int64)
        for a in ra:
            img |= np.int64(1) << P[:, a - 1]
        ok &= img == sum(1 << (b - 1) for b in rb)
    return ok


def _e_ms(X: np.ndarray, A: Tabloid, B: Tabloid, base: int) -> np.ndarray:
    ok = np.ones(X.shape[0], dtype=bool)
    for ra, rb in zip(A.rows, B.rows):
        code = np.zeros(X.shape[0], dtype=np.int64)
        for a in ra:
            code += np.int64(base) ** X[:, a - 1]
        ok &= code == sum(base ** b for b in rb)
    return ok


def _e_pm(M: np.ndarray, A: Tabloid) -> np.ndarray:
    row = np.zeros(M.shape[1], dtype=np.int64)
    for r, entries in enumerate(A.rows):
        for v in entries:
            row[v - 1] = r
    return np.all(row[M] == row[None, :], axis=1)


def eval_e(d: Domain, A: Tabloid, B: Tabloid | None, x: int) -> int:
    """Row-mapping indicator at point index x."""
    kind = _kind(d)
    P = point_arrays(d)[x:x + 1]
    if kind == "sym":
        return int(_e_sym(P, A, B)[0])
    if kind == "ms":
        return int(_e_ms(P, A, B, d.spec.n + 1)[0])
    return int(_e_pm(P, A)[0])


def character_values(d: Domain, A: Tabloid, B: Tabloid | None) -> tuple[int, ...]:
    kind = _kind(d)
    P = point_arrays(d)
    _validate_pair(d, kind, A, B)
    total = np.zeros(d.size, dtype=np.int64)
    if kind == "sym":
        for sign, Bs in column_permutations(B):
            total += sign * _e_sym(P, A, Bs)
    elif kind == "ms":
        base = d.spec.n + 1
        for sign, As in column_permutations(A):
            total += sign * _e_ms(P, As, B, base)
    else:
        for sign, As in column_permutations(A):
            total += sign * _e_pm(P, As)
    return tuple(int(v) for v in total)


def _validate_pair(d: Domain, kind: str, A: Tabloid, B: Tabloid | None) -> None:
    n = d.spec.n
    _check_shape(A.shape)
    if kind == "pm":
        if B is not None:
            raise ValueError("perfect-matching characters take a single tabloid")
        if sorted(v for r in A.rows for v in r) != list(range(1, 2 * n + 1)):
            raise ValueError("tabloid must contain each vertex once")
        if any(k % 2 for k in A.shape):
            raise ValueError("perfect-matching tabloids have shape 2*lambda")
        return
    if B is None or A.shape != B.shape:
        raise ValueError("tabloid shapes differ")
    if sorted(v for r in A.rows for v in r) != list(range(1, n + 1)):
        raise ValueError("first tabloid must contain 1..n once each")
    want = sorted(v for r in B.rows for v in r)
    if kind == "sym" and want != list(range(1, n + 1)):
        raise ValueError("second tabloid must contain 1..n once each")
    if kind == "ms" and want != sorted(_ms_content(d.spec.params)):
        raise ValueError("second tabloid must have the multislice content")


def _ms_content(mu: Sequence[int]) -> list[int]:
    return [c for c, k in enumerate(mu, start=1) for _ in range(k)]


def pseudo_character(d: Domain, A: Tabloid, B: Tabloid | None = None) -> PseudoCharacter:
    kind = _kind(d)
    return PseudoCharacter(kind, A, B, character_values(d, A, B))


def eval_chi(c: PseudoCharacter, x: int) -> int:
    return c.values[x]


def character_level(kind: str, shape: Sequence[int]) -> int:
    n = sum(shape)
    if kind == "pm":
        return (n - shape[0]) // 2
    return n - shape[0]


def pseudo_char_family(d: Domain, deg: int) -> list[PseudoCharacter]:
    """Distinct nonzero pseudo-characters of every shape whose first row is >= n - deg."""
    kind = _kind(d)

    def build():
        n = d.spec.n
        found: dict[tuple[int, ...], PseudoCharacter] = {}
        for lam in partitions(n):
            if lam[0] < n - deg:
                continue
            if kind == "sym":
                pairs = [(A, B) for A in tabloids(lam, range(1, n + 1))
                         for B in fillings(lam, range(1, n + 1))]
            elif kind == "ms":
                content = _ms_content(d.spec.params)
                pairs = [(A, B) for B in tabloids(lam, content) for A in fillings(lam, range(1, n + 1))]
            else:
                shape = tuple(2 * k for k in lam)
                pairs = [(A, None) for A in fillings(shape, range(1, 2 * n + 1))]
            for A, B in pairs:
                vals = character_values(d, A, B)
                if any(vals) and vals not in found:
                    found[vals] = PseudoCharacter(kind, A, B, vals)
        return list(found.values())
    return d.cached(("pseudo_chars", deg), build)


def family_rank(d: Domain, deg: int) -> int:
    chars = pseudo_char_family(d, deg)
    return rank([list(c.values) for c in chars]) if chars else 0


def check_spanning(d: Domain, deg: int) -> tuple[int, int]:
    """(rank of the family, dimension of the degree-<=deg space); equal when spanning."""
    return family_rank(d, deg), level_dimension(d, deg)


# ---------------------------------------------------------------- inducing witnesses


@dataclass
class InducingWitness:
    dprime: int
    transpositions: list[tuple[int, int]]
    parts: list[tuple[int, ...]]      # point indices in cube order (bit i = transposition i)
    claimed: Fraction                 # the lower bound on dprime the construction promises
    candidates: int                   # size of the full column-pair set

    @property
    def meets_claim(self) -> bool:
        return self.dprime >= self.claimed


class InducingError(AssertionError):
    pass


def column_pairs(t: Tabloid) -> list[tuple[int, int]]:
    out = []
    for col in t.columns:
        for i in range(0, len(col) - 1, 2):
            out.append((col[i], col[i + 1]))
    return out


def _transposition_action(d: Domain, kind: str, a: int, b: int) -> list[int]:
    """Point-index permutation induced by the transposition (a b)."""
    out = []
    for p in d.points:
        labs = d.label_set(p)
        if kind == "sym":
            img = [(i, b if j == a else a if j == b else j) for i, j in labs]
        elif kind == "ms":
            img = [(b if i == a else a if i == b else i, c) for i, c in labs]
        else:
            def sw(v):
                return (v[0], b if v[1] == a else a if v[1] == b else v[1])
            img = [tuple(sorted((sw(u), sw(w)))) for u, w in labs]
        out.append(d.point_of(img))
    return out


def verify_inducing(d: Domain, c: PseudoCharacter) -> InducingWitness:
    """Largest set of column-pair transpositions embedding signed cubes in the support."""
    kind = c.kind
    source = c.B if kind == "sym" else c.A
    pairs = column_pairs(source)
    actions = [_transposition_action(d, kind, a, b) for a, b in pairs]
    chi = min(popcount(x & ~y) for x, y in itertools.combinations(d.points, 2))
    support = c.support
    level = character_level(kind, c.shape)
    claimed = Fraction(level) if kind == "pm" else Fraction(level, 2)
    for k in range(len(pairs), -1, -1):
        for subset in itertools.combinations(range(len(pairs)), k):
            parts = _cube_parts(d, c, [actions[i] for i in subset], support, chi)
            if parts is not None:
                return InducingWitness(k, [pairs[i] for i in subset], parts, claimed, len(pairs))
    raise InducingError("even the empty transposition set failed")


def _cube_parts(d: Domain, c: PseudoCharacter, acts: list[list[int]], support: list[int],
                chi: int) -> list[tuple[int, ...]] | None:
    vals = c.values
    k = len(acts)
    remaining = set(support)
    parts = []
    while remaining:
        x = min(remaining)
        cube = []
        for a in range(1 << k):
            y = x
            for i in range(k):
                if (a >> i) & 1:
                    y = acts[i][y]
            cube.append(y)
        if len(set(cube)) != len(cube) or not set(cube) <= remaining:
            return None
        for a in range(1 << k):
            pa = d.points[cube[a]]
            diffs = []
            for i in range(k):
                nb = cube[a ^ (1 << i)]
                if vals[nb] != -vals[cube[a]]:
                    return None
                diff = pa & ~d.points[nb]
                if popcount(diff) != chi:
                    return None
                diffs.append(diff)
            union = 0
            for df in diffs:
                if union & df:
                    return None
                union |= df
        remaining -= set(cube)
        parts.append(tuple(cube))
    return parts


@dataclass(frozen=True)
class DegreeWitness:
    character: PseudoCharacter
    correlation: int
    degree: int


def degree_witness(f: BooleanFunction) -> DegreeWitness:
    """A pseudo-character of level deg(f) correlating with f."""
    d = f.domain
    k = degree(f)
    kind = _kind(d)
    for c in pseudo_char_family(d, k):
        if character_level(kind, c.shape) != k:
            continue
        corr = sum(v for i, v in enumerate(c.values) if f(i))
        if corr:
            return DegreeWitness(c, corr, k)
    raise InducingError(f"no level-{k} pseudo-character correlates with the function")


def sensitivity_witness_bound(f: BooleanFunction) -> tuple[int, int, bool]:
    """(s(f), d' of the degree witness, s(f)^2 >= d')."""
    w = degree_witness(f)
    dp = verify_inducing(f.domain, w.character).dprime
    s = sensitivity(f)
    return s, dp, s * s >= dp


# ---------------------------------------------------------------- t-good matrices


@dataclass
class PropertyResult:
    passed: bool | None          # None: inconclusive
    detail: str = ""
    witness: object = None


@dataclass
class TGoodReport:
    t: int
    omega: Fraction
    properties: dict[int, PropertyResult]

    def passed(self, *which: int) -> bool:
        which = which or tuple(self.properties)
        return all(self.properties[i].passed for i in which)


def derangement_matrix(d: Domain) -> list[list[Fraction]]:
    """A(x, y) = [x, y disjoint] / (number of points disjoint from x)."""
    rows = []
    for p in d.points:
        nbrs = [not (p & q) for q in d.points]
        k = sum(nbrs)
        rows.append([Fraction(int(b), k) if k else Fraction(0) for b in nbrs])
    return rows


def _matvec(A: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * x for a, x in zip(row, v) if a and x), Fraction(0)) for row in A]


def verify_t_good(d: Domain, A: Sequence[Sequence], t: int, margin: float = 1e-6) -> TGoodReport:
    A = [[Fraction(x) for x in row] for row in A]
    N = d.size
    if len(A) != N or any(len(r) != N for r in A):
        raise ValueError("matrix must be square over the domain's points")
    L = max_link_size(d, t)
    omega = Fraction(L, N - L)
    props: dict[int, PropertyResult] = {}
    asym = next(((i, j) for i in range(N) for j in range(i) if A[i][j] != A[j][i]), None)
    props[1] = PropertyResult(asym is None, "" if asym is None else "asymmetric entry", asym)
    bad = next(((i, j) for i in range(N) for j in range(N)
                if A[i][j] and popcount(d.points[i] & d.points[j]) >= t), None)
    props[2] = PropertyResult(bad is None, "" if bad is None else "nonzero on a t-intersecting pair", bad)
    rs = next((i for i in range(N) if sum(A[i]) != 1), None)
    props[3] = PropertyResult(rs is None, "" if rs is None else "row sum differs from 1", rs)
    fail4 = None
    for lk in inclusion_links(d, t):
        v = [Fraction((lk >> i) & 1) for i in range(N)]
        mean = sum(v) / N
        v = [x - mean for x in v]
        if not any(v):
            continue
        if _matvec(A, v) != [-omega * x for x in v]:
            fail4 = lk
            break
    props[4] = PropertyResult(fail4 is None, "" if fail4 is None else "A v != -omega v", fail4)
    props[5] = _property5(d, A, t, omega, margin)
    return TGoodReport(t, omega, props)


def _property5(d: Domain, A, t: int, omega: Fraction, margin: float) -> PropertyResult:
    Nmat = annihilator(d, t)
    if Nmat.shape[0] == 0:
        return PropertyResult(True, "no functions of degree above t")
    basis = np.array(Nmat, dtype=float).T
    Q, _ = np.linalg.qr(basis)
    Af = np.array([[float(x) for x in row] for row in A])
    restricted = Q.T @ Af @ Q
    eig = symmetric_eigen((restricted + restricted.T) / 2, tol=1e-12)
    top = float(np.abs(eig.values).max())
    w = float(omega)
    if top < w - margin:
        return PropertyResult(True, f"max |lambda| = {top:.9f} < omega")
    W = [[Fraction(int(x)) for x in row] for row in Nmat.tolist()]
    hits = []
    for target in (omega, -omega):
        shifted = [[A[i][j] - (target if i == j else 0) for j in range(len(A))] for i in range(len(A))]
        prod = [[sum(shifted[i][m] * W[c][m] for m in range(len(A)) if shifted[i][m] and W[c][m])
                 for c in range(len(W))] for i in range(len(A))]
        for coeffs in nullspace(prod):
            hits.append((target, [sum(W[r][x] * coeffs[r] for r in range(len(W))) for x in range(len(A))]))
    if hits:
        found = sorted({str(h[0]) for h in hits})
        return PropertyResult(False, f"exact eigenvalue(s) {', '.join(found)} above degree t", hits)
    if top > w + margin:
        return PropertyResult(False, f"max |lambda| = {top:.9f} > omega")
    return PropertyResult(None, f"max |lambda| = {top:.9f} within {margin} of omega")


# ---------------------------------------------------------------- Hoffman checks


class FamilyError(ValueError):
    pass


@dataclass
class HoffmanReport:
    size: int
    quadratic_form: Fraction
    mu: Fraction
    bound: Fraction
    within: bool
    equality: bool
    degree: int | None


def _first_bad_pair(d: Domain, F: Sequence[int], G: Sequence[int], t: int):
    for x in F:
        for y in G:
            if popcount(d.points[x] & d.points[y]) < t:
                return x, y
    return None


def hoffman_check(d: Domain, A, family: Sequence[int], t: int,
                  report: TGoodReport | None = None) -> HoffmanReport:
    bad = _first_bad_pair(d, family, family, t)
    if bad is not None:
        raise FamilyError(f"family is not {t}-intersecting: points {bad}")
    report = verify_t_good(d, A, t) if report is None else report
    if not report.passed(1, 2, 3, 4):
        raise ValueError("matrix fails one of the first four t-good properties")
    members = set(family)
    f = [Fraction(1 if i in members else 0) for i in range(d.size)]
    Af = _matvec([[Fraction(x) for x in r] for r in A], f)
    q = sum(a * b for a, b in zip(f, Af))
    mu = Fraction(len(members), d.size)
    bound = report.omega / (1 + report.omega)
    eq = mu == bound
    deg = degree(BooleanFunction(d, sum(1 << i for i in members))) if eq else None
    return HoffmanReport(len(members), q, mu, bound, q == 0 and mu <= bound, eq, deg)


@dataclass
class CrossHoffmanReport:
    product: int
    bound_squared: int
    within: bool
    equality: bool
    same_family: bool
    degree: int | None


def hoffman_cross_check(d: Domain, F: Sequence[int], G: Sequence[int], t: int) -> CrossHoffmanReport:
    bad = _first_bad_pair(d, F, G, t)
    if bad is not None:
        raise FamilyError(f"families are not cross-{t}-intersecting: points {bad}")
    L = max_link_size(d, t)
    prod = len(set(F)) * len(set(G))
    eq = prod == L * L
    same = set(F) == set(G)
    deg = degree(BooleanFunction(d, sum(1 << i for i in set(F)))) if eq and same else None
    return CrossHoffmanReport(prod, L * L, prod <= L * L, eq, same, deg)


# ---------------------------------------------------------------- star lemma


@dataclass
class StarLemmaReport:
    t: int
    star: tuple[int, ...]
    checked: int
    low_degree: list[tuple[int, ...]]
    holds: bool


def star_lemma_check(d: Domain, t: int, samples: int = 4096, seed: int = 0) -> StarLemmaReport:
    """Subfamilies of the star {pi(i) = i for i <= t} with degree <= t must be empty or full."""
    if d.spec is None or d.spec.kind != "sym":
        raise UnsupportedDomainError("the star lemma check is for symmetric-group domains")
    from .batch import degrees, value_matrix
    fixed = Domain.mask(d.index[(i, i)] for i in range(1, t + 1))
    star = tuple(i for i, p in enumerate(d.points) if p & fixed == fixed)
    k = len(star)
    if k <= 20:
        subsets = range(1 << k)
    else:
        rng = np.random.default_rng(seed)
        extra = [int(x) for x in rng.integers(0, 1 << 62, size=samples)]
        full = (1 << k) - 1
        singles = [1 << i for i in range(k)] + [full ^ (1 << i) for i in range(k)]
        subsets = sorted({0, full, *singles, *(x & full for x in extra)})
    fb = []
    for s in subsets:
        fb.append(sum(1 << star[i] for i in bits(s)))
    arr = np.array(fb, dtype=np.uint64)
    degs = degrees(d, value_matrix(d, arr))
    low = [tuple(i for i in range(d.size) if (fb[j] >> i) & 1) for j in np.nonzero(degs <= t)[0].tolist()]
    ok = all(fam in ((), star) for fam in low)
    return StarLemmaReport(t, star, len(fb), low, ok)
