"""Boolean degree-1 functions: enumeration, classification and nonnegative decompositions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .catalog import DomainTooLargeError
from .domain import Domain, bits, popcount
from .exact import EQ, LinearProgram, lp_solve, rref
from .kernels import span_filter
from .measures import (BooleanFunction, UnsupportedDomainError, annihilator, degree,
                       inclusion_links)

ENUMERATION_CAP = 1 << 25


# ---------------------------------------------------------------- enumeration


def _pivot_rows(d: Domain, k: int) -> tuple[np.ndarray, int, list[int]]:
    """Integer rows L*R of the RREF basis of the degree-<=k space, the scale L and pivot points."""
    links = inclusion_links(d, k)
    rows = [[(lk >> x) & 1 for x in range(d.size)] for lk in links]
    R, pivots = rref(rows)
    scale = 1
    for row in R:
        for v in row:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
    ints = np.array([[int(v * scale) for v in row] for row in R], dtype=object)
    return ints, scale, pivots


def enumerate_degree_at_most(d: Domain, k: int, method: str = "pivot") -> list[int]:
    """Value bitsets of every Boolean function of degree <= k, sorted.

    ``pivot`` fixes the values on the pivot points of an echelon basis and keeps the 0/1
    extensions; ``filter`` walks all 2^|D| candidates against the annihilator.
    """
    if method == "pivot":
        R, scale, _ = _pivot_rows(d, k)
        dim = R.shape[0]
        if (1 << dim) > ENUMERATION_CAP:
            raise DomainTooLargeError(1 << dim, ENUMERATION_CAP, "pivot assignments")
        small = np.abs(R).max(initial=0) * max(dim, 1) < (1 << 62)
        Rm = R.astype(np.int64) if small else R
        out = []
        chunk = 1 << min(dim, 14)
        for start in range(0, 1 << dim, chunk):
            idx = np.arange(start, min(start + chunk, 1 << dim), dtype=np.int64)
            A = ((idx[:, None] >> np.arange(dim, dtype=np.int64)[None, :]) & 1)
            V = A.astype(Rm.dtype) @ Rm if dim else np.zeros((len(idx), d.size), dtype=np.int64)
            ok = np.all((V == 0) | (V == scale), axis=1)
            for row in V[ok]:
                out.append(sum(1 << x for x in range(d.size) if row[x]))
        return sorted(out)
    if method == "filter":
        if (1 << d.size) > ENUMERATION_CAP or d.size > 63:
            raise DomainTooLargeError(1 << d.size, ENUMERATION_CAP, "candidate functions")
        N = annihilator(d, k)
        if N.dtype == object:
            if N.size and max(abs(int(v)) for v in N.flat) * d.size >= (1 << 62):
                raise DomainTooLargeError(1 << d.size, ENUMERATION_CAP, "candidate functions")
            N = N.astype(np.int64).reshape(N.shape[0], d.size)
        return [int(v) for v in span_filter(N, d.size)]
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class Degree1Class:
    tag: str
    params: tuple = ()
    verified: bool = True

    def to_json(self) -> dict:
        return {"tag": self.tag, "params": list(self.params), "verified": self.verified}


def _query_dependence(f: BooleanFunction, q: int) -> tuple[int, ...] | None:
    """Elements of query q on which f is 1, if f is a function of that query."""
    d = f.domain
    value: dict[int, int] = {}
    for i, p in enumerate(d.points):
        e = (p & q).bit_length() - 1
        if value.setdefault(e, f(i)) != f(i):
            return None
    return tuple(sorted(e for e, v in value.items() if v))


def triangle_indicator(d: Domain, tri: Sequence[int]) -> int:
    """Bitset of matchings containing an edge inside the vertex triple."""
    i, j, k = tri
    edges = {frozenset(e) for e in itertools.combinations((i, j, k), 2)}
    out = 0
    for x, p in enumerate(d.points):
        if any(frozenset(v[1] for v in lab) in edges for lab in d.label_set(p)):
            out |= 1 << x
    return out


def _is_pm2(d: Domain) -> bool:
    return d.spec is not None and d.spec.kind == "pm" and d.spec.params[1:] == (2,)


def classify_degree1(f: BooleanFunction) -> Degree1Class:
    d = f.domain
    if degree(f) > 1:
        raise ValueError("function has degree above 1")
    if f.is_constant():
        return Degree1Class("Constant", (f(0),))
    kind = d.spec.kind if d.spec is not None else None
    for qi, q in enumerate(d.queries):
        ones = _query_dependence(f, q)
        if ones is None:
            continue
        label = d.query_labels[qi]
        elems = tuple(d.labels[e] for e in ones)
        arg = int(label[label.index("(") + 1:-1]) if "(" in label else qi
        if kind == "sym":
            tag = "ColumnDictator" if label.startswith("pi^-1") else "RowDictator"
        elif _is_pm2(d):
            tag = "VertexMatchFunction"
        else:
            tag = "QueryFunction"
        return Degree1Class(tag, (arg, elems))
    if _is_pm2(d):
        vertices = range(1, 2 * d.spec.n + 1)
        for tri in itertools.combinations(vertices, 3):
            t = triangle_indicator(d, tri)
            if f.bits in (t, t ^ ((1 << d.size) - 1)):
                return Degree1Class("TriangleIndicator", (*tri, f.bits == t))
    return Degree1Class("Other", (f.bits,))


def sym_degree1_census(n: int) -> int:
    """Closed-form count of constants plus functions of a single pi(i) or pi^-1(j)."""
    return 2 + 2 * n * ((1 << n) - 2) - 2 * n * n


def single_query_functions(d: Domain) -> set[int]:
    """Direct enumeration of constants and functions of one query."""
    full = (1 << d.size) - 1
    out = {0, full}
    for q in d.queries:
        elems = list(bits(q))
        for sub in range(1 << len(elems)):
            chosen = sum(1 << elems[i] for i in range(len(elems)) if (sub >> i) & 1)
            out.add(sum(1 << x for x, p in enumerate(d.points) if p & chosen))
    return out


# ---------------------------------------------------------------- cut functions


@dataclass(frozen=True)
class CutValue:
    S: tuple[int, ...]
    delta: int
    d: int


def _edges(d: Domain, x: int) -> list[tuple[int, int]]:
    return [tuple(v[1] for v in lab) for lab in d.label_set(d.points[x])]


def cut_values(d: Domain, x: int, S: Sequence[int]) -> CutValue:
    if not _is_pm2(d):
        raise UnsupportedDomainError("cut functions are defined on perfect matchings")
    S = tuple(sorted(S))
    if len(S) % 2 == 0:
        raise ValueError("S must have odd size")
    if not 3 <= len(S) <= d.spec.n:
        raise ValueError("S must have size between 3 and n")
    inside = set(S)
    delta = sum(1 for a, b in _edges(d, x) if (a in inside) != (b in inside))
    if delta < 1 or (delta - 1) % 2:
        raise AssertionError(f"cut size {delta} violates the odd-set constraint")
    return CutValue(S, delta, (delta - 1) // 2)


def odd_sets(d: Domain) -> list[tuple[int, ...]]:
    n = d.spec.n
    return [S for k in range(3, n + 1, 2) for S in itertools.combinations(range(1, 2 * n + 1), k)]


# ---------------------------------------------------------------- nonnegative decompositions


@dataclass
class Decomposition:
    """f = sum of coefficient * feature; features are universe labels or ("d", S)."""

    features: list
    coefficients: list[Fraction]
    support: dict = field(default_factory=dict)

    def evaluate(self, d: Domain, x: int) -> Fraction:
        total = Fraction(0)
        for feat, c in zip(self.features, self.coefficients):
            if c:
                total += c * _feature_value(d, feat, x)
        return total


class InfeasibleDecomposition(ValueError):
    pass


def _feature_value(d: Domain, feat, x: int) -> int:
    if isinstance(feat, tuple) and feat and feat[0] == "d":
        return cut_values(d, x, feat[1]).d
    return (d.points[x] >> d.index[feat]) & 1


def nonneg_degree1_decompose(d: Domain, values: Sequence) -> Decomposition:
    """Nonnegative combination of the x_ij (and d_S on matchings) equal to ``values`` pointwise."""
    kind = d.spec.kind if d.spec is not None else None
    if kind != "sym" and not _is_pm2(d):
        raise UnsupportedDomainError("decompositions are implemented for S_n and perfect matchings")
    vals = [Fraction(v) for v in values]
    if len(vals) != d.size:
        raise ValueError("one value per point")
    if any(v < 0 for v in vals):
        raise ValueError("function must be nonnegative")
    features: list = list(d.labels)
    if kind != "sym":
        features += [("d", S) for S in odd_sets(d)]
    A = [[_feature_value(d, feat, x) for feat in features] for x in range(d.size)]
    lp = LinearProgram([-1] * len(features), A, [EQ] * d.size, vals)
    res = lp_solve(lp)
    if not res.optimal:
        raise InfeasibleDecomposition(f"no nonnegative decomposition ({res.status})")
    dec = Decomposition(features, list(res.x))
    dec.support = {str(f): c for f, c in zip(features, res.x) if c}
    if any(dec.evaluate(d, x) != vals[x] for x in range(d.size)):
        raise AssertionError("decomposition does not reproduce the function")
    return dec


def random_nonneg_degree1(d: Domain, rng: np.random.Generator, terms: int = 4) -> list[Fraction]:
    """A random nonnegative integer combination of universe indicators."""
    picks = rng.choice(len(d.labels), size=terms, replace=True)
    weights = rng.integers(1, 5, size=terms)
    out = [Fraction(0)] * d.size
    for e, w in zip(picks.tolist(), weights.tolist()):
        for x, p in enumerate(d.points):
            if (p >> e) & 1:
                out[x] += w
    return out


def triangle_event(d: Domain, tri: Sequence[int]) -> int:
    """Bitset of matchings with no edge inside the triple (d_S = 1); complement of the meet indicator."""
    return triangle_indicator(d, tri) ^ ((1 << d.size) - 1)


def triangle_identity_holds(d: Domain) -> bool:
    """On six vertices: (no edge inside 123) or edge 45 iff vertex 6 is matched into 123."""
    if not (_is_pm2(d) and d.spec.n == 3):
        raise UnsupportedDomainError("the identity is about matchings of six vertices")
    tri = triangle_event(d, (1, 2, 3))
    for x in range(d.size):
        edges = {frozenset(e) for e in _edges(d, x)}
        lhs = bool((tri >> x) & 1) or frozenset((4, 5)) in edges
        rhs = any(frozenset((v, 6)) in edges for v in (1, 2, 3))
        if lhs != rhs:
            return False
    return True


def degree1_report(d: Domain, method: str = "pivot") -> dict:
    """Enumerate, classify and tally the Boolean degree-<=1 functions."""
    funcs = enumerate_degree_at_most(d, 1, method)
    tally: dict[str, int] = {}
    others = []
    for fb in funcs:
        cls = classify_degree1(BooleanFunction(d, fb))
        tally[cls.tag] = tally.get(cls.tag, 0) + 1
        if cls.tag == "Other":
            others.append(fb)
    return {"count": len(funcs), "classes": tally, "other": others,
            "popcounts": sorted({popcount(f) for f in funcs})}
