"""Concrete domains: cubes, products, symmetric groups, hypermatchings and multislices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .domain import Domain, bits, permutation_group, point_permutation

KIND_ALIASES = {
    "cube": "cube",
    "prod": "product", "product": "product",
    "sym": "sym", "symmetric-group": "sym",
    "pm": "pm", "perfect-matching": "pm",
    "ms": "ms", "multislice": "ms",
}
SHORT = {"cube": "cube", "product": "prod", "sym": "sym", "pm": "pm", "ms": "ms"}

DEFAULT_POINT_CAP = 100_000
DEFAULT_UNIVERSE_CAP = 20_000


class SpecError(ValueError):
    pass


class DomainTooLargeError(ValueError):
    def __init__(self, estimate: int, cap: int, what: str = "points"):
        super().__init__(f"domain would have {estimate} {what}, above the cap {cap}")
        self.estimate = estimate
        self.cap = cap


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    params: tuple[int, ...]

    def __post_init__(self):
        kind = KIND_ALIASES.get(self.kind)
        if kind is None:
            raise SpecError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))
        p = self.params
        if kind in ("cube", "sym"):
            if len(p) != 1 or p[0] < 1:
                raise SpecError(f"{kind} takes one positive integer")
        elif kind == "product":
            if not p or any(m < 2 for m in p):
                raise SpecError("product needs every m_i >= 2")
        elif kind == "pm":
            if len(p) < 2 or p[0] < 2 or any(x < 1 for x in p[1:]) or sum(p[1:]) < 2:
                raise SpecError("pm needs n >= 2 and a partition lambda with |lambda| >= 2")
        elif kind == "ms":
            if len(p) < 2 or any(x < 1 for x in p):
                raise SpecError("multislice needs at least two positive parts")

    @classmethod
    def parse(cls, text: str) -> DomainSpec:
        try:
            kind, _, rest = text.strip().partition(":")
            params = tuple(int(x) for x in rest.split(",") if x.strip())
        except ValueError as exc:
            raise SpecError(f"cannot parse domain spec {text!r}") from exc
        return cls(kind, params)

    def __str__(self) -> str:
        return f"{SHORT[self.kind]}:{','.join(map(str, self.params))}"

    @property
    def n(self) -> int:
        k, p = self.kind, self.params
        if k in ("cube", "sym"):
            return p[0]
        if k == "product":
            return len(p)
        if k == "pm":
            return p[0]
        return sum(p)

    @property
    def lam(self) -> tuple[int, ...]:
        return self.params[1:] if self.kind == "pm" else self.params

    @property
    def is_symmetric_group(self) -> bool:
        return self.kind == "sym" or (self.kind == "pm" and self.params[1:] == (1, 1))

    @property
    def is_pms(self) -> bool:
        return self.kind == "pm" and self.params[1:] == (2,)


def as_spec(spec) -> DomainSpec:
    return spec if isinstance(spec, DomainSpec) else DomainSpec.parse(spec)


# ---------------------------------------------------------------- universes


def _pm_vertices(n: int, lam: tuple[int, ...]) -> list[tuple[int, int]]:
    return [(i + 1, j) for i, li in enumerate(lam) for j in range(1, li * n + 1)]


@lru_cache(maxsize=None)
def universe(spec: DomainSpec) -> tuple:
    """Sorted universe labels for a domain spec (element ids follow this order)."""
    k, p = spec.kind, spec.params
    if k == "cube":
        labs = [(i, v) for i in range(1, p[0] + 1) for v in (0, 1)]
    elif k == "product":
        labs = [(i + 1, v) for i, m in enumerate(p) for v in range(1, m + 1)]
    elif k == "sym":
        labs = [(i, j) for i in range(1, p[0] + 1) for j in range(1, p[0] + 1)]
    elif k == "pm":
        n, lam = p[0], p[1:]
        size = math.prod(math.comb(li * n, li) for li in lam)
        if size > DEFAULT_UNIVERSE_CAP:
            raise DomainTooLargeError(size, DEFAULT_UNIVERSE_CAP, "hyperedges")
        parts = [[(i + 1, j) for j in range(1, li * n + 1)] for i, li in enumerate(lam)]
        labs = [tuple(sorted(itertools.chain.from_iterable(c)))
                for c in itertools.product(*(itertools.combinations(pt, li) for pt, li in zip(parts, lam)))]
    else:
        labs = [(i, c) for i in range(1, sum(p) + 1) for c in range(1, len(p) + 1)]
    return tuple(sorted(labs))


@lru_cache(maxsize=None)
def _universe_index(spec: DomainSpec) -> dict:
    return {lab: i for i, lab in enumerate(universe(spec))}


def indicator(spec, labels: Iterable) -> int:
    """Bitset over the domain's universe ids for a collection of labels."""
    spec = as_spec(spec)
    idx = _universe_index(spec)
    out = 0
    for lab in labels:
        out |= 1 << idx[lab]
    return out


def estimate_points(spec) -> int:
    spec = as_spec(spec)
    k, p = spec.kind, spec.params
    if k == "cube":
        return 2 ** p[0]
    if k == "product":
        return math.prod(p)
    if k == "sym":
        return math.factorial(p[0])
    if k == "pm":
        n, lam = p[0], p[1:]
        num = math.prod(math.factorial(li * n) // math.factorial(li) ** n for li in lam)
        return num // math.factorial(n)
    total = math.factorial(sum(p))
    for x in p:
        total //= math.factorial(x)
    return total


# ---------------------------------------------------------------- construction


def _points(spec: DomainSpec) -> list[list]:
    k, p = spec.kind, spec.params
    if k == "cube":
        return [[(i + 1, v) for i, v in enumerate(w)] for w in itertools.product((0, 1), repeat=p[0])]
    if k == "product":
        return [[(i + 1, v) for i, v in enumerate(w)]
                for w in itertools.product(*(range(1, m + 1) for m in p))]
    if k == "sym":
        n = p[0]
        return [[(i + 1, pi[i]) for i in range(n)] for pi in itertools.permutations(range(1, n + 1))]
    if k == "pm":
        return _hypermatchings(p[0], p[1:])
    n = sum(p)
    out = []
    for w in _colorings(p):
        out.append([(i + 1, c) for i, c in enumerate(w)])
    return out


def _colorings(lam: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    n = sum(lam)
    counts = list(lam)

    def rec(prefix: list[int]):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(len(counts)):
            if counts[c]:
                counts[c] -= 1
                prefix.append(c + 1)
                yield from rec(prefix)
                prefix.pop()
                counts[c] += 1

    yield from rec([])


def _hypermatchings(n: int, lam: tuple[int, ...]) -> list[list]:
    parts = [[(i + 1, j) for j in range(1, li * n + 1)] for i, li in enumerate(lam)]
    out: list[list] = []

    def rec(free: list[list], edges: list):
        if not free[0]:
            out.append(list(edges))
            return
        v = free[0][0]
        rest0 = free[0][1:]
        for first in itertools.combinations(rest0, lam[0] - 1):
            others = [itertools.combinations(free[i], lam[i]) for i in range(1, len(lam))]
            for combo in itertools.product(*others):
                chosen = [v, *first]
                for c in combo:
                    chosen.extend(c)
                edge = tuple(sorted(chosen))
                cs = set(chosen)
                new_free = [[u for u in part if u not in cs] for part in free]
                edges.append(edge)
                rec(new_free, edges)
                edges.pop()

    rec([list(pt) for pt in parts], [])
    return out


def _queries(spec: DomainSpec) -> tuple[list[list], list[str]]:
    k, p = spec.kind, spec.params
    U = universe(spec)
    if k in ("cube", "product", "ms"):
        n = spec.n
        qs = [[lab for lab in U if lab[0] == i] for i in range(1, n + 1)]
        return qs, [f"x{i}" for i in range(1, n + 1)]
    if k == "sym":
        n = p[0]
        rows = [[(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
        cols = [[(i, j) for i in range(1, n + 1)] for j in range(1, n + 1)]
        return rows + cols, [f"pi({i})" for i in range(1, n + 1)] + [f"pi^-1({j})" for j in range(1, n + 1)]
    verts = _pm_vertices(p[0], p[1:])
    qs = [[e for e in U if v in e] for v in verts]
    return qs, [vertex_name(spec, v) for v in verts]


def vertex_name(spec: DomainSpec, v: tuple[int, int]) -> str:
    if len(spec.params) == 2:
        return f"mate({v[1]})"
    return f"mate({v[0]}.{v[1]})"


def build(spec, cap: int = DEFAULT_POINT_CAP) -> Domain:
    """Enumerate a catalog domain; refuses when the point count would exceed ``cap``."""
    spec = as_spec(spec)
    est = estimate_points(spec)
    if est > cap:
        raise DomainTooLargeError(est, cap)
    return _build_cached(spec)


@lru_cache(maxsize=64)
def _build_cached(spec: DomainSpec) -> Domain:
    pts = _points(spec)
    qs, qlabels = _queries(spec)
    d = Domain(universe(spec), pts, qs, query_labels=qlabels, name=str(spec), spec=spec)
    if d.size != estimate_points(spec):
        raise AssertionError(f"enumerated {d.size} points, expected {estimate_points(spec)}")
    return d


# ---------------------------------------------------------------- membership


def membership(spec, candidate: int) -> bool:
    """Structural test: is ``candidate`` (bitset over universe ids) a point? No enumeration."""
    spec = as_spec(spec)
    U = universe(spec)
    if candidate < 0 or candidate >> len(U):
        return False
    labs = [U[i] for i in bits(candidate)]
    k, p = spec.kind, spec.params
    if k in ("cube", "product", "ms"):
        n = spec.n
        coords = [lab[0] for lab in labs]
        if sorted(coords) != list(range(1, n + 1)):
            return False
        if k == "ms":
            counts = [0] * len(p)
            for _, c in labs:
                counts[c - 1] += 1
            return tuple(counts) == p
        return True
    if k == "sym":
        n = p[0]
        return (sorted(i for i, _ in labs) == list(range(1, n + 1))
                and sorted(j for _, j in labs) == list(range(1, n + 1)))
    verts = [v for e in labs for v in e]
    return sorted(verts) == sorted(_pm_vertices(p[0], p[1:]))


# ---------------------------------------------------------------- closed-form parameters


@dataclass(frozen=True)
class DomainParams:
    chunk: int
    max_degree: int
    conflict_bound: int | None  # None: unbounded
    bs_ratio_lb: Fraction | None
    sens_ratio_lb: Fraction | None


def parameter_table(spec) -> DomainParams:
    """Closed-form parameter values for a catalog kind (lower bounds for the ratios)."""
    spec = as_spec(spec)
    k, p = spec.kind, spec.params
    n = spec.n
    if k in ("cube", "product"):
        return DomainParams(1, 1, n, Fraction(1), Fraction(1))
    if k == "sym":
        return DomainParams(2, 2, n, Fraction(1, 3), Fraction(1, 3))
    if k == "pm":
        size = sum(p[1:])
        b = Fraction(1, size * (size - 1) + 1)
        bt = Fraction(1, 3) if size <= 2 else None
        if bt is not None and bt > b:
            b = bt
        return DomainParams(2, size, n, b, bt)
    lam = p
    bt = Fraction(1, 2) if len(lam) == 2 else Fraction(1, 3)
    return DomainParams(2, 1, min(lam) // 2, bt, bt)


# ---------------------------------------------------------------- symmetries


def automorphism_generators(spec) -> list[dict]:
    """Universe permutations preserving points and queries (a generating set)."""
    spec = as_spec(spec)
    k, p = spec.kind, spec.params
    U = universe(spec)
    gens: list[dict] = []
    if k in ("cube", "product"):
        ms = (2,) * p[0] if k == "cube" else p
        vals = [((0, 1) if k == "cube" else tuple(range(1, m + 1))) for m in ms]
        for i, vs in enumerate(vals):
            for a, b in ((vs[0], vs[1]), (vs[0], vs[-1])) if len(vs) > 2 else ((vs[0], vs[1]),):
                sw = {a: b, b: a}
                gens.append({(c, v): (c, sw.get(v, v)) if c == i + 1 else (c, v) for c, v in U})
        for i in range(len(ms) - 1):
            if ms[i] == ms[i + 1]:
                gens.append({(c, v): ((i + 2 if c == i + 1 else i + 1 if c == i + 2 else c), v) for c, v in U})
    elif k == "sym":
        n = p[0]
        for perm in _sn_generators(n):
            gens.append({(i, j): (perm[i], j) for i, j in U})
            gens.append({(i, j): (i, perm[j]) for i, j in U})
        gens.append({(i, j): (j, i) for i, j in U})
    elif k == "pm":
        n, lam = p[0], p[1:]
        for part, li in enumerate(lam, start=1):
            for perm in _sn_generators(li * n):
                vmap = {(part, j): (part, perm[j]) for j in range(1, li * n + 1)}
                gens.append({e: tuple(sorted(vmap.get(v, v) for v in e)) for e in U})
        for a in range(len(lam) - 1):
            if lam[a] == lam[a + 1]:
                def swap(v, a=a):
                    return (a + 2, v[1]) if v[0] == a + 1 else (a + 1, v[1]) if v[0] == a + 2 else v
                gens.append({e: tuple(sorted(swap(v) for v in e)) for e in U})
    else:
        n = sum(p)
        for perm in _sn_generators(n):
            gens.append({(i, c): (perm[i], c) for i, c in U})
        for a in range(len(p) - 1):
            if p[a] == p[a + 1]:
                gens.append({(i, c): (i, a + 2 if c == a + 1 else a + 1 if c == a + 2 else c) for i, c in U})
    return gens


def _sn_generators(n: int) -> list[dict]:
    if n < 2:
        return []
    swap = {i: i for i in range(1, n + 1)}
    swap[1], swap[2] = 2, 1
    cycle = {i: i % n + 1 for i in range(1, n + 1)}
    return [swap, cycle] if n > 2 else [swap]


def symmetry_group(d: Domain) -> list[tuple[int, ...]]:
    """All point permutations generated by the catalog symmetries of ``d``."""
    def build():
        if d.spec is None:
            return [tuple(range(d.size))]
        gens = [point_permutation(d, g) for g in automorphism_generators(d.spec)]
        return permutation_group(gens, d.size)
    return d.cached("symmetry_group", build)


def sym_as_pm_relabel(n: int) -> dict:
    """The pair relabelling (i, j) -> edge {(1, i), (2, j)}."""
    return {(i, j): ((1, i), (2, j)) for i in range(1, n + 1) for j in range(1, n + 1)}
