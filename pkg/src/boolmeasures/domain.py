"""Finite domains: equal-size subsets of a universe together with a query set.

Points, queries and faces are stored as integer bitsets over universe ids.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Sequence

from . import kernels


class DegenerateDomainError(ValueError):
    pass


class AtLeast(int):
    """An integer known only as a lower bound (search stopped at a limit)."""

    def __repr__(self) -> str:
        return f"AtLeast({int(self)})"

    def __str__(self) -> str:
        return f">={int(self)}"


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


def submasks(mask: int) -> Iterator[int]:
    """All submasks of mask, ordered by size then lexicographically on member ids."""
    members = list(bits(mask))
    for k in range(len(members) + 1):
        for combo in itertools.combinations(members, k):
            out = 0
            for e in combo:
                out |= 1 << e
            yield out


class Domain:
    """A set system with queries.

    ``labels`` are sorted so that element ids follow label order. Points are
    kept in canonical order: lexicographic on their sorted member-id lists.
    """

    def __init__(self, labels: Iterable[Hashable], points: Iterable[Iterable[Hashable]],
                 queries: Iterable[Iterable[Hashable]], query_labels: Sequence[str] | None = None,
                 name: str | None = None, spec=None):
        self.labels = tuple(sorted(set(labels)))
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("duplicate labels")
        pts = {tuple(sorted(self.index[x] for x in p)) for p in points}
        ordered = sorted(pts)
        self.point_members: tuple[tuple[int, ...], ...] = tuple(ordered)
        self.points: tuple[int, ...] = tuple(self.mask(ids) for ids in ordered)
        self.point_index = {p: i for i, p in enumerate(self.points)}
        self.queries: tuple[int, ...] = tuple(self.mask(self.index[x] for x in q) for q in queries)
        self.query_labels = tuple(query_labels) if query_labels is not None else tuple(
            f"q{i}" for i in range(len(self.queries)))
        self.n = len(ordered[0]) if ordered else 0
        self.name = name
        self.spec = spec
        self._cache: dict = {}

    @staticmethod
    def mask(ids: Iterable[int]) -> int:
        out = 0
        for i in ids:
            out |= 1 << i
        return out

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def universe_size(self) -> int:
        return len(self.labels)

    @property
    def all_points(self) -> int:
        return (1 << len(self.points)) - 1

    def __repr__(self) -> str:
        return f"Domain({self.name or 'custom'}, points={self.size}, universe={self.universe_size})"

    def label_set(self, mask: int) -> tuple:
        return tuple(self.labels[i] for i in bits(mask))

    def members(self, mask: int) -> tuple[int, ...]:
        return tuple(bits(mask))

    def point_of(self, labels: Iterable[Hashable]) -> int:
        """Index of the point with the given member labels."""
        m = self.mask(self.index[x] for x in labels)
        return self.point_index[m]

    # ------------------------------------------------------------ cached structure

    def cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def element_links(self) -> tuple[int, ...]:
        """For each element, the bitset of point indices containing it."""
        def build():
            links = [0] * self.universe_size
            for pi, members in enumerate(self.point_members):
                for e in members:
                    links[e] |= 1 << pi
            return tuple(links)
        return self.cached("element_links", build)

    def link_mask(self, face: int) -> int:
        """Bitset of point indices whose point contains ``face``."""
        out = self.all_points
        links = self.element_links
        for e in bits(face):
            out &= links[e]
            if not out:
                break
        return out

    @property
    def faces(self) -> dict[int, int]:
        """Every face (subset of some point) mapped to its link bitset."""
        def build():
            found: dict[int, int] = {}
            for p in self.points:
                for s in submasks(p):
                    if s not in found:
                        found[s] = self.link_mask(s)
            return found
        return self.cached("faces", build)

    def faces_of_size(self, k: int) -> list[int]:
        return sorted((f for f in self.faces if popcount(f) == k), key=lambda f: tuple(bits(f)))

    @property
    def query_of_element(self) -> tuple[tuple[int, ...], ...]:
        def build():
            out = [[] for _ in range(self.universe_size)]
            for qi, q in enumerate(self.queries):
                for e in bits(q):
                    out[e].append(qi)
            return tuple(tuple(x) for x in out)
        return self.cached("query_of_element", build)


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


def validate_domain(d: Domain) -> list[Violation]:
    report: list[Violation] = []
    for pi, p in enumerate(d.points):
        if popcount(p) != d.n:
            report.append(Violation("point-size", f"point {pi} has {popcount(p)} elements, expected {d.n}"))
    for qi, q in enumerate(d.queries):
        for pi, p in enumerate(d.points):
            k = popcount(p & q)
            if k != 1:
                report.append(Violation(
                    "one-intersection",
                    f"query {d.query_labels[qi]} meets point {d.label_set(p)} in {k} elements"))
    covered = 0
    for q in d.queries:
        covered |= q
    missing = ((1 << d.universe_size) - 1) & ~covered
    if missing:
        report.append(Violation("coverage", f"uncovered elements {list(d.label_set(missing))}"))
    return report


# ---------------------------------------------------------------- parameters


def distance(x: int, y: int) -> int:
    """|x \\ y| for equal-size points given as bitsets."""
    return popcount(x & ~y)


def ball(d: Domain, x: int, r: int) -> list[int]:
    return [p for p in d.points if distance(x, p) <= r]


def chunk_size(d: Domain) -> int:
    if d.size < 2:
        raise DegenerateDomainError("chunk size needs at least two points")
    return d.cached("chunk", lambda: min(
        distance(x, y) for x, y in itertools.combinations(d.points, 2)))


def max_degree_param(d: Domain) -> int:
    return max(len(qs) for qs in d.query_of_element)


def link(d: Domain, face: int) -> list[int]:
    lk = d.link_mask(face)
    return [d.points[i] for i in bits(lk)]


def max_link_size(d: Domain, t: int) -> int:
    if not 0 <= t <= d.n:
        raise ValueError("t must lie in 0..n")
    return max(popcount(d.faces[f]) for f in d.faces if popcount(f) == t)


def conflict_bound(d: Domain, limit: int | None = None) -> int:
    """Largest k such that conflicting faces of size <= k are always separated by a query.

    Returns ``AtLeast(limit)`` when no failure occurs up to ``limit``.
    """
    limit = d.n if limit is None else limit
    if limit > d.n:
        raise ValueError("limit must not exceed n")
    faces = sorted(d.faces.items(), key=lambda kv: popcount(kv[0]))
    by_size: dict[int, list[tuple[int, int]]] = {}
    for f, lk in faces:
        by_size.setdefault(popcount(f), []).append((f, lk))
    seen: list[tuple[int, int]] = list(by_size.get(0, []))
    for k in range(1, limit + 1):
        new = by_size.get(k, [])
        for f1, l1 in new:
            for f2, l2 in itertools.chain(seen, new):
                if l1 & l2:
                    continue
                if not _separated(d, f1, f2):
                    return k - 1
        seen.extend(new)
    return AtLeast(limit)


def _separated(d: Domain, c1: int, c2: int) -> bool:
    for q in d.queries:
        a, b = q & c1, q & c2
        if a and b and a != b:
            return True
    return False


@dataclass(frozen=True)
class RatioBound:
    value: Fraction
    exact: bool
    worst_pair: tuple[int, int] | None


RATIO_WARN_POINTS = 200


def _ratio(d: Domain, sensitive: bool, node_budget: int | None) -> RatioBound:
    if d.size < 2:
        raise DegenerateDomainError("ratios need at least two points")
    if d.size > RATIO_WARN_POINTS:
        warnings.warn(f"exhaustive ratio search over {d.size} points is quadratic in |points|",
                      stacklevel=3)
    chi = chunk_size(d)
    best: Fraction | None = None
    worst = None
    exact = True
    cache: dict[tuple[int, ...], tuple[int, bool]] = {}
    for x in d.points:
        for y in d.points:
            if x == y:
                continue
            dxy = x & ~y
            diffs = []
            for z in d.points:
                xz = x & ~z
                if xz & ~dxy == 0 and xz != dxy:
                    yz = y & ~z
                    if sensitive and popcount(yz) != chi:
                        continue
                    diffs.append(yz)
            key = tuple(sorted(diffs))
            if key not in cache:
                cache[key] = kernels.max_packing(key, node_budget)
            count, ok = cache[key]
            exact &= ok
            val = Fraction(count, popcount(dxy))
            if best is None or val < best:
                best, worst = val, (d.point_index[x], d.point_index[y])
    return RatioBound(best, exact, worst)


def sensitivity_ratio_lb(d: Domain, node_budget: int | None = None) -> RatioBound:
    """Exhaustive B-tilde: witnesses must additionally satisfy |y \\ z| = chunk."""
    return d.cached(("ratio", True, node_budget), lambda: _ratio(d, True, node_budget))


def block_sensitivity_ratio_lb(d: Domain, node_budget: int | None = None) -> RatioBound:
    return d.cached(("ratio", False, node_budget), lambda: _ratio(d, False, node_budget))


def same_size_conditions_agree(d: Domain) -> bool:
    """Check that |y \\ z| <= chunk and |y \\ z| = chunk select the same witnesses."""
    chi = chunk_size(d)
    return all(distance(y, z) >= chi for y, z in itertools.permutations(d.points, 2))


@dataclass(frozen=True)
class CompositionReport:
    composable: bool
    counterexample: tuple | None
    affine_criterion: bool
    affine_counterexample: tuple | None

    def __bool__(self) -> bool:
        return self.composable


def is_composable(d: Domain, max_blocks: int) -> CompositionReport:
    if max_blocks < 1:
        raise ValueError("max_blocks must be positive")
    point_set = set(d.points)
    counter = None
    for x in d.points:
        others = [y for y in d.points if y != x]

        def extend(start: int, used: int, zout: int, zin: int, depth: int, chosen: list[int]):
            nonlocal counter
            if counter is not None:
                return
            if chosen:
                z = (x & ~zout) | zin
                if z not in point_set:
                    counter = (x, tuple(chosen))
                    return
            if depth == max_blocks:
                return
            for j in range(start, len(others)):
                y = others[j]
                blk = x & ~y
                if blk & used:
                    continue
                extend(j + 1, used | blk, zout | blk, zin | (y & ~x), depth + 1, chosen + [y])

        extend(0, 0, 0, 0, 0, [])
        if counter is not None:
            break
    aff_ok, aff_counter = _affine_criterion(d)
    return CompositionReport(counter is None, counter, aff_ok, aff_counter)


def _affine_criterion(d: Domain) -> tuple[bool, tuple | None]:
    from .exact import in_column_span

    base = d.points[0]
    cols = []
    for p in d.points[1:]:
        cols.append([((p >> e) & 1) - ((base >> e) & 1) for e in range(d.universe_size)])
    mat = [list(r) for r in zip(*cols)] if cols else [[] for _ in range(d.universe_size)]
    point_set = set(d.points)
    for cand in _query_consistent_sets(d):
        if cand in point_set:
            continue
        diff = [((cand >> e) & 1) - ((base >> e) & 1) for e in range(d.universe_size)]
        if cols and in_column_span(mat, diff).member:
            return False, d.label_set(cand)
        if not cols and not any(diff):
            return False, d.label_set(cand)
    return True, None


def _query_consistent_sets(d: Domain) -> Iterator[int]:
    """Weight-n sets meeting every query exactly once."""
    qs = d.queries
    n = d.n

    def rec(i: int, chosen: int):
        if i == len(qs):
            if popcount(chosen) == n:
                yield chosen
            return
        q = qs[i]
        hit = q & chosen
        if hit:
            if popcount(hit) == 1:
                yield from rec(i + 1, chosen)
            return
        for e in bits(q):
            new = chosen | (1 << e)
            if popcount(new) > n:
                continue
            if any(popcount(qq & new) > 1 for qq in qs[:i]):
                continue
            yield from rec(i + 1, new)

    yield from rec(0, 0)


def check_disjoint_differences(d: Domain) -> tuple | None:
    """Return a counterexample to: disjoint x\\y_i implies disjoint y_i\\x (pairwise), else None."""
    for x in d.points:
        for y1, y2 in itertools.combinations([p for p in d.points if p != x], 2):
            if (x & ~y1) & (x & ~y2) == 0 and (y1 & ~x) & (y2 & ~x):
                return (x, y1, y2)
    return None


# ---------------------------------------------------------------- automorphisms


def point_permutation(d: Domain, element_map: dict) -> tuple[int, ...]:
    """Permutation of point indices induced by a label map (must preserve points and queries)."""
    emap = [d.index[element_map[lab]] for lab in d.labels]
    perm = []
    for members in d.point_members:
        image = Domain.mask(emap[e] for e in members)
        if image not in d.point_index:
            raise ValueError("label map does not preserve the point set")
        perm.append(d.point_index[image])
    qset = set(d.queries)
    for q in d.queries:
        if Domain.mask(emap[e] for e in bits(q)) not in qset:
            raise ValueError("label map does not preserve the query set")
    return tuple(perm)


def permutation_group(generators: Sequence[tuple[int, ...]], size: int, cap: int = 200000) -> list[tuple[int, ...]]:
    """Closure of point permutations under composition."""
    ident = tuple(range(size))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in generators:
                gh = tuple(h[i] for i in g)
                if gh not in group:
                    group.add(gh)
                    nxt.append(gh)
                    if len(group) > cap:
                        raise ValueError("automorphism group too large")
        frontier = nxt
    return sorted(group)
