"""t-intersecting families: checks, intersection bounds, covering construction, maximum search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .domain import Domain, bits, max_link_size, popcount
from .exact import BudgetExceeded
from .measures import BooleanFunction, certificate_at, certificate_complexity


def _members(family: Iterable[int]) -> list[int]:
    return sorted(set(int(i) for i in family))


def intersection_sizes(d: Domain) -> np.ndarray:
    def build():
        P = np.array([[(p >> e) & 1 for e in range(len(d.labels))] for p in d.points], dtype=np.int32)
        return P @ P.T
    return d.cached("intersection_sizes", build)


def first_violation(d: Domain, F: Iterable[int], G: Iterable[int], t: int) -> tuple[int, int] | None:
    F, G = _members(F), _members(G)
    if not F or not G:
        return None
    M = intersection_sizes(d)[np.ix_(F, G)]
    bad = np.argwhere(M < t)
    if bad.size == 0:
        return None
    i, j = bad[0]
    return F[i], G[j]


def is_t_intersecting(d: Domain, F: Iterable[int], t: int) -> bool:
    return first_violation(d, F, F, t) is None


def are_cross_t_intersecting(d: Domain, F: Iterable[int], G: Iterable[int], t: int) -> bool:
    return first_violation(d, F, G, t) is None


def link_family(d: Domain, face: int) -> list[int]:
    lk = d.faces.get(face, 0)
    return list(bits(lk))


def star(d: Domain, labels: Sequence) -> list[int]:
    """Points containing all the given universe labels."""
    return link_family(d, Domain.mask(d.index[x] for x in labels))


# ---------------------------------------------------------------- intersection bound


@dataclass(frozen=True)
class IntersectionBound:
    """``value`` is None when no counterexample exists with |C| <= limit."""

    t: int
    limit: int
    value: int | None
    counterexample: tuple[int, int] | None = None   # (point index, partial input mask)

    @property
    def unbounded(self) -> bool:
        return self.value is None

    def at_least(self, k: int) -> bool:
        return self.value is None and k <= self.limit or self.value is not None and k <= self.value


def intersection_bound(d: Domain, t: int, limit: int | None = None) -> IntersectionBound:
    """Largest k <= limit with no (x, C), |C| <= k, where x t-meets every extension of C yet |x & C| < t."""
    limit = d.n if limit is None else limit
    M = intersection_sizes(d)
    faces = sorted((f for f in d.faces if popcount(f) <= limit), key=lambda f: (popcount(f), f))
    for C in faces:
        ext = list(bits(d.faces[C]))
        if not ext:
            continue
        meets_all = M[:, ext].min(axis=1) >= t
        for x in np.nonzero(meets_all)[0].tolist():
            if popcount(d.points[x] & C) < t:
                return IntersectionBound(t, limit, popcount(C) - 1, (x, C))
    return IntersectionBound(t, limit, None)


# ---------------------------------------------------------------- covering construction


class PremiseError(ValueError):
    pass


@dataclass
class CoveringResult:
    outcome: str                   # "contained" or "cover"
    C: int
    link_face: int | None = None
    certificate: int | None = None
    cover: list[int] = field(default_factory=list)        # (t+1)-faces
    witnesses: dict = field(default_factory=dict)         # S -> (x_S, B_S)
    bound: int | None = None
    covered: bool = True
    within_bound: bool = True


def contained_in_t_link(d: Domain, F: Sequence[int], t: int) -> int | None:
    if not F:
        return None
    common = (1 << d.universe_size) - 1
    for x in F:
        common &= d.points[x]
    if popcount(common) < t:
        return None
    return Domain.mask(list(bits(common))[:t])


def covering_construction(d: Domain, F1: Iterable[int], F2: Iterable[int], t: int) -> CoveringResult:
    F1, F2 = _members(F1), _members(F2)
    bad = first_violation(d, F1, F2, t)
    if bad is not None:
        raise PremiseError(f"families are not cross-{t}-intersecting: points {bad}")
    f1 = BooleanFunction(d, sum(1 << i for i in F1))
    C = certificate_complexity(f1).C
    ib = intersection_bound(d, t, limit=C)
    if not ib.at_least(C):
        raise PremiseError(f"C(f1) = {C} exceeds the intersection bound {ib.value}")
    face = contained_in_t_link(d, F1, t)
    if face is not None:
        return CoveringResult("contained", C, link_face=face)
    A = certificate_at(f1, F1[0]).members
    a_elems = list(bits(A))
    if len(a_elems) < t:
        raise AssertionError("certificate smaller than t although F2 is nonempty")
    cover: list[int] = []
    witnesses = {}
    for S_elems in itertools.combinations(a_elems, t):
        S = Domain.mask(S_elems)
        x_S = next(x for x in F1 if d.points[x] & S != S)
        B = certificate_at(f1, x_S).members
        witnesses[S] = (x_S, B)
        for e in bits(B & ~S):
            face = S | (1 << e)
            if face not in cover:
                cover.append(face)
    union = 0
    for face in cover:
        union |= d.faces.get(face, 0)
    covered = all((union >> x) & 1 for x in F2)
    bound = comb(C, t) * C * max_link_size(d, t + 1)
    return CoveringResult("cover", C, certificate=A, cover=cover, witnesses=witnesses,
                          bound=bound, covered=covered, within_bound=len(F2) <= bound)


def uniqueness_premise(d: Domain, c_hat: int, t: int) -> bool:
    """Whether c_hat * binom(c_hat, t) * L_{t+1} < L_t."""
    return c_hat * comb(c_hat, t) * max_link_size(d, t + 1) < max_link_size(d, t)


# ---------------------------------------------------------------- maximum families


@dataclass
class MaxFamily:
    size: int
    upper: int
    maximizer: list[int]
    all_maximizers: list[list[int]] | None
    exact: bool
    nodes: int


def _color_sort(adj: list[int], cand: int) -> tuple[list[int], list[int]]:
    """Greedy colouring; returns vertices and colour numbers in non-decreasing colour order."""
    order, colors = [], []
    color = 0
    rest = cand
    while rest:
        color += 1
        avail = rest
        while avail:
            v = (avail & -avail).bit_length() - 1
            avail &= ~(1 << v)
            avail &= ~adj[v]
            rest &= ~(1 << v)
            order.append(v)
            colors.append(color)
    return order, colors


def max_clique(adj: list[int], enumerate_all: bool = False, budget: int | None = None,
               lower: int = 0) -> MaxFamily:
    n = len(adj)
    best: list[int] = []
    best_size = lower
    found: list[list[int]] = []
    nodes = 0
    exact = True

    def expand(clique: list[int], cand: int):
        nonlocal best, best_size, found, nodes, exact
        nodes += 1
        if budget is not None and nodes > budget:
            exact = False
            raise BudgetExceeded
        order, colors = _color_sort(adj, cand)
        for idx in range(len(order) - 1, -1, -1):
            bound = len(clique) + colors[idx]
            if bound < best_size or (bound == best_size and not enumerate_all):
                return
            v = order[idx]
            new = clique + [v]
            sub = cand & adj[v]
            if sub:
                expand(new, sub)
            elif len(new) > best_size:
                best, best_size = sorted(new), len(new)
                found = [sorted(new)]
            elif len(new) == best_size and enumerate_all:
                found.append(sorted(new))
            cand &= ~(1 << v)

    try:
        expand([], (1 << n) - 1)
    except BudgetExceeded:
        pass
    upper = best_size if exact else max(best_size, max(_color_sort(adj, (1 << n) - 1)[1], default=0))
    uniq = sorted({tuple(c) for c in found}) if enumerate_all and exact else None
    return MaxFamily(len(best), upper, best, [list(c) for c in uniq] if uniq is not None else None,
                     exact, nodes)


def max_t_intersecting(d: Domain, t: int, enumerate_all: bool = False,
                       budget: int | None = None) -> MaxFamily:
    M = intersection_sizes(d)
    adj = []
    for i in range(d.size):
        row = 0
        for j in np.nonzero(M[i] >= t)[0].tolist():
            if j != i:
                row |= 1 << j
        adj.append(row)
    if all(M[i, i] < t for i in range(d.size)):
        return MaxFamily(0, 0, [], [[]] if enumerate_all else None, True, 0)
    return max_clique(adj, enumerate_all, budget)


def is_t_link(d: Domain, F: Sequence[int], t: int) -> bool:
    face = contained_in_t_link(d, F, t)
    return face is not None and sorted(F) == link_family(d, face)
