"""Complexity measures of Boolean functions on a domain.

Every routine here works on one function and favours transparency; the
vectorised engine in :mod:`boolmeasures.batch` computes the same quantities
for many functions at once and is cross-checked against this module.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .domain import (AtLeast, DegenerateDomainError, Domain, bits, block_sensitivity_ratio_lb,
                     chunk_size, conflict_bound, distance, max_degree_param, popcount,
                     sensitivity_ratio_lb, submasks)
from .exact import (EQ, LE, GE, BudgetExceeded, LinearProgram, in_column_span, integer_vector,
                    lp_solve, nullspace, rref, verify_basis)


class UnsupportedDomainError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class ReconstructionError(RuntimeError):
    def __init__(self, point: int, found: int, needed: int):
        super().__init__(f"point {point}: found {found} closer points, need {needed}")
        self.point = point


# ---------------------------------------------------------------- functions


class BooleanFunction:
    """A 0/1 vector over a domain's points, stored as a bitset over point indices."""

    __slots__ = ("domain", "bits")

    def __init__(self, domain: Domain, value_bits: int):
        if value_bits < 0 or value_bits >> domain.size:
            raise ValueError("value bits exceed the number of points")
        self.domain = domain
        self.bits = int(value_bits)

    @classmethod
    def from_values(cls, domain: Domain, values: Iterable) -> BooleanFunction:
        vals = [int(v) for v in values]
        if len(vals) != domain.size:
            raise ValueError(f"expected {domain.size} values, got {len(vals)}")
        if any(v not in (0, 1) for v in vals):
            raise ValueError("values must be 0 or 1")
        return cls(domain, sum(1 << i for i, v in enumerate(vals) if v))

    @classmethod
    def from_predicate(cls, domain: Domain, pred: Callable[[tuple], object]) -> BooleanFunction:
        """``pred`` receives the sorted member labels of each point."""
        return cls(domain, sum(1 << i for i, p in enumerate(domain.points) if pred(domain.label_set(p))))

    @classmethod
    def constant(cls, domain: Domain, b: int) -> BooleanFunction:
        return cls(domain, domain.all_points if b else 0)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.domain.size))

    def __call__(self, i: int) -> int:
        return (self.bits >> i) & 1

    def __eq__(self, other) -> bool:
        return isinstance(other, BooleanFunction) and other.domain is self.domain and other.bits == self.bits

    def __hash__(self) -> int:
        return hash((id(self.domain), self.bits))

    def __repr__(self) -> str:
        return f"BooleanFunction({self.domain.name}, {self.value_string()})"

    def complement(self) -> BooleanFunction:
        return BooleanFunction(self.domain, self.domain.all_points & ~self.bits)

    def is_constant(self) -> bool:
        return self.bits in (0, self.domain.all_points)

    def value_string(self) -> str:
        return "".join(str(v) for v in self.values)

    def to_json(self) -> dict:
        return {"domain": str(self.domain.spec) if self.domain.spec else self.domain.name,
                "values": self.value_string()}

    @classmethod
    def from_json(cls, obj, domain: Domain | None = None) -> BooleanFunction:
        if isinstance(obj, str):
            obj = json.loads(obj)
        if domain is None:
            from .catalog import build
            domain = build(obj["domain"])
        vals = obj["values"]
        if not isinstance(vals, str) or set(vals) - {"0", "1"}:
            raise ValueError("values must be a 0/1 string")
        return cls.from_values(domain, vals)


def _mono(fbits: int, link: int) -> bool:
    fl = fbits & link
    return fl == 0 or fl == link


# ---------------------------------------------------------------- degree


def inclusion_links(d: Domain, k: int) -> list[int]:
    """Distinct link bitsets of the faces of size <= k (columns of the inclusion matrix)."""
    def build():
        seen: dict[int, None] = {}
        for f in sorted(d.faces, key=lambda m: (popcount(m), tuple(bits(m)))):
            if popcount(f) <= k:
                seen.setdefault(d.faces[f], None)
        return list(seen)
    return d.cached(("inclusion", k), build)


def _column_vectors(d: Domain, links: Sequence[int]) -> list[list[int]]:
    return [[(lk >> p) & 1 for p in range(d.size)] for lk in links]


def annihilator(d: Domain, k: int) -> np.ndarray:
    """Integer rows spanning the orthogonal complement of the degree-<=k space."""
    def build():
        rows = _column_vectors(d, inclusion_links(d, k))
        null = nullspace(rows)
        out = np.array([integer_vector(v) for v in null], dtype=object).reshape(len(null), d.size)
        if out.size and max(abs(int(x)) for x in out.flat) * d.size < 2 ** 62:
            out = out.astype(np.int64)
        return out
    return d.cached(("annihilator", k), build)


def level_dimension(d: Domain, k: int) -> int:
    return d.size - annihilator(d, k).shape[0]


def level_basis(d: Domain, k: int) -> list[int]:
    """Links of independent faces spanning the degree-<=k space."""
    def build():
        links = inclusion_links(d, k)
        cols = _column_vectors(d, links)
        matrix = [list(r) for r in zip(*cols)]
        _, pivots = rref(matrix)
        return [links[j] for j in pivots]
    return d.cached(("level_basis", k), build)


def _value_vector(f: BooleanFunction) -> np.ndarray:
    return np.array(f.values, dtype=np.int64)


def in_degree_space(f: BooleanFunction, k: int) -> bool:
    N = annihilator(f.domain, k)
    if N.shape[0] == 0:
        return True
    v = _value_vector(f) if N.dtype != object else np.array(f.values, dtype=object)
    return not np.any(N @ v)


def degree(f: BooleanFunction) -> int:
    for k in range(f.domain.n + 1):
        if in_degree_space(f, k):
            return k
    raise ArithmeticError("function outside the full-degree space")


def degree_by_rank(f: BooleanFunction) -> int:
    """Degree via direct span membership against the inclusion matrix."""
    d = f.domain
    for k in range(d.n + 1):
        cols = _column_vectors(d, inclusion_links(d, k))
        matrix = [list(r) for r in zip(*cols)]
        if in_column_span(matrix, f.values).member:
            return k
    raise ArithmeticError("function outside the full-degree space")


@dataclass(frozen=True)
class Approximation:
    degree: int
    error: Fraction
    coefficients: tuple[Fraction, ...]  # over level_basis(d, degree)
    faces: tuple[int, ...]


def approximation(f: BooleanFunction, k: int) -> Approximation:
    """Best uniform approximation of f by a degree-<=k polynomial (exact)."""
    d = f.domain
    basis = level_basis(d, k)
    vals = [Fraction(v) for v in f.values]
    N = annihilator(d, k)
    if N.shape[0] == 0 or in_degree_space(f, k):
        coef = in_column_span([list(r) for r in zip(*_column_vectors(d, basis))], vals).witness
        return Approximation(k, Fraction(0), tuple(coef), tuple(basis))
    npts = d.size
    r = len(basis)
    cols = _column_vectors(d, basis)
    A = [row + [-x for x in row] for row in cols]
    A.append([1] * (2 * npts))
    c = vals + [-v for v in vals]
    lp = LinearProgram(c, A, [EQ] * (r + 1), [0] * r + [1], maximize=True)
    res = lp_solve(lp)
    if not res.optimal:
        raise ArithmeticError(f"approximation LP returned {res.status}")
    err = res.value
    y = res.duals
    for sign in (1, -1):
        coef = [sign * y[j] for j in range(r)]
        poly = [sum(coef[j] * cols[j][x] for j in range(r)) for x in range(npts)]
        if max(abs(v - p) for v, p in zip(vals, poly)) == err:
            return Approximation(k, err, tuple(coef), tuple(basis))
    raise ArithmeticError("dual solution does not certify the approximation error")


def approx_error(f: BooleanFunction, k: int) -> Fraction:
    d = f.domain
    if in_degree_space(f, k):
        return Fraction(0)
    if k == 0:
        return Fraction(1, 2)
    N = annihilator(d, k)
    if N.shape[0] == 1:
        row = [int(x) for x in N[0]]
        return Fraction(abs(sum(a * v for a, v in zip(row, f.values))), sum(abs(a) for a in row))
    return approximation(f, k).error


def approx_degree(f: BooleanFunction, eps=Fraction(1, 3)) -> int:
    eps = Fraction(eps)
    if not 0 <= eps < Fraction(1, 2):
        raise ValueError("epsilon must lie in [0, 1/2)")
    top = degree(f)
    for k in range(top):
        if approx_error(f, k) <= eps:
            return k
    return top


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class Certificate:
    owner: int       # point index
    members: int     # element bitset, subset of the owner point
    value: int

    def size(self) -> int:
        return popcount(self.members)


def certificate_at(f: BooleanFunction, x: int) -> Certificate:
    """Smallest face of point x forcing f (first in size-then-lexicographic order)."""
    d = f.domain
    p = d.points[x]
    for c in submasks(p):
        if _mono(f.bits, d.link_mask(c)):
            return Certificate(x, c, f(x))
    raise AssertionError("the full point is always a certificate")


@dataclass(frozen=True)
class CertificateComplexity:
    C: int
    C0: int
    C1: int
    certificates: tuple[Certificate, ...]


def certificate_complexity(f: BooleanFunction) -> CertificateComplexity:
    certs = tuple(certificate_at(f, x) for x in range(f.domain.size))
    c0 = max((c.size() for c in certs if c.value == 0), default=0)
    c1 = max((c.size() for c in certs if c.value == 1), default=0)
    return CertificateComplexity(max(c0, c1), c0, c1, certs)


def verify_certificate(f: BooleanFunction, cert: Certificate) -> bool:
    d = f.domain
    if cert.members & ~d.points[cert.owner]:
        return False
    lk = d.link_mask(cert.members)
    return (f.bits & lk) == (lk if cert.value else 0)


# ---------------------------------------------------------------- unambiguous certificates


def _tiles(d: Domain):
    """Per point: distinct links of its faces with the smallest face size, sorted by size."""
    def build():
        ptr = [0]
        link_list: list[int] = []
        size_list: list[int] = []
        face_list: list[int] = []
        for p in d.points:
            best: dict[int, tuple[int, int]] = {}
            for c in submasks(p):
                lk = d.faces[c]
                if lk not in best:
                    best[lk] = (popcount(c), c)
            for lk, (sz, c) in sorted(best.items(), key=lambda kv: (kv[1][0], tuple(bits(kv[1][1])))):
                link_list.append(lk)
                size_list.append(sz)
                face_list.append(c)
            ptr.append(len(link_list))
        return ptr, link_list, size_list, face_list
    return d.cached("tiles", build)


def _tile_arrays(d: Domain):
    def build():
        ptr, links, sizes, _ = _tiles(d)
        dtype = np.uint64 if d.size <= 64 else object
        return (np.array(ptr, dtype=np.int32), np.array(links, dtype=dtype),
                np.array(sizes, dtype=np.int32))
    return d.cached("tile_arrays", build)


def partition_exists(f: BooleanFunction, k: int, budget: int | None = None) -> bool:
    d = f.domain
    ptr, links, sizes = _tile_arrays(d)
    return kernels.partition_exists(ptr, links, sizes, f.bits, d.all_points, k, budget)


def unambiguous_partition(f: BooleanFunction, k: int, budget: int | None = None) -> list[int] | None:
    """A collection of faces of size <= k whose links partition the domain monochromatically."""
    d = f.domain
    ptr, links, sizes, faces = _tiles(d)
    failed: set[int] = set()
    nodes = 0

    def rec(rest: int) -> list[int] | None:
        nonlocal nodes
        if rest == 0:
            return []
        if rest in failed:
            return None
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExceeded("unambiguous-certificate search budget exhausted")
        p = (rest & -rest).bit_length() - 1
        for t in range(ptr[p], ptr[p + 1]):
            lk = links[t]
            if sizes[t] > k or lk & ~rest or not _mono(f.bits, lk):
                continue
            sub = rec(rest & ~lk)
            if sub is not None:
                return [faces[t], *sub]
        failed.add(rest)
        return None

    return rec(d.all_points)


def unambiguous_certificate_complexity(f: BooleanFunction, budget: int | None = None,
                                       upper: int | None = None) -> int:
    """U(f); ``AtLeast(k)`` when the budget runs out at size k.

    ``upper`` is a known value of D(f), which is always achievable.
    """
    upper = decision_tree_depth(f) if upper is None else upper
    for k in range(upper):
        try:
            if partition_exists(f, k, budget):
                return k
        except BudgetExceeded:
            return AtLeast(k)
    return upper


# ---------------------------------------------------------------- decision trees


@dataclass
class StateGraph:
    """Consistent point sets reachable by queries; children precede parents, root last."""

    masks: list[int]
    index: dict[int, int]
    splits: list[list[tuple[int, list[tuple[int, int]]]]]  # per state: (query, [(element, child)])

    @property
    def root(self) -> int:
        return len(self.masks) - 1

    def kernel_arrays(self):
        q_ptr, c_ptr, children = [0], [0], []
        for sp in self.splits:
            for _, kids in sp:
                children.extend(c for _, c in kids)
                c_ptr.append(len(children))
            q_ptr.append(len(c_ptr) - 1)
        return (np.array(self.masks, dtype=np.uint64), np.array(q_ptr, dtype=np.int32),
                np.array(c_ptr, dtype=np.int32), np.array(children, dtype=np.int32))


def state_graph(d: Domain) -> StateGraph:
    def build():
        links = d.element_links
        seen = {d.all_points}
        frontier = [d.all_points]
        raw: dict[int, list[tuple[int, list[tuple[int, int]]]]] = {}
        while frontier:
            nxt = []
            for S in frontier:
                entries = []
                for qi, q in enumerate(d.queries):
                    parts = [(e, S & links[e]) for e in bits(q) if S & links[e]]
                    if len(parts) < 2:
                        continue
                    entries.append((qi, parts))
                    for _, child in parts:
                        if child not in seen:
                            seen.add(child)
                            nxt.append(child)
                raw[S] = entries
            frontier = nxt
        order = sorted(seen, key=lambda m: (popcount(m), m))
        index = {m: i for i, m in enumerate(order)}
        splits = [[(qi, [(e, index[c]) for e, c in parts]) for qi, parts in raw[m]] for m in order]
        return StateGraph(order, index, splits)
    return d.cached("state_graph", build)


@dataclass
class Leaf:
    value: int


@dataclass
class Node:
    query: int
    children: dict[int, "Leaf | Node"]  # element id -> subtree


class DecisionTree:
    def __init__(self, domain: Domain, root: Leaf | Node):
        self.domain = domain
        self.root = root

    def depth(self) -> int:
        def rec(t):
            return 0 if isinstance(t, Leaf) else 1 + max(rec(c) for c in t.children.values())
        return rec(self.root)

    def evaluate(self, x: int) -> int:
        p = self.domain.points[x]
        t = self.root
        while isinstance(t, Node):
            ans = p & self.domain.queries[t.query]
            t = t.children[ans.bit_length() - 1]
        return t.value

    def computes(self, f: BooleanFunction) -> bool:
        return all(self.evaluate(x) == f(x) for x in range(self.domain.size))

    def well_formed(self) -> bool:
        """Children exist exactly for the answers some consistent point can give."""
        d = self.domain

        def rec(t, S: int) -> bool:
            if isinstance(t, Leaf):
                return True
            feasible = {e for e in bits(d.queries[t.query]) if S & d.element_links[e]}
            if set(t.children) != feasible:
                return False
            return all(rec(c, S & d.element_links[e]) for e, c in t.children.items())
        return rec(self.root, d.all_points)

    def to_json(self):
        d = self.domain

        def rec(t):
            if isinstance(t, Leaf):
                return t.value
            return {"query": d.query_labels[t.query],
                    "children": {_label_text(d.labels[e]): rec(c) for e, c in sorted(t.children.items())}}
        return rec(self.root)


def _label_text(lab) -> str:
    if isinstance(lab, tuple):
        return "(" + ",".join(_label_text(x) for x in lab) + ")"
    return str(lab)


def decision_tree_depth(f: BooleanFunction) -> int:
    d = f.domain
    g = state_graph(d)
    if d.size <= 64:
        arrays = g.kernel_arrays()
        return int(kernels.dt_depths(*arrays, np.array([f.bits], dtype=np.uint64))[0])
    return _dt_table(f, g)[g.root]


def _dt_table(f: BooleanFunction, g: StateGraph) -> list[int]:
    depth = [0] * len(g.masks)
    for s, m in enumerate(g.masks):
        if _mono(f.bits, m):
            continue
        depth[s] = 1 + min(max(depth[c] for _, c in kids) for _, kids in g.splits[s])
    return depth


def decision_tree_complexity(f: BooleanFunction) -> tuple[int, DecisionTree]:
    """Optimal depth and a tree achieving it (first optimal query in query order)."""
    d = f.domain
    g = state_graph(d)
    depth = _dt_table(f, g)

    def build(s: int):
        m = g.masks[s]
        if _mono(f.bits, m):
            return Leaf(1 if f.bits & m else 0)
        for qi, kids in g.splits[s]:
            if 1 + max(depth[c] for _, c in kids) == depth[s]:
                return Node(qi, {e: build(c) for e, c in kids})
        raise AssertionError("no optimal query found")

    tree = DecisionTree(d, build(g.root))
    return depth[g.root], tree


# ---------------------------------------------------------------- sensitivity family


def flipping_blocks(f: BooleanFunction, x: int) -> list[tuple[int, int]]:
    """(y, x \\ y) for every point y with f(y) != f(x)."""
    d = f.domain
    p = d.points[x]
    fx = f(x)
    return [(y, p & ~q) for y, q in enumerate(d.points) if f(y) != fx]


def sensitivity_at(f: BooleanFunction, x: int) -> int:
    chi = chunk_size(f.domain)
    return kernels.max_packing([b for _, b in flipping_blocks(f, x) if popcount(b) == chi])[0]


def block_sensitivity_at(f: BooleanFunction, x: int, minimal_only: bool = True) -> int:
    blocks = [b for _, b in flipping_blocks(f, x)]
    if minimal_only:
        return kernels.max_packing(blocks)[0]
    return _packing_unrestricted(blocks)


def _packing_unrestricted(blocks: Sequence[int]) -> int:
    """Maximum disjoint subfamily without discarding non-minimal blocks."""
    blocks = sorted(set(blocks), key=lambda m: (popcount(m), m))
    best = 0

    def rec(i: int, used: int, count: int):
        nonlocal best
        best = max(best, count)
        if count + (len(blocks) - i) <= best:
            return
        for j in range(i, len(blocks)):
            if not blocks[j] & used:
                rec(j + 1, used | blocks[j], count + 1)

    rec(0, 0, 0)
    return best


def sensitivity(f: BooleanFunction) -> int:
    return max((sensitivity_at(f, x) for x in range(f.domain.size)), default=0)


def block_sensitivity(f: BooleanFunction) -> int:
    return max((block_sensitivity_at(f, x) for x in range(f.domain.size)), default=0)


def transposition_neighbours(d: Domain) -> list[list[int]]:
    """For S_n: point index of pi composed with each transposition of positions."""
    if d.spec is None or d.spec.kind != "sym":
        raise UnsupportedDomainError("edge sensitivity is defined for symmetric-group domains")

    def build():
        n = d.spec.n
        out = []
        for p in d.points:
            perm = dict(d.label_set(p))
            row = []
            for a, b in itertools.combinations(range(1, n + 1), 2):
                q = dict(perm)
                q[a], q[b] = perm[b], perm[a]
                row.append(d.point_of(q.items()))
            out.append(row)
        return out
    return d.cached("transpositions", build)


def edge_sensitivity_at(f: BooleanFunction, x: int) -> int:
    fx = f(x)
    return sum(1 for y in transposition_neighbours(f.domain)[x] if f(y) != fx)


def edge_sensitivity(f: BooleanFunction) -> int:
    return max(edge_sensitivity_at(f, x) for x in range(f.domain.size))


@dataclass(frozen=True)
class FbsResult:
    primal: Fraction
    dual: Fraction
    weights: dict[int, Fraction]        # block -> c_B
    certificate: dict[int, Fraction]    # element id -> d_p
    basis_verified: bool

    @property
    def value(self) -> Fraction:
        if self.primal != self.dual:
            raise ArithmeticError("fbs primal and dual optima differ")
        return self.primal


def fbs_lps(blocks: Sequence[int], elements: Sequence[int]) -> tuple[LinearProgram, LinearProgram]:
    """Primal (fractional blocks) and dual (fractional certificate) programs."""
    A = [[1 if (b >> e) & 1 else 0 for b in blocks] for e in elements]
    primal = LinearProgram([1] * len(blocks), A, [LE] * len(elements), [1] * len(elements), maximize=True)
    At = [list(r) for r in zip(*A)] if blocks else []
    dual = LinearProgram([1] * len(elements), At, [GE] * len(blocks), [1] * len(blocks), maximize=False)
    return primal, dual


def solve_fbs(blocks: Sequence[int], elements: Sequence[int]) -> FbsResult:
    blocks = sorted(set(blocks))
    if not blocks:
        return FbsResult(Fraction(0), Fraction(0), {}, {e: Fraction(0) for e in elements}, True)
    primal, dual = fbs_lps(blocks, elements)
    rp, rd = lp_solve(primal), lp_solve(dual)
    if not (rp.optimal and rd.optimal):
        raise ArithmeticError(f"fbs LPs returned {rp.status}/{rd.status}")
    ok = verify_basis(rp.standard, rp.basis) and verify_basis(rd.standard, rd.basis)
    return FbsResult(rp.value, rd.value, dict(zip(blocks, rp.x)), dict(zip(elements, rd.x)), ok)


def fbs_at(f: BooleanFunction, x: int) -> FbsResult:
    d = f.domain
    return solve_fbs([b for _, b in flipping_blocks(f, x)], list(bits(d.points[x])))


def fractional_block_sensitivity(f: BooleanFunction) -> Fraction:
    return max((fbs_at(f, x).value for x in range(f.domain.size)), default=Fraction(0))


# ---------------------------------------------------------------- Algorithm 1


def one_certificates(f: BooleanFunction, max_size: int) -> list[int]:
    """Faces of size <= max_size whose nonempty link lies inside f^-1(1), in size-lex order."""
    d = f.domain
    return [c for c in _faces_sorted(d) if popcount(c) <= max_size
            and d.faces[c] and (f.bits & d.faces[c]) == d.faces[c]]


def _faces_sorted(d: Domain) -> list[int]:
    return d.cached("faces_sorted", lambda: sorted(d.faces, key=lambda m: (popcount(m), tuple(bits(m)))))


def algorithm1_tree(f: BooleanFunction, cc: CertificateComplexity | None = None,
                    lam: int | None = None) -> DecisionTree:
    """The certificate-chasing query algorithm as an explicit tree.

    Each round picks the first 1-certificate consistent with the answers so
    far and asks every query touching it; at most C_0 rounds are needed.
    """
    d = f.domain
    cc = certificate_complexity(f) if cc is None else cc
    lam = conflict_bound(d) if lam is None else lam
    if cc.C > lam:
        raise PreconditionError(f"C(f) = {cc.C} exceeds the conflict bound {int(lam)}")
    certs = one_certificates(f, cc.C1)
    links = d.element_links
    qoe = d.query_of_element

    def rounds(S: int, it: int):
        if _mono(f.bits, S):
            return Leaf(1 if f.bits & S else 0)
        if it == cc.C0:
            raise AssertionError("algorithm did not terminate within C_0 rounds")
        c = next((c for c in certs if d.faces[c] & S), None)
        if c is None:
            raise AssertionError("no consistent 1-certificate on a non-constant state")
        qs = sorted({q for e in bits(c) for q in qoe[e]})
        return ask(S, qs, 0, it)

    def ask(S: int, qs: list[int], i: int, it: int):
        while i < len(qs):
            parts = [(e, S & links[e]) for e in bits(d.queries[qs[i]]) if S & links[e]]
            if len(parts) > 1:
                return Node(qs[i], {e: ask(sub, qs, i + 1, it) for e, sub in parts})
            i += 1
        return rounds(S, it + 1)

    return DecisionTree(d, rounds(d.all_points, 0))


# ---------------------------------------------------------------- minimal blocks


@dataclass(frozen=True)
class MinimalBlock:
    point: int
    size: int
    bound: Fraction | None
    within_bound: bool | None


def minimal_block(f: BooleanFunction, x: int, y: int, check_bound: bool = True) -> MinimalBlock:
    """Point z with f(z) = f(y), x \\ z inside x \\ y and |x \\ z| minimal."""
    d = f.domain
    if f(x) == f(y):
        raise PreconditionError("minimal_block needs f(x) != f(y)")
    px, py = d.points[x], d.points[y]
    dxy = px & ~py
    best = None
    for w, pw in enumerate(d.points):
        dxw = px & ~pw
        if f(w) == f(y) and not dxw & ~dxy:
            key = (popcount(dxw), w)
            if best is None or key < best:
                best = key
    size, z = best
    if not check_bound:
        return MinimalBlock(z, size, None, None)
    bt = sensitivity_ratio_lb(d).value
    b = block_sensitivity_ratio_lb(d).value
    bound = min(Fraction(sensitivity(f)) / bt, Fraction(block_sensitivity(f)) / b)
    return MinimalBlock(z, size, bound, size <= bound)


# ---------------------------------------------------------------- ball reconstruction


def find_closer_points(d: Domain, oracle: Callable[[int], bool], x: int, y: int) -> list[int]:
    """Greedy: points z at distance chunk from y, closer to x, with disjoint y \\ z."""
    if x == y:
        raise PreconditionError("find_closer_points needs x != y")
    chi = chunk_size(d)
    px, py = d.points[x], d.points[y]
    dxy = distance(px, py)
    outside = [e for e in range(d.universe_size) if not (py >> e) & 1]
    inside = list(bits(py))
    used = 0
    found = []
    for rem in itertools.combinations(inside, chi):
        rmask = Domain.mask(rem)
        if rmask & used:
            continue
        for add in itertools.combinations(outside, chi):
            w = (py & ~rmask) | Domain.mask(add)
            if distance(px, w) < dxy and oracle(w):
                found.append(d.point_index[w])
                used |= rmask
                break
    return found


def reconstruction_radius(d: Domain, s: int, ratio: Fraction, generic: bool = True) -> int:
    """Ball radius for the majority reconstruction.

    The generic greedy finder only guarantees (ratio/chunk)*dist closer points,
    so it needs the extra chunk factor.
    """
    chi = chunk_size(d) if generic else 1
    return math.ceil(Fraction(chi * (2 * s + 1)) / ratio)


def ball_reconstruct(d: Domain, oracle: Callable[[int], bool], x0: int, s: int,
                     known: dict[int, int], radius: int) -> BooleanFunction:
    px = d.points[x0]
    order = sorted(range(d.size), key=lambda i: (distance(px, d.points[i]), i))
    vals: dict[int, int] = {}
    need = 2 * s + 1
    for y in order:
        if distance(px, d.points[y]) <= radius:
            if y not in known:
                raise PreconditionError(f"known values miss point {y} inside the ball")
            vals[y] = known[y]
            continue
        closer = find_closer_points(d, oracle, x0, y)
        if len(closer) < need:
            raise ReconstructionError(y, len(closer), need)
        ones = sum(vals[z] for z in closer[:need])
        vals[y] = 1 if 2 * ones > need else 0
    return BooleanFunction.from_values(d, [vals[i] for i in range(d.size)])


def domain_oracle(d: Domain) -> Callable[[int], bool]:
    if d.spec is not None:
        from .catalog import membership
        spec = d.spec
        return lambda w: membership(spec, w)
    return lambda w: w in d.point_index


# ---------------------------------------------------------------- reports and relations


@dataclass
class DomainConstants:
    n: int
    chunk: int
    delta: int
    lam: int            # conflict bound; AtLeast(n) when unbounded up to n
    B: Fraction
    Bt: Fraction
    exact_ratios: bool

    @classmethod
    def of(cls, d: Domain) -> DomainConstants:
        def build():
            b, bt = block_sensitivity_ratio_lb(d), sensitivity_ratio_lb(d)
            return cls(d.n, chunk_size(d), max_degree_param(d), conflict_bound(d),
                       b.value, bt.value, b.exact and bt.exact)
        return d.cached("constants", build)


@dataclass
class MeasureReport:
    deg: int
    adeg: int
    C: int
    C0: int
    C1: int
    U: int | None
    D: int
    s: int
    bs: int
    fbs: Fraction
    fbs_dual: Fraction
    edge_sensitivity: int | None = None
    max_minimal_block: int | None = None
    alg1_depth: int | None = None
    status: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            if isinstance(v, Fraction):
                out[k] = str(v)
            elif isinstance(v, AtLeast):
                out[k] = str(v)
            else:
                out[k] = v
        return out


def measure(f: BooleanFunction, eps=Fraction(1, 3), with_u: bool = True,
            u_budget: int | None = None) -> tuple[MeasureReport, dict]:
    """All measures of f plus the witnesses (certificates, optimal and Algorithm-1 trees)."""
    d = f.domain
    consts = DomainConstants.of(d)
    cc = certificate_complexity(f)
    D, tree = decision_tree_complexity(f)
    fbs_results = [fbs_at(f, x) for x in range(d.size)]
    status = {}
    U = None
    if with_u:
        U = unambiguous_certificate_complexity(f, u_budget, upper=D)
        status["U"] = "lower-bound" if isinstance(U, AtLeast) else "exact"
    alg1 = None
    if cc.C <= consts.lam:
        alg1 = algorithm1_tree(f, cc, consts.lam)
    mmb = 0
    for x in range(d.size):
        for y, _ in flipping_blocks(f, x):
            mmb = max(mmb, minimal_block(f, x, y, check_bound=False).size)
    edge = None
    if d.spec is not None and d.spec.kind == "sym":
        edge = edge_sensitivity(f)
    report = MeasureReport(
        deg=degree(f), adeg=approx_degree(f, eps), C=cc.C, C0=cc.C0, C1=cc.C1, U=U, D=D,
        s=sensitivity(f), bs=block_sensitivity(f),
        fbs=max((r.primal for r in fbs_results), default=Fraction(0)),
        fbs_dual=max((r.dual for r in fbs_results), default=Fraction(0)),
        edge_sensitivity=edge, max_minimal_block=mmb,
        alg1_depth=alg1.depth() if alg1 is not None else None, status=status)
    witnesses = {
        "certificates": [{"point": c.owner, "members": [_label_text(l) for l in d.label_set(c.members)],
                          "value": c.value} for c in cc.certificates],
        "optimal_tree": tree.to_json(),
        "optimal_tree_correct": tree.computes(f) and tree.well_formed(),
    }
    if alg1 is not None:
        witnesses["algorithm1_tree"] = alg1.to_json()
        witnesses["algorithm1_tree_correct"] = alg1.computes(f) and alg1.well_formed()
    return report, witnesses


def check_relations(r: MeasureReport, k: DomainConstants) -> list[str]:
    """Names of the violated relations (empty when all hold)."""
    bad = []

    def need(name: str, ok: bool):
        if not ok:
            bad.append(name)

    need("adeg<=deg", r.adeg <= r.deg)
    need("deg<=D", r.deg <= r.D)
    need("s<=bs", r.s <= r.bs)
    need("bs<=fbs", r.bs <= r.fbs)
    need("fbs<=C", r.fbs <= r.C)
    need("fbs primal=dual", r.fbs == r.fbs_dual)
    if r.U is not None and not isinstance(r.U, AtLeast):
        need("C<=U", r.C <= r.U)
        need("U<=D", r.U <= r.D)
    need("bs<=6adeg^2", r.bs <= 6 * r.adeg ** 2)
    need("deg<=1=>bs<=1", r.deg > 1 or r.bs <= 1)
    need("C<=s*bs/Bt", r.C <= Fraction(r.s * r.bs) / k.Bt)
    need("C<=bs^2/B", r.C <= Fraction(r.bs ** 2) / k.B)
    if r.max_minimal_block is not None:
        need("minimal block<=min(s/Bt,bs/B)",
             r.max_minimal_block <= min(Fraction(r.s) / k.Bt, Fraction(r.bs) / k.B))
    if r.C <= k.lam:
        need("D<=Delta*C0*C1", r.D <= k.delta * r.C0 * r.C1)
        if r.alg1_depth is not None:
            need("alg1<=Delta*C0*C1", r.alg1_depth <= k.delta * r.C0 * r.C1)
            need("alg1>=D", r.alg1_depth >= r.D)
    if int(k.lam) > 0:
        lam = int(k.lam)
        need("D<=B^-2 max(Delta,n/Lambda) bs^4",
             r.D <= max(Fraction(k.delta), Fraction(k.n, lam)) * r.bs ** 4 / k.B ** 2)
    if r.edge_sensitivity is not None:
        need("t<=2n*s", r.edge_sensitivity <= 2 * k.n * r.s)
    return bad
