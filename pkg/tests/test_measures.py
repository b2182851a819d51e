import functools
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolmeasures.domain import AtLeast, chunk_size, popcount, submasks
from boolmeasures.measures import (BooleanFunction, DomainConstants, PreconditionError,
                                   UnsupportedDomainError, algorithm1_tree, approx_degree,
                                   approx_error, approximation, ball_reconstruct,
                                   block_sensitivity, block_sensitivity_at, certificate_at,
                                   certificate_complexity, check_relations,
                                   decision_tree_complexity, degree, degree_by_rank,
                                   domain_oracle, edge_sensitivity, edge_sensitivity_at, fbs_at,
                                   find_closer_points, fractional_block_sensitivity, measure,
                                   minimal_block, reconstruction_radius, sensitivity,
                                   sensitivity_at, unambiguous_certificate_complexity,
                                   unambiguous_partition, verify_certificate)

EXHAUSTIVE = ["cube:3", "sym:3"]


def point(d, pairs):
    return d.point_of(pairs)


def perm_fn(d, pred):
    """Boolean function from a predicate on the permutation as a dict i -> pi(i)."""
    return BooleanFunction.from_predicate(d, lambda labs: pred(dict(labs)))


def sign(perm):
    n = len(perm)
    inv = sum(1 for i in range(1, n + 1) for j in range(i + 1, n + 1) if perm[i] > perm[j])
    return inv % 2 == 0


def cube_fn(d, pred):
    return BooleanFunction.from_predicate(d, lambda labs: pred(tuple(v for _, v in labs)))


# ---------------------------------------------------------------- brute-force oracles


def bf_degree(f):
    """Smallest k with f in the float column span of link indicators of faces of size <= k."""
    d = f.domain
    faces = {c for p in d.points for c in submasks(p)}
    v = np.array(f.values, dtype=float)
    for k in range(d.n + 1):
        cols = [[1.0 if (p & c) == c else 0.0 for p in d.points] for c in faces if popcount(c) <= k]
        m = np.array(cols).T
        if np.linalg.matrix_rank(np.column_stack([m, v])) == np.linalg.matrix_rank(m):
            return k


def bf_certificate(f, x):
    d = f.domain
    px = d.points[x]
    for size in range(d.n + 1):
        for c in itertools.combinations([e for e in range(d.universe_size) if px >> e & 1], size):
            c = sum(1 << e for e in c)
            if all(f(y) == f(x) for y, q in enumerate(d.points) if q & c == c):
                return size


def bf_depth(f):
    d = f.domain

    @functools.lru_cache(maxsize=None)
    def rec(S):
        if len({f(i) for i in S}) <= 1:
            return 0
        best = None
        for q in d.queries:
            parts = {}
            for i in S:
                parts.setdefault(d.points[i] & q, []).append(i)
            if len(parts) < 2:
                continue
            v = 1 + max(rec(frozenset(p)) for p in parts.values())
            best = v if best is None else min(best, v)
        return best
    return rec(frozenset(range(d.size)))


def bf_packing(blocks):
    blocks = list(set(blocks))

    def rec(i, used):
        if i == len(blocks):
            return 0
        skip = rec(i + 1, used)
        if blocks[i] & used:
            return skip
        return max(skip, 1 + rec(i + 1, used | blocks[i]))
    return rec(0, 0)


def bf_blocks(f, x):
    d = f.domain
    return [d.points[x] & ~q for y, q in enumerate(d.points) if f(y) != f(x)]


def all_functions(d):
    return [BooleanFunction(d, b) for b in range(1 << d.size)]


# ---------------------------------------------------------------- examples


class TestExamples:
    def test_parity(self, dom):
        for n in (3, 4):
            d = dom(f"cube:{n}")
            f = cube_fn(d, lambda v: sum(v) % 2)
            assert degree(f) == n
            assert sensitivity(f) == n
        assert decision_tree_complexity(cube_fn(dom("cube:4"), lambda v: sum(v) % 2))[0] == 4

    def test_in_two_cycle_s4(self, dom):
        d = dom("sym:4")
        f = perm_fn(d, lambda p: p[1] != 1 and p[p[1]] == 1)
        assert degree(f) == 2

    def test_sign(self, dom):
        assert degree(perm_fn(dom("sym:4"), sign)) == 3
        assert decision_tree_complexity(perm_fn(dom("sym:3"), sign))[0] == 2

    def test_constant(self, dom):
        d = dom("sym:3")
        f = BooleanFunction.constant(d, 1)
        assert degree(f) == approx_degree(f) == 0
        assert decision_tree_complexity(f)[0] == 0
        assert fractional_block_sensitivity(f) == 0
        assert algorithm1_tree(f).depth() == 0

    def test_or2_approximation(self, dom):
        # equioscillation at weights 0, 1, 2 gives error 1/4 at degree 1
        f = cube_fn(dom("cube:2"), lambda v: int(any(v)))
        assert approx_error(f, 0) == Fraction(1, 2)
        assert approx_error(f, 1) == Fraction(1, 4)
        assert approximation(f, 1).error == Fraction(1, 4)
        assert approx_degree(f, Fraction(1, 3)) == 1
        assert approx_degree(f, Fraction(1, 5)) == 2

    def test_approx_degree_range(self, dom):
        f = cube_fn(dom("cube:2"), lambda v: v[0])
        with pytest.raises(ValueError):
            approx_degree(f, Fraction(1, 2))

    def test_certificates(self, dom):
        d = dom("cube:3")
        dictator = cube_fn(d, lambda v: v[0])
        assert certificate_complexity(dictator).C == 1
        f_or = cube_fn(d, lambda v: int(any(v)))
        assert certificate_at(f_or, point(d, [(1, 0), (2, 0), (3, 0)])).size() == 3
        s3 = dom("sym:3")
        assert certificate_complexity(perm_fn(s3, lambda p: p[1] == 1)).C == 1

    def test_two_cycle_sensitivity_at_identity(self, dom):
        d = dom("sym:4")
        f = perm_fn(d, lambda p: (p[1] == 2 and p[2] == 1) or (p[3] == 4 and p[4] == 3))
        ident = point(d, [(i, i) for i in range(1, 5)])
        assert sensitivity_at(f, ident) == 2

    def test_dictator_block_sensitivity_and_u(self, dom):
        f = cube_fn(dom("cube:3"), lambda v: v[0])
        assert block_sensitivity(f) == 1
        assert unambiguous_certificate_complexity(f) == 1

    def test_or2_fbs(self, dom):
        d = dom("cube:2")
        f = cube_fn(d, lambda v: int(any(v)))
        res = fbs_at(f, point(d, [(1, 0), (2, 0)]))
        assert res.primal == res.dual == 2

    def test_edge_sensitivity_only_on_sym(self, dom):
        with pytest.raises(UnsupportedDomainError):
            edge_sensitivity(cube_fn(dom("cube:2"), lambda v: v[0]))
        assert edge_sensitivity(perm_fn(dom("sym:4"), sign)) == 6


class TestAlgorithm1:
    def test_fixed_point_on_s3(self, dom):
        d = dom("sym:3")
        f = perm_fn(d, lambda p: p[1] == 1)
        tree = algorithm1_tree(f)
        assert tree.depth() <= 2
        assert tree.computes(f) and tree.well_formed()

    def test_refuses_above_conflict_bound(self, dom):
        d = dom("ms:2,3")
        f = BooleanFunction(d, 1)
        assert certificate_complexity(f).C > 1
        with pytest.raises(PreconditionError):
            algorithm1_tree(f)

    @pytest.mark.parametrize("spec", EXHAUSTIVE)
    def test_depth_bounds(self, dom, spec):
        d = dom(spec)
        k = DomainConstants.of(d)
        for f in all_functions(d):
            cc = certificate_complexity(f)
            if cc.C > k.lam:
                continue
            tree = algorithm1_tree(f, cc, k.lam)
            assert tree.computes(f) and tree.well_formed()
            D = decision_tree_complexity(f)[0]
            assert D <= tree.depth() <= k.delta * cc.C0 * cc.C1


class TestMinimalBlock:
    def test_sign_on_s4(self, dom):
        d = dom("sym:4")
        f = perm_fn(d, sign)
        x = point(d, [(i, i) for i in range(1, 5)])
        y = point(d, [(1, 2), (2, 3), (3, 4), (4, 1)])
        mb = minimal_block(f, x, y)
        assert mb.size == 2 and mb.within_bound
        assert f(mb.point) == f(y)
        assert d.points[x] & ~d.points[mb.point] & ~(d.points[x] & ~d.points[y]) == 0

    def test_or_on_cube(self, dom):
        d = dom("cube:3")
        f = cube_fn(d, lambda v: int(any(v)))
        x = point(d, [(1, 0), (2, 0), (3, 0)])
        y = point(d, [(1, 1), (2, 1), (3, 1)])
        assert minimal_block(f, x, y).size == 1

    def test_already_minimal(self, dom):
        d = dom("cube:3")
        f = cube_fn(d, lambda v: v[0])
        x = point(d, [(1, 0), (2, 0), (3, 0)])
        y = point(d, [(1, 1), (2, 0), (3, 0)])
        assert minimal_block(f, x, y).point == y

    def test_needs_different_values(self, dom):
        d = dom("cube:2")
        with pytest.raises(PreconditionError):
            minimal_block(BooleanFunction.constant(d, 0), 0, 1)


class TestCloserPoints:
    def test_cube_single_flips(self, dom):
        d = dom("cube:4")
        oracle = domain_oracle(d)
        x = point(d, [(1, 0), (2, 0), (3, 0), (4, 0)])
        y = point(d, [(1, 1), (2, 1), (3, 0), (4, 1)])
        found = find_closer_points(d, oracle, x, y)
        assert len(found) == 3
        for z in found:
            assert popcount(d.points[y] & ~d.points[z]) == 1
            assert popcount(d.points[x] & ~d.points[z]) == 2

    def test_three_cycle_shortcut(self, dom):
        d = dom("sym:4")
        x = point(d, [(i, i) for i in range(1, 5)])
        y = point(d, [(1, 2), (2, 3), (3, 1), (4, 4)])
        assert len(find_closer_points(d, domain_oracle(d), x, y)) >= 1

    def test_at_chunk_distance_returns_x(self, dom):
        d = dom("sym:3")
        x = point(d, [(1, 1), (2, 2), (3, 3)])
        y = point(d, [(1, 2), (2, 1), (3, 3)])
        assert find_closer_points(d, domain_oracle(d), x, y) == [x]

    def test_needs_distinct_points(self, dom):
        d = dom("cube:2")
        with pytest.raises(PreconditionError):
            find_closer_points(d, domain_oracle(d), 0, 0)


class TestReconstruction:
    def test_constant_from_tiny_ball(self, dom):
        d = dom("cube:4")
        f = BooleanFunction.constant(d, 1)
        known = {i: 1 for i in range(d.size) if popcount(d.points[0] & ~d.points[i]) <= 1}
        assert ball_reconstruct(d, domain_oracle(d), 0, 0, known, 1) == f

    def test_dictator_tight_radius(self, dom):
        d = dom("cube:4")
        f = cube_fn(d, lambda v: v[0])
        r = reconstruction_radius(d, 1, Fraction(1), generic=False)
        assert r == 3
        known = {i: f(i) for i in range(d.size) if popcount(d.points[0] & ~d.points[i]) <= r}
        assert len(known) < d.size
        assert ball_reconstruct(d, domain_oracle(d), 0, 1, known, r) == f

    def test_missing_ball_value(self, dom):
        d = dom("cube:3")
        with pytest.raises(PreconditionError):
            ball_reconstruct(d, domain_oracle(d), 0, 0, {}, 1)


# ---------------------------------------------------------------- oracles


@pytest.mark.parametrize("spec", EXHAUSTIVE)
def test_against_brute_force(dom, spec):
    d = dom(spec)
    chi = chunk_size(d)
    for f in all_functions(d):
        assert degree(f) == bf_degree(f)
        assert decision_tree_complexity(f)[0] == bf_depth(f)
        cc = certificate_complexity(f)
        for x in range(d.size):
            blocks = bf_blocks(f, x)
            assert cc.certificates[x].size() == bf_certificate(f, x)
            assert verify_certificate(f, cc.certificates[x])
            assert block_sensitivity_at(f, x) == bf_packing(blocks)
            assert block_sensitivity_at(f, x, minimal_only=False) == bf_packing(blocks)
            assert sensitivity_at(f, x) == bf_packing([b for b in blocks if popcount(b) == chi])


@pytest.mark.parametrize("spec", ["sym:4", "pm:3,2", "ms:2,3"])
def test_degree_methods_agree(dom, spec):
    d = dom(spec)
    rng = np.random.default_rng(7)
    for _ in range(20):
        f = BooleanFunction(d, int(rng.integers(0, 1 << min(d.size, 62))) % (1 << d.size))
        assert degree(f) == degree_by_rank(f) == bf_degree(f)


@settings(max_examples=40)
@given(st.sampled_from(["cube:3", "sym:3", "pm:2,2", "ms:2,2", "product:3,2"]), st.data())
def test_relations_hold(spec, data):
    from boolmeasures.catalog import build
    d = build(spec)
    f = BooleanFunction(d, data.draw(st.integers(0, (1 << d.size) - 1)))
    report, wit = measure(f)
    assert check_relations(report, DomainConstants.of(d)) == []
    assert wit["optimal_tree_correct"]
    assert wit.get("algorithm1_tree_correct", True)
    assert report.adeg <= degree(f)
    assert approx_degree(f, 0) == report.deg
    assert not isinstance(report.U, AtLeast) and report.C <= report.U <= report.D
    part = unambiguous_partition(f, report.U)
    covered = 0
    for face in part:
        lk = d.link_mask(face)
        assert not lk & covered and popcount(face) <= report.U
        covered |= lk
    assert covered == d.all_points


@settings(max_examples=40)
@given(st.sampled_from(["cube:3", "sym:3"]), st.data())
def test_complement_invariance(spec, data):
    from boolmeasures.catalog import build
    d = build(spec)
    f = BooleanFunction(d, data.draw(st.integers(0, (1 << d.size) - 1)))
    g = f.complement()
    assert degree(f) == degree(g)
    assert sensitivity(f) == sensitivity(g)
    assert block_sensitivity(f) == block_sensitivity(g)
    cf, cg = certificate_complexity(f), certificate_complexity(g)
    assert (cf.C, cf.C0, cf.C1) == (cg.C, cg.C1, cg.C0)


def test_edge_sensitivity_bound_on_s4(dom):
    d = dom("sym:4")
    rng = np.random.default_rng(3)
    for _ in range(30):
        f = BooleanFunction(d, int.from_bytes(rng.bytes(3), "little"))
        for x in range(d.size):
            assert edge_sensitivity_at(f, x) <= 2 * 4 * sensitivity_at(f, x)


def test_function_validation(dom):
    d = dom("cube:2")
    with pytest.raises(ValueError):
        BooleanFunction.from_values(d, [0, 1])
    with pytest.raises(ValueError):
        BooleanFunction.from_values(d, [0, 1, 2, 0])
    with pytest.raises(ValueError):
        BooleanFunction(d, 1 << 4)
    f = BooleanFunction.from_values(d, [0, 1, 1, 0])
    assert BooleanFunction.from_json(f.to_json()).values == f.values
