import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolmeasures.measures import (BooleanFunction, UnsupportedDomainError, annihilator, degree,
                                   level_dimension, sensitivity)
from boolmeasures.spectral import (FamilyError, Tabloid, character_level, check_spanning,
                                   column_pairs, column_permutations, degree_witness,
                                   derangement_matrix, eval_chi, eval_e, fillings, hoffman_check,
                                   hoffman_cross_check, partitions, pseudo_char_family,
                                   pseudo_character, sensitivity_witness_bound,
                                   star_lemma_check, tabloids, verify_inducing, verify_t_good)

SPECTRAL = ["sym:3", "sym:4", "pm:2,2", "pm:3,2", "ms:2,2", "ms:2,3", "ms:1,1,2"]


def partition_count(n):
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            ways[total] += ways[total - part]
    return ways[n]


@pytest.mark.parametrize("n", range(9))
def test_partitions(n):
    ps = partitions(n)
    assert len(ps) == len(set(ps)) == partition_count(n)
    assert all(sum(p) == n and list(p) == sorted(p, reverse=True) for p in ps)
    assert ps == sorted(ps, reverse=True)


@given(st.integers(1, 6).flatmap(lambda n: st.sampled_from(partitions(n))))
def test_tabloid_counts_are_multinomial(shape):
    n = sum(shape)
    expect = math.factorial(n) // math.prod(math.factorial(k) for k in shape)
    assert len(tabloids(shape, range(1, n + 1))) == expect
    assert len(fillings(shape, range(1, n + 1))) == math.factorial(n)


def test_bad_shapes():
    with pytest.raises(ValueError):
        fillings((1, 2), [1, 2, 3])
    with pytest.raises(ValueError):
        fillings((2, 1), [1, 2])


class TestCharacters:
    def test_shape_32_expansion_has_four_terms(self):
        t = Tabloid(((1, 2, 3), (4, 5)))
        terms = list(column_permutations(t))
        assert len(terms) == 4
        assert sorted(s for s, _ in terms) == [-1, -1, 1, 1]

    def test_single_row_is_constant(self, dom):
        d = dom("sym:4")
        row = Tabloid(((1, 2, 3, 4),))
        assert set(pseudo_character(d, row, row).values) == {1}

    def test_pm_row_containment(self, dom):
        d = dom("pm:3,2")
        A = Tabloid(((1, 2, 3, 4), (5, 6)))
        m = [((1, 1), (1, 2)), ((1, 3), (1, 4)), ((1, 5), (1, 6))]
        x = d.point_of(m)
        assert eval_e(d, A, None, x) == 1
        y = d.point_of([((1, 1), (1, 5)), ((1, 3), (1, 4)), ((1, 2), (1, 6))])
        assert eval_e(d, A, None, y) == 0

    def test_sym_row_mapping(self, dom):
        d = dom("sym:3")
        A = Tabloid(((1, 2), (3,)))
        B = Tabloid(((2, 3), (1,)))
        for x, p in enumerate(d.points):
            perm = dict(d.label_set(p))
            assert eval_e(d, A, B, x) == int(perm[3] == 1)

    @pytest.mark.parametrize("spec", ["sym:3", "sym:4", "ms:2,2", "ms:2,3", "ms:1,1,2", "pm:2,2"])
    def test_normalized_values_are_signs(self, dom, spec):
        d = dom(spec)
        for c in pseudo_char_family(d, d.n):
            assert set(c.normalized()) <= {-1, 0, 1}
            assert eval_chi(c, c.support[0]) != 0

    def test_pm6_shape_42_reaches_two(self, dom):
        # rows {1,2,3,4},{5,6} and their column swap both contain [12][34][56]
        d = dom("pm:3,2")
        c = pseudo_character(d, Tabloid(((1, 2, 3, 4), (5, 6))))
        x = d.point_of([((1, 1), (1, 2)), ((1, 3), (1, 4)), ((1, 5), (1, 6))])
        assert eval_chi(c, x) == 2
        assert set(c.normalized()) == {-2, -1, 0, 1, 2}

    def test_small_families(self, dom):
        d = dom("sym:3")
        (triv,) = pseudo_char_family(d, 0)
        assert triv.shape == (3,) and set(triv.values) == {1}
        deg1 = [c for c in pseudo_char_family(d, 1) if c.shape == (2, 1)]
        # 3 tabloids for A, and B ranges over 6 fillings giving 3 distinct signed characters each
        assert len(deg1) == 18

    def test_mismatched_tabloids(self, dom):
        d = dom("sym:3")
        with pytest.raises(ValueError):
            pseudo_character(d, Tabloid(((1, 2), (3,))), Tabloid(((1, 2, 3),)))
        with pytest.raises(ValueError):
            pseudo_character(dom("pm:2,2"), Tabloid(((1, 2, 3), (4,))))

    def test_unsupported_kind(self, dom):
        with pytest.raises(UnsupportedDomainError):
            pseudo_char_family(dom("cube:3"), 1)

    @pytest.mark.parametrize("spec", SPECTRAL)
    def test_spanning(self, dom, spec):
        d = dom(spec)
        for k in range(d.n + 1):
            rank, dim = check_spanning(d, k)
            assert rank == dim == level_dimension(d, k)

    @pytest.mark.parametrize("spec", SPECTRAL)
    def test_character_level_is_its_degree(self, dom, spec):
        d = dom(spec)
        for c in pseudo_char_family(d, d.n):
            v = np.array(c.values, dtype=object)
            killed = [k for k in range(d.n + 1)
                      if annihilator(d, k).shape[0] == 0 or not np.any(np.array(annihilator(d, k), dtype=object) @ v)]
            assert killed[0] == c.level


class TestInducing:
    def test_trivial(self, dom):
        d = dom("sym:4")
        (triv,) = pseudo_char_family(d, 0)
        w = verify_inducing(d, triv)
        assert w.dprime == 0 and len(w.parts) == d.size

    def test_s4_shape_22(self, dom):
        d = dom("sym:4")
        c = pseudo_character(d, Tabloid(((1, 2), (3, 4))), Tabloid(((1, 2), (3, 4))))
        w = verify_inducing(d, c)
        assert w.meets_claim and w.dprime == 2
        assert column_pairs(c.B) == [(1, 3), (2, 4)]

    @pytest.mark.parametrize("spec", ["sym:3", "sym:4", "ms:2,2", "ms:2,3", "ms:1,1,2", "pm:2,2"])
    def test_every_character_meets_its_claim(self, dom, spec):
        d = dom(spec)
        for c in pseudo_char_family(d, d.n):
            w = verify_inducing(d, c)
            assert w.meets_claim
            assert sorted(i for part in w.parts for i in part) == c.support
            assert all(len(part) == 1 << w.dprime for part in w.parts)

    def test_pm6_shape_222_reaches_one(self, dom):
        # the pm6 point indicator has degree 2 and sensitivity 1, so no level-2
        # witness there can induce a 2-cube
        d = dom("pm:3,2")
        for c in pseudo_char_family(d, 2):
            if c.shape == (2, 2, 2):
                assert verify_inducing(d, c).dprime == 1
        f = BooleanFunction(d, 1)
        assert (degree(f), sensitivity(f)) == (2, 1)


class TestDegreeWitness:
    def test_constant(self, dom):
        d = dom("sym:3")
        w = degree_witness(BooleanFunction.constant(d, 1))
        assert w.degree == 0 and w.correlation == d.size

    def test_sign(self, dom):
        d = dom("sym:3")
        even = BooleanFunction.from_predicate(
            d, lambda labs: sum(1 for (i, a) in labs for (j, b) in labs if i < j and a > b) % 2 == 0)
        w = degree_witness(even)
        assert w.character.shape == (1, 1, 1) and w.correlation != 0

    @settings(max_examples=30)
    @given(st.sampled_from(["sym:3", "ms:2,2", "ms:1,1,2", "sym:4"]), st.data())
    def test_sensitivity_bound_from_witness(self, spec, data):
        from boolmeasures.catalog import build
        d = build(spec)
        f = BooleanFunction(d, data.draw(st.integers(1, (1 << d.size) - 2)))
        s, dprime, ok = sensitivity_witness_bound(f)
        assert ok and s * s >= dprime


class TestTGood:
    def test_broken_row_sums(self, dom):
        d = dom("sym:3")
        A = [[Fraction(0)] * d.size for _ in range(d.size)]
        rep = verify_t_good(d, A, 1)
        assert rep.properties[1].passed and rep.properties[2].passed
        assert not rep.properties[3].passed

    def test_sym3(self, dom):
        d = dom("sym:3")
        rep = verify_t_good(d, derangement_matrix(d), 1)
        assert rep.omega == Fraction(2, 4)
        assert rep.passed(1, 2, 3)

    def test_non_square(self, dom):
        with pytest.raises(ValueError):
            verify_t_good(dom("sym:3"), [[1]], 1)


class TestHoffman:
    def test_empty_family(self, dom):
        d = dom("sym:4")
        rep = hoffman_check(d, derangement_matrix(d), [], 1)
        assert rep.mu == 0 and rep.within and not rep.equality

    def test_non_intersecting_family(self, dom):
        d = dom("sym:4")
        ident = d.point_of([(i, i) for i in range(1, 5)])
        other = d.point_of([(1, 2), (2, 1), (3, 4), (4, 3)])
        with pytest.raises(FamilyError):
            hoffman_check(d, derangement_matrix(d), [ident, other], 1)

    def test_cross_star(self, dom):
        d = dom("sym:4")
        star = [i for i, p in enumerate(d.points) if (1, 1) in d.label_set(p)]
        rep = hoffman_cross_check(d, star, star, 1)
        assert rep.equality and rep.same_family and rep.degree == 1
        smaller = hoffman_cross_check(d, star[:3], star, 1)
        assert smaller.within and not smaller.equality


def test_star_lemma_needs_sym(dom):
    with pytest.raises(UnsupportedDomainError):
        star_lemma_check(dom("cube:3"), 1)
    rep = star_lemma_check(dom("sym:3"), 1)
    assert rep.holds and rep.checked == 4


@pytest.mark.parametrize("kind,shape,level", [("sym", (3, 1), 1), ("pm", (4, 2), 1),
                                              ("pm", (2, 2, 2), 2), ("ms", (3, 2), 2)])
def test_character_level(kind, shape, level):
    assert character_level(kind, shape) == level
