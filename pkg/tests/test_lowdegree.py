from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolmeasures.lowdegree import (InfeasibleDecomposition, classify_degree1, cut_values,
                                    degree1_report, enumerate_degree_at_most,
                                    nonneg_degree1_decompose, odd_sets, random_nonneg_degree1,
                                    single_query_functions, sym_degree1_census,
                                    triangle_event, triangle_identity_holds,
                                    triangle_indicator)
from boolmeasures.measures import BooleanFunction, UnsupportedDomainError, degree

M6 = [((1, 1), (1, 2)), ((1, 3), (1, 4)), ((1, 5), (1, 6))]


def perm_fn(d, pred):
    return BooleanFunction.from_predicate(d, lambda labs: pred(dict(labs)))


class TestEnumeration:
    def test_cube3_dictators(self, dom):
        d = dom("cube:3")
        want = {0, 255}
        for i in range(1, 4):
            dic = sum(1 << x for x, p in enumerate(d.points) if (i, 1) in d.label_set(p))
            want |= {dic, dic ^ 255}
        assert set(enumerate_degree_at_most(d, 1)) == want and len(want) == 8

    @pytest.mark.parametrize("spec", ["cube:3", "sym:3", "pm:2,2", "ms:2,2", "ms:1,1,2", "product:3,2"])
    def test_matches_degree_on_every_function(self, dom, spec):
        d = dom(spec)
        for k in (0, 1, 2):
            want = [fb for fb in range(1 << d.size) if degree(BooleanFunction(d, fb)) <= k]
            assert enumerate_degree_at_most(d, k) == want
            assert sorted(enumerate_degree_at_most(d, k, method="filter")) == want

    @pytest.mark.parametrize("spec", ["pm:3,2", "ms:2,3", "sym:4"])
    def test_methods_agree(self, dom, spec):
        d = dom(spec)
        assert enumerate_degree_at_most(d, 1) == sorted(enumerate_degree_at_most(d, 1, "filter"))

    def test_unknown_method(self, dom):
        with pytest.raises(ValueError):
            enumerate_degree_at_most(dom("cube:2"), 1, method="magic")

    def test_cap(self, dom):
        from boolmeasures.catalog import DomainTooLargeError
        with pytest.raises(DomainTooLargeError):
            enumerate_degree_at_most(dom("sym:5"), 1, method="filter")

    @pytest.mark.parametrize("n", [3, 4])
    def test_sym_census(self, dom, n):
        d = dom(f"sym:{n}")
        found = enumerate_degree_at_most(d, 1)
        assert len(found) == sym_degree1_census(n) == len(single_query_functions(d))
        assert set(found) == single_query_functions(d)


class TestClassification:
    def test_row_dictator(self, dom):
        d = dom("sym:3")
        cls = classify_degree1(perm_fn(d, lambda p: p[2] == 3))
        assert cls.tag == "RowDictator" and cls.params[0] == 2

    def test_column_dictator(self, dom):
        d = dom("sym:4")
        # pi(1) = 3 or pi(2) = 3 is a function of pi^-1(3) but of no single pi(i)
        cls = classify_degree1(perm_fn(d, lambda p: p[1] == 3 or p[2] == 3))
        assert cls.tag == "ColumnDictator" and cls.params[0] == 3

    def test_constant(self, dom):
        assert classify_degree1(BooleanFunction.constant(dom("sym:3"), 0)).tag == "Constant"

    def test_triangle(self, dom):
        d = dom("pm:3,2")
        f = BooleanFunction(d, triangle_indicator(d, (1, 2, 3)))
        cls = classify_degree1(f)
        assert cls.tag == "TriangleIndicator" and cls.params == (1, 2, 3, True)
        assert classify_degree1(f.complement()).params == (1, 2, 3, False)

    def test_vertex_match(self, dom):
        d = dom("pm:3,2")
        f = BooleanFunction.from_predicate(d, lambda labs: ((1, 1), (1, 4)) in labs)
        assert classify_degree1(f).tag == "VertexMatchFunction"

    def test_rejects_higher_degree(self, dom):
        d = dom("sym:3")
        with pytest.raises(ValueError):
            classify_degree1(perm_fn(d, lambda p: (p[1], p[2]) in [(1, 2), (2, 3), (3, 1)]))

    @pytest.mark.parametrize("spec", ["sym:3", "sym:4", "pm:2,2", "pm:3,2"])
    def test_no_other(self, dom, spec):
        rep = degree1_report(dom(spec))
        assert rep["other"] == [] and "Other" not in rep["classes"]

    def test_pm6_tally(self, dom):
        rep = degree1_report(dom("pm:3,2"))
        assert set(rep["classes"]) == {"Constant", "VertexMatchFunction", "TriangleIndicator"}
        assert rep["classes"]["Constant"] == 2


class TestCuts:
    def test_example(self, dom):
        d = dom("pm:3,2")
        cv = cut_values(d, d.point_of(M6), (1, 2, 3))
        assert (cv.delta, cv.d) == (1, 0)

    def test_three_sets_are_boolean(self, dom):
        d = dom("pm:3,2")
        for S in odd_sets(d):
            vals = {cut_values(d, x, S).d for x in range(d.size)}
            assert vals == {0, 1}
            event = sum(1 << x for x in range(d.size) if cut_values(d, x, S).d == 1)
            assert event == triangle_event(d, S)

    def test_larger_odd_sets_on_pm10(self, dom):
        d = dom("pm:5,2")
        assert max(cut_values(d, x, (1, 2, 3, 4, 5)).d for x in range(d.size)) == 2

    def test_errors(self, dom):
        d = dom("pm:3,2")
        with pytest.raises(ValueError):
            cut_values(d, 0, (1, 2))
        with pytest.raises(ValueError):
            cut_values(d, 0, (1, 2, 3, 4, 5))
        with pytest.raises(UnsupportedDomainError):
            cut_values(dom("sym:3"), 0, (1, 2, 3))

    def test_identity(self, dom):
        assert triangle_identity_holds(dom("pm:3,2"))


class TestDecompositions:
    def test_single_indicator(self, dom):
        d = dom("sym:3")
        vals = [int((1, 1) in d.label_set(p)) for p in d.points]
        dec = nonneg_degree1_decompose(d, vals)
        assert dec.support == {"(1, 1)": 1}

    def test_constant_one(self, dom):
        d = dom("sym:3")
        dec = nonneg_degree1_decompose(d, [1] * d.size)
        assert sum(dec.coefficients) == 3

    def test_triangle_event(self, dom):
        d = dom("pm:3,2")
        ev = triangle_event(d, (1, 2, 3))
        dec = nonneg_degree1_decompose(d, [(ev >> x) & 1 for x in range(d.size)])
        assert all(dec.evaluate(d, x) == (ev >> x) & 1 for x in range(d.size))

    def test_infeasible_and_invalid(self, dom):
        d = dom("sym:3")
        even = perm_fn(d, lambda p: sum(p[i] > p[j] for i in p for j in p if i < j) % 2 == 0)
        assert degree(even) == 2
        with pytest.raises(InfeasibleDecomposition):
            nonneg_degree1_decompose(d, even.values)
        with pytest.raises(ValueError):
            nonneg_degree1_decompose(d, [-1] + [0] * 5)
        with pytest.raises(UnsupportedDomainError):
            nonneg_degree1_decompose(dom("cube:2"), [0, 0, 0, 1])

    @pytest.mark.parametrize("spec", ["sym:3", "sym:4", "pm:3,2"])
    def test_every_boolean_degree1_function(self, dom, spec):
        d = dom(spec)
        for fb in enumerate_degree_at_most(d, 1):
            vals = [(fb >> x) & 1 for x in range(d.size)]
            dec = nonneg_degree1_decompose(d, vals)
            assert all(c >= 0 for c in dec.coefficients)


@settings(max_examples=25)
@given(st.sampled_from(["sym:3", "sym:4", "pm:2,2", "pm:3,2"]), st.integers(0, 2 ** 32 - 1),
       st.integers(1, 6))
def test_random_round_trip(spec, seed, terms):
    from boolmeasures.catalog import build
    d = build(spec)
    vals = random_nonneg_degree1(d, np.random.default_rng(seed), terms)
    dec = nonneg_degree1_decompose(d, vals)
    assert [dec.evaluate(d, x) for x in range(d.size)] == vals
    assert all(isinstance(c, Fraction) and c >= 0 for c in dec.coefficients)
