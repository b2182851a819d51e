import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from boolmeasures.catalog import (DomainSpec, DomainTooLargeError, SpecError, build,
                                  estimate_points, indicator, membership, parameter_table,
                                  sym_as_pm_relabel, symmetry_group, universe)
from boolmeasures.domain import chunk_size, conflict_bound, max_degree_param, sensitivity_ratio_lb

DESK = ["cube:3", "product:2,3,2", "sym:3", "sym:4", "pm:2,2", "pm:3,2", "pm:2,1,1", "ms:2,3",
        "ms:1,1,2", "ms:2,2"]


class TestSpec:
    @pytest.mark.parametrize("text", ["sym:4", "pm:3,2", "ms:2,3", "cube:4", "prod:2,3,2"])
    def test_roundtrip(self, text):
        assert str(DomainSpec.parse(text)) == text

    def test_aliases(self):
        assert DomainSpec.parse("symmetric-group:3") == DomainSpec.parse("sym:3")
        assert DomainSpec.parse("product:2,2").kind == "product"

    @pytest.mark.parametrize("text", ["sym", "nope:3", "pm:1,2", "pm:3,1", "product:1,2",
                                      "ms:3", "cube:x"])
    def test_invalid(self, text):
        with pytest.raises(SpecError):
            DomainSpec.parse(text)


class TestBuild:
    @pytest.mark.parametrize("spec,points,queries", [
        ("sym:4", 24, 8), ("pm:3,2", 15, 6), ("ms:2,3", 10, 5), ("cube:3", 8, 3),
        ("product:2,3,2", 12, 3), ("pm:2,1,1", 2, 4), ("ms:1,1,2", 12, 4)])
    def test_sizes(self, dom, spec, points, queries):
        d = dom(spec)
        assert d.size == points == estimate_points(spec)
        assert len(d.queries) == queries

    @pytest.mark.parametrize("n", range(1, 7))
    def test_size_formulas(self, n):
        assert estimate_points(f"sym:{n}") == math.factorial(n)
        assert estimate_points(f"cube:{n}") == 2 ** n
        if n >= 2:
            assert estimate_points(f"pm:{n},2") == math.prod(range(2 * n - 1, 0, -2))
            assert estimate_points(f"ms:{n},{n}") == math.comb(2 * n, n)

    def test_cap(self):
        with pytest.raises(DomainTooLargeError) as info:
            build("sym:9", cap=1000)
        assert info.value.estimate == math.factorial(9)

    def test_huge_hypermatching_universe_refused(self):
        with pytest.raises(DomainTooLargeError):
            universe(DomainSpec.parse("pm:12,3,3"))

    def test_sym_as_bipartite_matching(self, dom):
        for n in (3, 4):
            sym, pm = dom(f"sym:{n}"), dom(f"pm:{n},1,1")
            relabel = sym_as_pm_relabel(n)
            mapped = {frozenset(relabel[lab] for lab in sym.label_set(p)) for p in sym.points}
            assert mapped == {frozenset(pm.label_set(p)) for p in pm.points}

    def test_symmetry_group_sizes(self, dom):
        # (S_3 x S_3) x Z_2 acts faithfully on S_3 (trivial centre); S_6 acts faithfully on M6
        assert len(symmetry_group(dom("sym:3"))) == 72
        assert len(symmetry_group(dom("pm:3,2"))) == 720


class TestMembership:
    def test_examples(self):
        assert membership("sym:3", indicator("sym:3", [(1, 2), (2, 3), (3, 1)]))
        assert not membership("sym:3", indicator("sym:3", [(1, 2), (2, 2), (3, 1)]))
        m6 = [((1, 1), (1, 2)), ((1, 3), (1, 4)), ((1, 5), (1, 6))]
        assert membership("pm:3,2", indicator("pm:3,2", m6))

    @pytest.mark.parametrize("spec", DESK)
    def test_agrees_with_enumeration(self, dom, spec):
        d = dom(spec)
        assert all(membership(spec, p) for p in d.points)
        rng = random.Random(spec)
        points = set(d.points)
        tried = 0
        while tried < 100:
            cand = sum(1 << e for e in rng.sample(range(d.universe_size), d.n))
            if cand in points:
                continue
            tried += 1
            assert not membership(spec, cand)

    def test_out_of_range(self):
        assert not membership("cube:2", 1 << 10)
        assert not membership("cube:2", -1)


class TestParameterTable:
    @pytest.mark.parametrize("spec", DESK)
    def test_matches_brute_force(self, dom, spec):
        d = dom(spec)
        p = parameter_table(spec)
        assert p.chunk == chunk_size(d)
        assert p.max_degree == max_degree_param(d)
        assert p.conflict_bound == int(conflict_bound(d))
        if p.sens_ratio_lb is not None:
            assert p.sens_ratio_lb <= sensitivity_ratio_lb(d).value

    def test_examples(self):
        cube = parameter_table("product:2,2,2")
        assert (cube.max_degree, cube.conflict_bound, cube.chunk) == (1, 3, 1)
        assert cube.bs_ratio_lb == cube.sens_ratio_lb == 1
        bip = parameter_table("pm:4,1,1")
        assert (bip.max_degree, bip.conflict_bound, bip.chunk) == (2, 4, 2)
        assert bip.sens_ratio_lb == pytest.approx(1 / 3)
        sl = parameter_table("ms:2,3")
        assert (sl.conflict_bound, sl.max_degree) == (1, 1)


@settings(max_examples=15)
@given(st.integers(1, 4), st.integers(1, 4))
def test_multislice_conflict_bound_formula(a, b):
    spec = DomainSpec("ms", (a, b))
    assert parameter_table(spec).conflict_bound == int(conflict_bound(build(spec))) == min(a, b) // 2
