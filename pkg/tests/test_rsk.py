import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from boolmeasures.measures import UnsupportedDomainError
from boolmeasures.rsk import (GeneralizedPermutation, YoungTableau, decomposition_census,
                              greene_invariant, is_bijective, level_increments, permutation_of,
                              point_shape, rs_shape, rsk, rsk_matching, semistandard_tableaux,
                              standard_tableaux)
from boolmeasures.spectral import partitions

perms = st.integers(1, 7).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


def hook_count(shape):
    n = sum(shape)
    conj = [sum(1 for r in shape if r > c) for c in range(shape[0])] if shape else []
    hooks = math.prod(shape[r] - c + conj[c] - r - 1 for r in range(len(shape)) for c in range(shape[r]))
    return math.factorial(n) // hooks


def brute_semistandard(shape, content):
    entries = [i + 1 for i, k in enumerate(content) for _ in range(k)]
    found = set()
    for perm in set(itertools.permutations(entries)):
        rows, i = [], 0
        for k in shape:
            rows.append(tuple(perm[i:i + k]))
            i += k
        t = YoungTableau(tuple(rows))
        if t.is_semistandard():
            found.add(t)
    return found


def inverse(p):
    inv = [0] * len(p)
    for i, v in enumerate(p, 1):
        inv[v - 1] = i
    return inv


def lis(word):
    best = []
    for i, v in enumerate(word):
        best.append(1 + max((best[j] for j in range(i) if word[j] < v), default=0))
    return max(best, default=0)


class TestRSK:
    @pytest.mark.parametrize("word,shape", [((2, 4, 1, 3), (2, 2)), ((1, 2, 3, 4), (4,)),
                                            ((4, 3, 2, 1), (1, 1, 1, 1)), ((3, 1, 4, 2), (2, 2))])
    def test_shapes(self, word, shape):
        assert rs_shape(word) == shape

    @given(perms)
    def test_tableaux_are_standard(self, p):
        P, Q = rsk(GeneralizedPermutation.from_word(p))
        assert P.is_standard() and Q.is_standard() and P.shape == Q.shape

    @given(perms)
    def test_inverse_swaps_tableaux(self, p):
        P, Q = rsk(GeneralizedPermutation.from_word(p))
        assert rsk(GeneralizedPermutation.from_word(inverse(p))) == (Q, P)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_bijection_on_permutations(self, n):
        pairs = {rsk(GeneralizedPermutation.from_word(p)) for p in itertools.permutations(range(1, n + 1))}
        assert len(pairs) == math.factorial(n)

    def test_generalized_permutation_validation(self):
        with pytest.raises(ValueError):
            GeneralizedPermutation((1, 2), (1,))
        with pytest.raises(ValueError):
            GeneralizedPermutation((2, 1), (1, 1))
        with pytest.raises(ValueError):
            GeneralizedPermutation((1, 1), (2, 1))

    def test_semistandard_insertion(self):
        P, Q = rsk(GeneralizedPermutation((1, 1, 2, 2, 2), (1, 2, 1, 2, 3)))
        assert P.is_semistandard() and Q.is_semistandard()
        assert P.content() == {1: 2, 2: 2, 3: 1} and Q.content() == {1: 2, 2: 3}


class TestGreene:
    def test_examples(self):
        assert greene_invariant((2, 4, 1, 3), 1) == 2
        assert greene_invariant((2, 4, 1, 3), 2) == 4
        assert greene_invariant((1, 2, 3, 4, 5), 1) == 5
        assert greene_invariant((5, 4, 3, 2, 1), 1, decreasing=True) == 5
        with pytest.raises(ValueError):
            greene_invariant((1,), 0)

    @given(perms)
    def test_k1_is_lis(self, p):
        assert greene_invariant(p, 1) == lis(p)
        assert greene_invariant(p, 1, decreasing=True) == lis([-v for v in p])

    @given(perms)
    def test_partial_sums(self, p):
        shape = rs_shape(p)
        conj = [sum(1 for r in shape if r > c) for c in range(shape[0])]
        for k in range(1, len(p) + 1):
            assert greene_invariant(p, k) == sum(shape[:k])
            assert greene_invariant(p, k, decreasing=True) == sum(conj[:k])


class TestTableauEnumeration:
    @pytest.mark.parametrize("shape", [s for n in range(1, 8) for s in partitions(n)])
    def test_standard_count_is_hook_formula(self, shape):
        ts = standard_tableaux(shape)
        assert len(ts) == len(set(ts)) == hook_count(shape)
        assert all(t.is_standard() and t.shape == shape for t in ts)

    @pytest.mark.parametrize("shape,content", [((2, 1), (1, 1, 1)), ((3, 2), (2, 3)), ((3, 2), (2, 2, 1)),
                                               ((2, 2), (2, 2)), ((3, 1), (1, 2, 1)), ((2, 2, 1), (2, 1, 2))])
    def test_semistandard_against_brute_force(self, shape, content):
        assert set(semistandard_tableaux(shape, content)) == brute_semistandard(shape, content)

    def test_transpose(self):
        t = YoungTableau(((1, 2, 4), (3,)))
        assert t.transpose().rows == ((1, 3), (2,), (4,))
        assert t.transpose().transpose() == t


class TestCensus:
    def test_s4(self, dom):
        census = decomposition_census(dom("sym:4"))
        assert {s: len(v) for s, v in census.items()} == \
            {(4,): 1, (3, 1): 9, (2, 2): 4, (2, 1, 1): 9, (1, 1, 1, 1): 1}

    @pytest.mark.parametrize("n", range(1, 6))
    def test_sym_census_is_square_of_tableau_count(self, dom, n):
        census = decomposition_census(dom(f"sym:{n}"))
        assert {s: len(v) for s, v in census.items()} == {s: hook_count(s) ** 2 for s in partitions(n)}

    def test_m23(self, dom):
        census = decomposition_census(dom("ms:2,3"))
        assert {s: len(v) for s, v in census.items()} == {(5,): 1, (4, 1): 4, (3, 2): 5}

    def test_h333(self, dom):
        d = dom("product:3,3,3")
        census = decomposition_census(d)
        words = ["".join(str(v) for _, v in d.label_set(d.points[x])) for x in census[(1, 1, 1)]]
        assert words == ["321"]

    @pytest.mark.parametrize("edges,lam", [([(1, 6), (2, 5), (3, 4)], (3,)),
                                           ([(1, 4), (2, 5), (3, 6)], (1, 1, 1)),
                                           ([(1, 2), (3, 6), (4, 5)], (2, 1))])
    def test_matchings(self, dom, edges, lam):
        d = dom("pm:3,2")
        x = d.point_of([((1, a), (1, b)) for a, b in edges])
        P, got = rsk_matching(d, x)
        assert got == lam and point_shape(d, x) == tuple(2 * k for k in lam)

    @pytest.mark.parametrize("spec", ["sym:3", "sym:4", "pm:2,2", "pm:3,2", "ms:2,2", "ms:2,3",
                                      "ms:1,1,2", "cube:3", "product:3,3,3"])
    def test_bijective(self, dom, spec):
        d = dom(spec)
        assert is_bijective(d)
        assert sum(len(v) for v in decomposition_census(d).values()) == d.size

    @pytest.mark.parametrize("spec", ["sym:3", "sym:4", "pm:2,2", "pm:3,2", "ms:2,2", "ms:2,3", "ms:1,1,2"])
    def test_levels_match_dimensions(self, dom, spec):
        census, dims = level_increments(dom(spec))
        assert census == dims

    def test_unsupported(self, dom):
        with pytest.raises(UnsupportedDomainError):
            decomposition_census(dom("pm:2,1,1"))
        with pytest.raises(UnsupportedDomainError):
            level_increments(dom("cube:3"))

    def test_permutation_of(self, dom):
        d = dom("sym:4")
        assert Counter(len(set(permutation_of(d, x))) for x in range(d.size)) == {4: 24}
