"""Robinson-Schensted-Knuth correspondence and the shape census of catalog domains."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

from .domain import Domain
from .measures import UnsupportedDomainError, level_dimension


@dataclass(frozen=True)
class YoungTableau:
    rows: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def size(self) -> int:
        return sum(self.shape)

    def columns(self) -> list[tuple[int, ...]]:
        if not self.rows:
            return []
        return [tuple(r[c] for r in self.rows if len(r) > c) for c in range(len(self.rows[0]))]

    def transpose(self) -> YoungTableau:
        return YoungTableau(tuple(self.columns()))

    def is_semistandard(self) -> bool:
        rows_ok = all(a <= b for r in self.rows for a, b in zip(r, r[1:]))
        cols_ok = all(a < b for c in self.columns() for a, b in zip(c, c[1:]))
        return rows_ok and cols_ok

    def is_standard(self) -> bool:
        entries = sorted(v for r in self.rows for v in r)
        return (entries == list(range(1, self.size + 1)) and self.is_semistandard()
                and all(a < b for r in self.rows for a, b in zip(r, r[1:])))

    def content(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for r in self.rows:
            for v in r:
                out[v] = out.get(v, 0) + 1
        return out

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class GeneralizedPermutation:
    top: tuple[int, ...]
    bottom: tuple[int, ...]

    def __post_init__(self):
        if len(self.top) != len(self.bottom):
            raise ValueError("rows of a generalized permutation must have equal length")
        for r in range(len(self.top) - 1):
            if self.top[r] > self.top[r + 1]:
                raise ValueError("top row must be weakly increasing")
            if self.top[r] == self.top[r + 1] and self.bottom[r] > self.bottom[r + 1]:
                raise ValueError("bottom row must weakly increase under equal top entries")

    @classmethod
    def from_word(cls, word: Sequence[int]) -> GeneralizedPermutation:
        return cls(tuple(range(1, len(word) + 1)), tuple(word))


def rsk(w: GeneralizedPermutation) -> tuple[YoungTableau, YoungTableau]:
    """Row insertion of the bottom row; P holds inserted values, Q records the top row."""
    P: list[list[int]] = []
    Q: list[list[int]] = []
    for top, x in zip(w.top, w.bottom):
        r = 0
        while True:
            if r == len(P):
                P.append([x])
                Q.append([top])
                break
            row = P[r]
            pos = bisect.bisect_right(row, x)
            if pos == len(row):
                row.append(x)
                Q[r].append(top)
                break
            row[pos], x = x, row[pos]
            r += 1
    return YoungTableau(tuple(map(tuple, P))), YoungTableau(tuple(map(tuple, Q)))


def rs_shape(word: Sequence[int]) -> tuple[int, ...]:
    return rsk(GeneralizedPermutation.from_word(word))[0].shape


def greene_invariant(word: Sequence[int], k: int, decreasing: bool = False, strict: bool = True) -> int:
    """Largest union of k monotone subsequences, by exhaustive search over subsets."""
    if k < 1:
        raise ValueError("k must be positive")
    n = len(word)
    seq = [-v for v in word] if decreasing else list(word)

    def fits(a, b):
        return a < b if strict else a <= b

    def coverable(idx: list[int]) -> bool:
        tails: list = []

        def place(i: int) -> bool:
            if i == len(idx):
                return True
            v = seq[idx[i]]
            tried = set()
            for c in range(len(tails)):
                if tails[c] in tried or not fits(tails[c], v):
                    continue
                tried.add(tails[c])
                old, tails[c] = tails[c], v
                if place(i + 1):
                    return True
                tails[c] = old
            if len(tails) < k:
                tails.append(v)
                if place(i + 1):
                    return True
                tails.pop()
            return False

        return place(0)

    by_size: dict[int, list[int]] = {}
    for mask in range(1 << n):
        by_size.setdefault(bin(mask).count("1"), []).append(mask)
    for size in range(n, -1, -1):
        for mask in by_size[size]:
            if coverable([i for i in range(n) if (mask >> i) & 1]):
                return size
    return 0


# ---------------------------------------------------------------- point encodings


def _kind(d: Domain) -> str:
    spec = d.spec
    if spec is None:
        raise UnsupportedDomainError("the census needs a catalog domain")
    if spec.kind == "sym":
        return "sym"
    if spec.kind == "ms":
        return "ms"
    if spec.kind == "pm" and spec.params[1:] == (2,):
        return "pm"
    if spec.kind == "cube" or (spec.kind == "product" and len(set(spec.params)) == 1):
        return "prod"
    raise UnsupportedDomainError(f"no RSK census for {spec}")


def permutation_of(d: Domain, x: int) -> tuple[int, ...]:
    """One-line notation pi(1)..pi(n) of a symmetric-group point."""
    return tuple(j for _, j in d.label_set(d.points[x]))


def matching_permutation(d: Domain, x: int) -> tuple[int, ...]:
    """The fixed-point-free involution whose 2-cycles are the matching's edges."""
    mate = [0] * (2 * d.spec.n)
    for (_, a), (_, b) in d.label_set(d.points[x]):
        mate[a - 1], mate[b - 1] = b, a
    return tuple(mate)


def multislice_permutation(colours: Sequence[int]) -> tuple[int, ...]:
    """Coordinates of colour 1 in increasing order, then colour 2, and so on."""
    return tuple(i + 1 for c in sorted(set(colours)) for i, v in enumerate(colours) if v == c)


def multislice_word(d: Domain, x: int) -> GeneralizedPermutation:
    colours = [c for _, c in d.label_set(d.points[x])]
    top = tuple(sorted(colours))
    return GeneralizedPermutation(top, multislice_permutation(colours))


def product_word(d: Domain, x: int) -> tuple[int, ...]:
    offset = 1 if d.spec.kind == "cube" else 0
    return tuple(v + offset for _, v in d.label_set(d.points[x]))


def rsk_matching(d: Domain, x: int) -> tuple[YoungTableau, tuple[int, ...]]:
    """(tableau, lambda) where the transposed RS shape of the involution is 2*lambda."""
    P, Q = rsk(GeneralizedPermutation.from_word(matching_permutation(d, x)))
    if P != Q:
        raise AssertionError("insertion and recording tableaux differ for an involution")
    shape = P.transpose().shape
    if any(k % 2 for k in shape):
        raise AssertionError(f"transposed shape {shape} has an odd part")
    return P, tuple(k // 2 for k in shape)


def point_shape(d: Domain, x: int) -> tuple[int, ...]:
    """The census shape: RS shape (sym, ms, products) or transposed shape 2*lambda (pm)."""
    kind = _kind(d)
    if kind == "sym":
        return rs_shape(permutation_of(d, x))
    if kind == "pm":
        _, lam = rsk_matching(d, x)
        return tuple(2 * k for k in lam)
    if kind == "ms":
        return rsk(multislice_word(d, x))[0].shape
    return rs_shape(product_word(d, x))


def shape_level(d: Domain, shape: Sequence[int]) -> int:
    n = d.spec.n
    first = shape[0] // 2 if _kind(d) == "pm" else shape[0]
    return n - first


def decomposition_census(d: Domain) -> dict[tuple[int, ...], list[int]]:
    out: dict[tuple[int, ...], list[int]] = {}
    for x in range(d.size):
        out.setdefault(point_shape(d, x), []).append(x)
    return dict(sorted(out.items(), reverse=True))


def level_increments(d: Domain) -> tuple[dict[int, int], dict[int, int]]:
    """(census size per level, dim of pure-degree space per level)."""
    if _kind(d) == "prod":
        raise UnsupportedDomainError("product censuses are not graded by degree")
    census: dict[int, int] = {}
    for shape, pts in decomposition_census(d).items():
        lvl = shape_level(d, shape)
        census[lvl] = census.get(lvl, 0) + len(pts)
    dims = {}
    prev = 0
    for k in range(d.n + 1):
        cur = level_dimension(d, k)
        if cur != prev:
            dims[k] = cur - prev
        prev = cur
    return dict(sorted(census.items())), dims


def is_bijective(d: Domain) -> bool:
    """Distinct points give distinct tableau pairs."""
    kind = _kind(d)
    seen = set()
    for x in range(d.size):
        if kind == "sym":
            key = rsk(GeneralizedPermutation.from_word(permutation_of(d, x)))
        elif kind == "pm":
            key = rsk_matching(d, x)[0]
        elif kind == "ms":
            key = rsk(multislice_word(d, x))
        else:
            key = rsk(GeneralizedPermutation.from_word(product_word(d, x)))
        seen.add(key)
    return len(seen) == d.size


# ---------------------------------------------------------------- tableau enumeration


def standard_tableaux(shape: Sequence[int]) -> list[YoungTableau]:
    """All standard tableaux, built by placing n, n-1, ... into outer corners."""
    shape = tuple(shape)
    n = sum(shape)
    if n == 0:
        return [YoungTableau(())]
    out = []
    for r, length in enumerate(shape):
        if length and (r + 1 == len(shape) or shape[r + 1] < length):
            smaller = list(shape)
            smaller[r] -= 1
            while smaller and smaller[-1] == 0:
                smaller.pop()
            for t in standard_tableaux(smaller):
                rows = [list(row) for row in t.rows] + [[] for _ in range(len(shape) - len(t.rows))]
                rows[r].append(n)
                out.append(YoungTableau(tuple(tuple(row) for row in rows)))
    return out


def semistandard_tableaux(shape: Sequence[int], content: Sequence[int]) -> list[YoungTableau]:
    """Semistandard tableaux with content[i] copies of i+1, largest entries placed first."""
    shape = tuple(shape)
    if sum(shape) != sum(content):
        return []
    if not content:
        return [YoungTableau(())]
    top = len(content)
    k = content[-1]
    out = []

    def strips(rows: list[int], remaining: int, r: int, taken: list[int]):
        # a horizontal strip: at most one cell per column, removed from row ends
        if r == len(rows):
            if remaining == 0:
                yield taken
            return
        below = rows[r + 1] if r + 1 < len(rows) else 0
        for c in range(0, min(remaining, rows[r] - below) + 1):
            yield from strips(rows, remaining - c, r + 1, taken + [c])

    for cut in strips(list(shape), k, 0, []):
        inner = [a - c for a, c in zip(shape, cut)]
        inner_shape = tuple(v for v in inner if v)
        for t in semistandard_tableaux(inner_shape, content[:-1]):
            rows = [list(row) for row in t.rows] + [[] for _ in range(len(shape) - len(t.rows))]
            for r, c in enumerate(cut):
                rows[r].extend([top] * c)
            out.append(YoungTableau(tuple(tuple(row) for row in rows)))
    return out
