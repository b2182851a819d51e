"""Reference implementations of the hot loops (pure Python and numpy)."""

from __future__ import annotations

import numpy as np

from .exact import BudgetExceeded


def _reduce_minimal(masks) -> list[int]:
    uniq = sorted(set(m for m in masks if m), key=lambda m: (m.bit_count(), m))
    keep: list[int] = []
    for m in uniq:
        if not any(k & m == k for k in keep):
            keep.append(m)
    return keep


def max_packing(masks, budget: int | None = None) -> tuple[int, bool]:
    """Maximum number of pairwise disjoint nonempty masks; (count, exact)."""
    sets = _reduce_minimal(masks)
    if not sets:
        return 0, True
    best = 0
    nodes = 0
    exact = True

    def rec(avail: list[int], count: int):
        nonlocal best, nodes, exact
        if count > best:
            best = count
        if not avail or not exact:
            return
        union = 0
        for m in avail:
            union |= m
        smallest = avail[0].bit_count()
        if count + min(len(avail), union.bit_count() // smallest) <= best:
            return
        nodes += 1
        if budget is not None and nodes > budget:
            exact = False
            return
        e = union & -union
        with_e = [m for m in avail if m & e]
        without = [m for m in avail if not m & e]
        for m in with_e:
            rec([a for a in without if not a & m], count + 1)
        rec(without, count)

    rec(sets, 0)
    return best, exact


def dt_depths(state_masks, q_ptr, c_ptr, children, fbits) -> np.ndarray:
    """Optimal decision-tree depth for each function, vectorised over functions."""
    F = np.asarray(fbits, dtype=np.uint64)
    nstates = len(state_masks)
    depth = np.zeros((nstates, F.shape[0]), dtype=np.int16)
    inf = np.int16(32000)
    for s in range(nstates):
        m = np.uint64(state_masks[s])
        fm = F & m
        mono = (fm == 0) | (fm == m)
        best = np.full(F.shape[0], inf, dtype=np.int16)
        for q in range(q_ptr[s], q_ptr[s + 1]):
            worst = np.zeros(F.shape[0], dtype=np.int16)
            for c in range(c_ptr[q], c_ptr[q + 1]):
                np.maximum(worst, depth[children[c]], out=worst)
            np.minimum(best, worst, out=best)
        depth[s] = np.where(mono, 0, best + 1)
    return depth[nstates - 1].astype(np.int32)


def block_keys(fbits, diffpos) -> np.ndarray:
    """key[f, x] = OR over y with f(y) != f(x) of 1 << diffpos[x, y]."""
    F = np.asarray(fbits, dtype=np.uint64)
    dp = np.asarray(diffpos, dtype=np.uint64)
    npts = dp.shape[0]
    shifts = np.arange(npts, dtype=np.uint64)
    vals = ((F[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)
    out = np.zeros((F.shape[0], npts), dtype=np.uint64)
    for x in range(npts):
        flip = (vals != vals[:, x:x + 1]).astype(np.uint64)
        out[:, x] = np.bitwise_or.reduce(flip << dp[x][None, :], axis=1)
    return out


def span_filter(annihilator, npoints: int, chunk_bits: int = 18) -> np.ndarray:
    """All 0/1 vectors v of length npoints with annihilator @ v == 0, as bitmasks."""
    N = np.asarray(annihilator, dtype=np.int64)
    if N.size == 0:
        return np.arange(1 << npoints, dtype=np.uint64)
    if int(np.abs(N).sum(axis=1).max()) >= 2 ** 52:
        raise OverflowError("annihilator entries too large for exact float products")
    Nf = N.T.astype(np.float64)
    found = []
    total = 1 << npoints
    step = 1 << min(chunk_bits, npoints)
    shifts = np.arange(npoints, dtype=np.uint64)
    for start in range(0, total, step):
        block = np.arange(start, start + step, dtype=np.uint64)
        vbits = ((block[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.float64)
        res = vbits @ Nf
        ok = ~np.any(res != 0.0, axis=1)
        found.append(block[ok])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.uint64)


def partition_exists(tile_ptr, tile_link, tile_size, fbits: int, full: int, k: int,
                     budget: int | None = None) -> bool:
    """Is there a partition of the points into monochromatic tiles of face size <= k?"""
    failed: set[int] = set()
    nodes = 0

    def rec(rest: int) -> bool:
        nonlocal nodes
        if rest == 0:
            return True
        if rest in failed:
            return False
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExceeded("unambiguous-certificate search budget exhausted")
        p = (rest & -rest).bit_length() - 1
        for t in range(tile_ptr[p], tile_ptr[p + 1]):
            if tile_size[t] > k:
                continue
            lk = int(tile_link[t])
            if lk & ~rest:
                continue
            fl = fbits & lk
            if fl and fl != lk:
                continue
            if rec(rest & ~lk):
                return True
        failed.add(rest)
        return False

    return rec(full)
