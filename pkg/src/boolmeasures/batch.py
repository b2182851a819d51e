"""Vectorised measure batteries over many functions on one domain.

Per-point quantities (s, bs, C, fbs, largest minimal block) depend only on the
family of inclusion-minimal flipping blocks at the point, written relative
to the point's own sorted elements. That family is encoded as a 64-bit key,
so identical local situations are solved once. Orbit-invariant quantities
(approximate degree, U) are solved once per symmetry class.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .catalog import symmetry_group
from .domain import AtLeast, Domain, bits, popcount
from .measures import (BooleanFunction, DomainConstants, algorithm1_tree, annihilator,
                       approx_degree, decision_tree_complexity, solve_fbs, state_graph,
                       transposition_neighbours, unambiguous_certificate_complexity)

MAX_KEY_POINT_SIZE = 6


@dataclass(frozen=True)
class LocalProfile:
    s: int
    bs: int
    C: int
    fbs: Fraction
    fbs_dual: Fraction
    largest_minimal: int
    verified: bool


def position_masks(d: Domain) -> np.ndarray:
    """diffpos[x, y]: positions (within x's sorted elements) of the elements of x \\ y."""
    if d.n > MAX_KEY_POINT_SIZE:
        raise ValueError(f"block keys need points of size <= {MAX_KEY_POINT_SIZE}")

    def build():
        out = np.zeros((d.size, d.size), dtype=np.uint8)
        for x, members in enumerate(d.point_members):
            pos = {e: i for i, e in enumerate(members)}
            for y, q in enumerate(d.points):
                m = 0
                for e in members:
                    if not (q >> e) & 1:
                        m |= 1 << pos[e]
                out[x, y] = m
        return out
    return d.cached("position_masks", build)


def antichain(key: int) -> tuple[int, ...]:
    """Inclusion-minimal position masks among those flagged in ``key``."""
    masks = sorted((m for m in bits(key) if m), key=lambda m: (popcount(m), m))
    keep: list[int] = []
    for m in masks:
        if not any(k & m == k for k in keep):
            keep.append(m)
    return tuple(keep)


def _hitting(blocks: tuple[int, ...], n: int) -> int:
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            h = sum(1 << i for i in combo)
            if all(b & h for b in blocks):
                return size
    raise AssertionError("the full point hits every block")


def local_profile(blocks: tuple[int, ...], n: int, chi: int) -> LocalProfile:
    if not blocks:
        return LocalProfile(0, 0, 0, Fraction(0), Fraction(0), 0, True)
    s = kernels.max_packing([b for b in blocks if popcount(b) == chi])[0]
    bs = kernels.max_packing(blocks)[0]
    fb = solve_fbs(blocks, list(range(n)))
    return LocalProfile(s, bs, _hitting(blocks, n), fb.primal, fb.dual,
                        max(popcount(b) for b in blocks), fb.basis_verified)


def value_matrix(d: Domain, fbits: np.ndarray) -> np.ndarray:
    shifts = np.arange(d.size, dtype=np.uint64)
    return ((fbits[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.int8)


def degrees(d: Domain, V: np.ndarray) -> np.ndarray:
    """deg of every function given its 0/1 value matrix (rows = functions)."""
    out = np.full(V.shape[0], -1, dtype=np.int32)
    for k in range(d.n + 1):
        N = annihilator(d, k)
        todo = out < 0
        if N.shape[0] == 0:
            out[todo] = k
            break
        if N.dtype == object:
            inside = np.array([not any(N @ v.astype(object)) for v in V], dtype=bool)
        else:
            inside = ~np.any((V.astype(np.int64) @ N.T) != 0, axis=1)
        out[todo & inside] = k
    return out


def canonical_forms(d: Domain, fbits: np.ndarray, group=None) -> np.ndarray:
    """Smallest image of each function under domain symmetries and complementation."""
    group = symmetry_group(d) if group is None else group
    V = value_matrix(d, fbits).astype(np.uint64)
    shifts = np.arange(d.size, dtype=np.uint64)
    full = np.uint64((1 << d.size) - 1)
    best = np.minimum(fbits, fbits ^ full)
    for perm in group:
        inv = np.argsort(perm)
        g = (V[:, inv] << shifts[None, :]).sum(axis=1, dtype=np.uint64)
        np.minimum(best, np.minimum(g, g ^ full), out=best)
    return best


@dataclass
class Battery:
    domain: Domain
    fbits: np.ndarray
    deg: np.ndarray
    D: np.ndarray
    s: np.ndarray
    bs: np.ndarray
    C: np.ndarray
    C0: np.ndarray
    C1: np.ndarray
    fbs: list[Fraction]
    largest_minimal: np.ndarray
    adeg: np.ndarray | None = None
    U: list | None = None
    alg1_depth: np.ndarray | None = None
    edge_ok: np.ndarray | None = None
    profiles: dict = field(default_factory=dict)
    violations: list[tuple[int, str]] = field(default_factory=list)
    fbs_instances: int = 0
    fbs_mismatches: int = 0
    trees_checked: int = 0

    @property
    def size(self) -> int:
        return len(self.fbits)

    def counts(self) -> Counter:
        return Counter(name for _, name in self.violations)


def _profiles(d: Domain, fbits: np.ndarray):
    chi = min(popcount(x & ~y) for x, y in itertools.combinations(d.points, 2))
    keys = kernels.block_keys(fbits, position_masks(d))
    uniq, inverse = np.unique(keys, return_inverse=True)
    by_chain: dict[tuple[int, ...], LocalProfile] = {}
    table = []
    for key in uniq:
        chain = antichain(int(key))
        prof = by_chain.get(chain)
        if prof is None:
            prof = by_chain[chain] = local_profile(chain, d.n, chi)
        table.append(prof)
    return table, inverse.reshape(keys.shape), by_chain


def _orbit_values(func, d: Domain, reps: list[int], extra: dict, workers: int) -> dict[int, object]:
    if workers > 1 and len(reps) > 64:
        chunks = [reps[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_orbit_worker, [(func, str(d.spec), c, extra) for c in chunks])
        out = {}
        for p in parts:
            out.update(p)
        return out
    return {r: func(BooleanFunction(d, r), extra.get(r)) for r in reps}


def _orbit_worker(args):
    func, spec, reps, extra = args
    from .catalog import build
    d = build(spec)
    return {r: func(BooleanFunction(d, r), extra.get(r)) for r in reps}


def _adeg(f, _):
    return approx_degree(f)


def _u(f, upper):
    return unambiguous_certificate_complexity(f, upper=upper, budget=_U_BUDGET)


_U_BUDGET = 200_000


def run_battery(d: Domain, fbits, *, with_adeg: bool = True, with_u: bool = True,
                with_alg1: bool = True, replay_trees: bool = False, workers: int = 1,
                constants: DomainConstants | None = None) -> Battery:
    """Compute measures for every function and check the relation chains."""
    fbits = np.asarray(fbits, dtype=np.uint64)
    if d.size > 64:
        raise ValueError("batteries support domains with at most 64 points")
    k = DomainConstants.of(d) if constants is None else constants
    V = value_matrix(d, fbits)
    table, inv, by_chain = _profiles(d, fbits)
    s_pt = np.array([p.s for p in table], dtype=np.int32)[inv]
    bs_pt = np.array([p.bs for p in table], dtype=np.int32)[inv]
    c_pt = np.array([p.C for p in table], dtype=np.int32)[inv]
    mm_pt = np.array([p.largest_minimal for p in table], dtype=np.int32)[inv]
    ones = V.astype(bool)
    C1 = np.where(ones, c_pt, 0).max(axis=1)
    C0 = np.where(~ones, c_pt, 0).max(axis=1)
    fbs_vals = [p.fbs for p in table]
    fbs = [max((fbs_vals[j] for j in set(inv[i].tolist())), default=Fraction(0)) for i in range(len(fbits))]
    g = state_graph(d)
    D = np.asarray(kernels.dt_depths(*g.kernel_arrays(), fbits), dtype=np.int32)
    bat = Battery(d, fbits, degrees(d, V), D, s_pt.max(axis=1), bs_pt.max(axis=1),
                  np.maximum(C0, C1), C0, C1, fbs, mm_pt.max(axis=1), profiles=by_chain)
    bat.fbs_instances = len(by_chain)
    bat.fbs_mismatches = sum(1 for p in by_chain.values() if p.fbs != p.fbs_dual or not p.verified)

    if with_adeg or with_u:
        canon = canonical_forms(d, fbits)
        reps, rep_of = np.unique(canon, return_inverse=True)
        rep_list = [int(r) for r in reps]
        if with_adeg:
            vals = _orbit_values(_adeg, d, rep_list, {}, workers)
            bat.adeg = np.array([vals[r] for r in rep_list], dtype=np.int32)[rep_of]
        if with_u:
            rep_D = dict(zip(rep_list, kernels.dt_depths(*g.kernel_arrays(), reps).tolist()))
            vals = _orbit_values(_u, d, rep_list, rep_D, workers)
            bat.U = [vals[rep_list[j]] for j in rep_of.tolist()]

    if d.spec is not None and d.spec.kind == "sym":
        nb = np.array(transposition_neighbours(d), dtype=np.int64)
        t = (V[:, nb] != V[:, :, None]).sum(axis=2)
        bat.edge_ok = np.all(t <= 2 * d.n * s_pt, axis=1)

    if with_alg1 or replay_trees:
        depths = np.full(len(fbits), -1, dtype=np.int32)
        for i, fb in enumerate(fbits.tolist()):
            f = BooleanFunction(d, fb)
            if replay_trees:
                depth, tree = decision_tree_complexity(f)
                if depth != D[i] or not tree.computes(f) or not tree.well_formed():
                    bat.violations.append((i, "optimal tree replay"))
                bat.trees_checked += 1
            if with_alg1 and bat.C[i] <= k.lam:
                tree = algorithm1_tree(f, _cc_from(bat, i), k.lam)
                depths[i] = tree.depth()
                if replay_trees and not (tree.computes(f) and tree.well_formed()):
                    bat.violations.append((i, "algorithm 1 tree replay"))
        if with_alg1:
            bat.alg1_depth = depths

    _check(bat, k)
    return bat


class _CC:
    __slots__ = ("C", "C0", "C1")

    def __init__(self, C, C0, C1):
        self.C, self.C0, self.C1 = C, C0, C1


def _cc_from(bat: Battery, i: int):
    return _CC(int(bat.C[i]), int(bat.C0[i]), int(bat.C1[i]))


def _check(bat: Battery, k: DomainConstants) -> None:
    v = bat.violations
    bt_num, bt_den = k.Bt.numerator, k.Bt.denominator
    b_num, b_den = k.B.numerator, k.B.denominator
    lam = int(k.lam)

    def flag(mask, name):
        for i in np.nonzero(mask)[0].tolist():
            v.append((i, name))

    # per-point chains, checked once per local profile
    for chain, p in bat.profiles.items():
        if not (p.s <= p.bs <= p.fbs <= p.C) or p.fbs != p.fbs_dual:
            v.append((-1, f"local chain s<=bs<=fbs<=C at blocks {chain}"))
    fbs_ok = np.array([bat.fbs[i] <= bat.C[i] and bat.bs[i] <= bat.fbs[i] for i in range(bat.size)])
    flag(~fbs_ok, "bs<=fbs<=C")
    flag(bat.deg > bat.D, "deg<=D")
    flag(bat.s > bat.bs, "s<=bs")
    flag((bat.deg <= 1) & (bat.bs > 1), "deg<=1=>bs<=1")
    flag(bat.C * bt_num > bat.s * bat.bs * bt_den, "C<=s*bs/Bt")
    flag(bat.C * b_num > bat.bs ** 2 * b_den, "C<=bs^2/B")
    flag(bat.largest_minimal * bt_num > bat.s * bt_den, "minimal block<=s/Bt")
    flag(bat.largest_minimal * b_num > bat.bs * b_den, "minimal block<=bs/B")
    within = bat.C <= lam
    flag(within & (bat.D > k.delta * bat.C0 * bat.C1), "D<=Delta*C0*C1")
    if lam > 0:
        # D * B^2 <= max(Delta, n/Lambda) * bs^4, scaled by Lambda
        lhs = bat.D.astype(object) * b_num ** 2 * lam
        rhs = max(k.delta * lam, k.n) * bat.bs.astype(object) ** 4 * b_den ** 2
        flag(lhs > rhs, "D<=B^-2 max(Delta,n/Lambda) bs^4")
    if bat.adeg is not None:
        flag(bat.adeg > bat.deg, "adeg<=deg")
        flag(bat.bs > 6 * bat.adeg ** 2, "bs<=6adeg^2")
    if bat.U is not None:
        for i, u in enumerate(bat.U):
            if isinstance(u, AtLeast):
                if u > bat.D[i]:
                    v.append((i, "U<=D"))
                continue
            if not bat.C[i] <= u <= bat.D[i]:
                v.append((i, "C<=U<=D"))
    if bat.alg1_depth is not None:
        ran = bat.alg1_depth >= 0
        flag(ran & (bat.alg1_depth > k.delta * bat.C0 * bat.C1), "alg1<=Delta*C0*C1")
        flag(ran & (bat.alg1_depth < bat.D), "alg1>=D")
    if bat.edge_ok is not None:
        flag(~bat.edge_ok, "t(f,x)<=2n*s(f,x)")


def sensitivity_degree(d: Domain, fbits) -> tuple[np.ndarray, np.ndarray]:
    """(s, deg) for every function; the cheap path for sensitivity-theorem sweeps."""
    fbits = np.asarray(fbits, dtype=np.uint64)
    chi = min(popcount(x & ~y) for x, y in itertools.combinations(d.points, 2))
    keys = kernels.block_keys(fbits, position_masks(d))
    uniq, inv = np.unique(keys, return_inverse=True)
    sens = {}
    svals = []
    for key in uniq.tolist():
        chain = antichain(key)
        if chain not in sens:
            sens[chain] = kernels.max_packing([b for b in chain if popcount(b) == chi])[0]
        svals.append(sens[chain])
    s = np.array(svals, dtype=np.int32)[inv.reshape(keys.shape)].max(axis=1)
    return s, degrees(d, value_matrix(d, fbits))


def all_functions(d: Domain) -> np.ndarray:
    if d.size > 24:
        raise ValueError(f"2^{d.size} functions is beyond exhaustive scale")
    return np.arange(1 << d.size, dtype=np.uint64)


def random_functions(d: Domain, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    raw = rng.integers(0, 1 << 62, size=count, dtype=np.int64).astype(np.uint64)
    if d.size > 62:
        raise ValueError("random batteries need at most 62 points")
    return raw & np.uint64((1 << d.size) - 1)
