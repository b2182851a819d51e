"""Dispatch for the hot loops: compiled extension when importable, else the Python fallback.

Set ``BOOLMEASURES_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("BOOLMEASURES_PURE"):
        raise ImportError("pure mode requested")
    from . import _ckernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels

#: masks wider than 64 bits never reach the compiled code
_WORD = (1 << 64) - 1


def max_packing(masks, budget: int | None = None) -> tuple[int, bool]:
    masks = list(masks)
    if _compiled is not None and all(m <= _WORD for m in masks):
        return _compiled.max_packing(masks, budget)
    return _pykernels.max_packing(masks, budget)


def dt_depths(state_masks, q_ptr, c_ptr, children, fbits):
    return _impl.dt_depths(state_masks, q_ptr, c_ptr, children, fbits)


def block_keys(fbits, diffpos):
    return _impl.block_keys(fbits, diffpos)


def span_filter(annihilator, npoints: int):
    return _impl.span_filter(annihilator, npoints)


def partition_exists(tile_ptr, tile_link, tile_size, fbits: int, full: int, k: int,
                     budget: int | None = None) -> bool:
    if _compiled is not None and full <= _WORD:
        return _compiled.partition_exists(tile_ptr, tile_link, tile_size, fbits, full, k, budget)
    return _pykernels.partition_exists(tile_ptr, tile_link, tile_size, fbits, full, k, budget)
