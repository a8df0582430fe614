"""Skeletonization, branch tracing, and spur pruning.

Thinning is a two-subiteration neighborhood-template scheme (Zhang-Suen
conditions). Each subiteration deletes its flagged pixels simultaneously
against a snapshot of the mask; a repair step restores one pixel for any
connected component a subiteration would delete outright, so component
counts are preserved. A final pass dissolves any residual 2x2 blocks so
the result is strictly one pixel wide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import ndimage

from .raster import BinaryMask, as_mask
from .segmentation import square_se, dilate

Coord = Tuple[int, int]   # (x, y)


@dataclass(frozen=True)
class Skeleton:
    mask: BinaryMask
    endpoints: Tuple[Coord, ...]
    branchpoints: Tuple[Coord, ...]


@dataclass(frozen=True)
class PruneParams:
    m: int = 0
    min_branch: int = 8

    def __post_init__(self):
        if self.m < 0 or self.min_branch < 0:
            raise ValueError("m and min_branch must be >= 0")


_NEIGHBOR_KERNEL = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]], dtype=np.uint8)

# ring order N, NE, E, SE, S, SW, W, NW as (dy, dx)
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def neighbor_counts(mask: BinaryMask) -> np.ndarray:
    """Number of true 8-neighbors per pixel (outside = background)."""
    return ndimage.convolve(as_mask(mask).astype(np.uint8), _NEIGHBOR_KERNEL,
                            mode="constant", cval=0)


def _ring_values(padded: np.ndarray, y: int, x: int) -> List[int]:
    # y, x are padded coordinates
    return [int(padded[y + dy, x + dx]) for dy, dx in _RING]


def _transitions(ring: List[int]) -> int:
    return sum(1 for a, b in zip(ring, ring[1:] + ring[:1]) if a == 0 and b == 1)


def _zs_ok(ring: List[int], sub: int) -> bool:
    b = sum(ring)
    if not (2 <= b <= 6):
        return False
    if _transitions(ring) != 1:
        return False
    n, e, s, w = ring[0], ring[2], ring[4], ring[6]
    if sub == 0:
        return (n * e * s == 0) and (e * s * w == 0)
    return (n * e * w == 0) and (n * s * w == 0)


def _candidates(padded: np.ndarray, sub: int) -> np.ndarray:
    """Vectorized Zhang-Suen flags; returns boolean array over the core region."""
    p = padded.astype(np.uint8)
    c = p[1:-1, 1:-1]
    ring = [p[1 + dy: p.shape[0] - 1 + dy, 1 + dx: p.shape[1] - 1 + dx]
            for dy, dx in _RING]
    b = np.zeros(c.shape, dtype=np.int16)
    for r in ring:
        b += r
    a = np.zeros(c.shape, dtype=np.int16)
    for r1, r2 in zip(ring, ring[1:] + ring[:1]):
        a += ((r1 == 0) & (r2 == 1)).astype(np.int16)
    n, e, s, w = ring[0], ring[2], ring[4], ring[6]
    if sub == 0:
        direc = ((n & e & s) == 0) & ((e & s & w) == 0)
    else:
        direc = ((n & e & w) == 0) & ((n & s & w) == 0)
    return (c == 1) & (b >= 2) & (b <= 6) & (a == 1) & direc


def _restore_vanished(snapshot: np.ndarray, padded: np.ndarray) -> None:
    """Keep component counts intact: a subiteration may delete a tiny
    component outright (the classic 2x2-square case); restore its
    row-major-first pixel."""
    labels, n = ndimage.label(snapshot, structure=np.ones((3, 3)))
    if n == 0:
        return
    survived = {int(v) for v in np.unique(labels[padded]) if v > 0}
    for lab in range(1, n + 1):
        if lab not in survived:
            ys, xs = np.nonzero(labels == lab)
            padded[ys[0], xs[0]] = True


def thin(mask: BinaryMask) -> BinaryMask:
    """Iterative thinning to a 1-px-wide, connectivity-preserving skeleton.

    Each subiteration deletes all of its flagged pixels simultaneously,
    which peels thick regions symmetrically (sequential deletion would
    collapse diagonal bands into 2-px ladders that erode away).
    """
    mask = as_mask(mask)
    h, w = mask.shape
    padded = np.zeros((h + 2, w + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask

    while True:
        before = padded.copy()
        changed = True
        while changed:
            changed = False
            for sub in (0, 1):
                flags = _candidates(padded, sub)
                if not flags.any():
                    continue
                snapshot = padded.copy()
                padded[1:-1, 1:-1][flags] = False
                _restore_vanished(snapshot, padded)
                if not np.array_equal(snapshot, padded):
                    changed = True
        _dissolve_blocks(padded)
        if np.array_equal(padded, before):
            break
    return padded[1:-1, 1:-1].copy()


def _deletion_preserves_topology(padded: np.ndarray, y: int, x: int) -> bool:
    """Global check: deleting (y, x) keeps the 8-connected foreground
    component count and the 4-connected background component count."""
    fg_before = ndimage.label(padded, structure=np.ones((3, 3)))[1]
    bg_before = ndimage.label(~padded)[1]
    padded[y, x] = False
    fg_after = ndimage.label(padded, structure=np.ones((3, 3)))[1]
    bg_after = ndimage.label(~padded)[1]
    padded[y, x] = True
    return fg_after == fg_before and bg_after == bg_before


def _dissolve_blocks(padded: np.ndarray) -> None:
    """Remove residual 2x2 all-true blocks left at staircases and around
    1-px holes, where the local ring test is too conservative."""
    while True:
        core = padded[1:-1, 1:-1]
        blocks = core[:-1, :-1] & core[:-1, 1:] & core[1:, :-1] & core[1:, 1:]
        if not blocks.any():
            return
        removed = False
        ys, xs = np.nonzero(blocks)
        for by, bx in zip(ys, xs):
            candidates = [(by + dy + 1, bx + dx + 1)
                          for dy, dx in ((0, 0), (0, 1), (1, 0), (1, 1))
                          if padded[by + dy + 1, bx + dx + 1]]
            for y, x in candidates:
                ring = _ring_values(padded, y, x)
                if sum(ring) >= 2 and _transitions(ring) == 1:
                    padded[y, x] = False
                    removed = True
                    break
            if not removed:
                for y, x in candidates:
                    if _deletion_preserves_topology(padded, y, x):
                        padded[y, x] = False
                        removed = True
                        break
            if removed:
                break
        if not removed:
            return    # no deletion is topology-safe; leave the block


def classify(mask: BinaryMask) -> Skeleton:
    """Wrap a 1-px mask with its endpoint/branchpoint lists."""
    mask = as_mask(mask)
    counts = neighbor_counts(mask)
    ends = np.nonzero(mask & (counts == 1))
    branches = np.nonzero(mask & (counts >= 3))
    endpoints = tuple((int(x), int(y)) for y, x in zip(*ends))
    branchpoints = tuple((int(x), int(y)) for y, x in zip(*branches))
    return Skeleton(mask=mask, endpoints=endpoints, branchpoints=branchpoints)


def skeletonize(mask: BinaryMask) -> Skeleton:
    """Thin a mask to its skeleton and classify endpoints/branchpoints."""
    return classify(thin(mask))


# ---------------------------------------------------------------------------
# Branch tracing
# ---------------------------------------------------------------------------

def _neighbors_of(mask: BinaryMask, x: int, y: int) -> List[Coord]:
    h, w = mask.shape
    out = []
    for dy, dx in _RING:
        ny, nx = y + dy, x + dx
        if 0 <= ny < h and 0 <= nx < w and mask[ny, nx]:
            out.append((nx, ny))
    return out


def trace_branches(skeleton: Skeleton) -> List[List[Coord]]:
    """Maximal simple runs between terminals (endpoints/branchpoints).

    Every skeleton pixel belongs to at least one run; isolated pixels give
    single-pixel runs and pure cycles are emitted as one closed run.
    """
    mask = skeleton.mask
    counts = neighbor_counts(mask)
    terminals = set(skeleton.endpoints) | set(skeleton.branchpoints)
    isolated = [(int(x), int(y)) for y, x in zip(*np.nonzero(mask & (counts == 0)))]

    runs: List[List[Coord]] = [[p] for p in isolated]
    visited_edges = set()
    visited_px = set(isolated)

    def walk(start: Coord, first: Coord) -> List[Coord]:
        run = [start, first]
        visited_edges.add(frozenset((start, first)))
        prev, cur = start, first
        while cur not in terminals:
            nxt = [n for n in _neighbors_of(mask, *cur) if n != prev]
            if len(nxt) != 1:
                # junction-adjacent ambiguity: stop the run here
                break
            step = nxt[0]
            visited_edges.add(frozenset((cur, step)))
            run.append(step)
            prev, cur = cur, step
        return run

    for t in sorted(terminals, key=lambda p: (p[1], p[0])):
        for n in _neighbors_of(mask, *t):
            if frozenset((t, n)) in visited_edges:
                continue
            run = walk(t, n)
            runs.append(run)
            visited_px.update(run)
    visited_px.update(p for p in terminals)

    # leftover pixels belong to pure cycles
    ys, xs = np.nonzero(mask)
    for y, x in zip(ys, xs):
        p = (int(x), int(y))
        if p in visited_px or (int(counts[y, x]) != 2):
            continue
        cycle = [p]
        visited_px.add(p)
        prev, cur = None, p
        while True:
            nxt = [n for n in _neighbors_of(mask, *cur) if n != prev and n not in visited_px]
            if not nxt:
                break
            step = nxt[0]
            cycle.append(step)
            visited_px.add(step)
            prev, cur = cur, step
        runs.append(cycle)
    return runs


# ---------------------------------------------------------------------------
# Pruning
# ---------------------------------------------------------------------------

def _remove_endpoints_once(mask: BinaryMask) -> BinaryMask:
    counts = neighbor_counts(mask)
    return mask & ~(counts <= 1)


def prune(skeleton: Skeleton, params: PruneParams = PruneParams()) -> Skeleton:
    """Remove spur branches, then trim/restore endpoints.

    Spurs are runs with at least one free endpoint and fewer than
    ``min_branch`` pixels; runs between two branchpoints are never pruned.
    Afterwards ``m`` pixels are eaten from every endpoint inward and main
    lines are re-extended along the spur-free skeleton via a radius-m
    square dilation intersected with it; the result is re-thinned.
    """
    mask = skeleton.mask.copy()
    endpoints = set(skeleton.endpoints)
    branchpoints = set(skeleton.branchpoints)

    if params.min_branch > 0:
        for run in trace_branches(skeleton):
            free = (run[0] in endpoints) or (run[-1] in endpoints)
            if not free or len(run) >= params.min_branch:
                continue
            for x, y in run:
                if (x, y) not in branchpoints:
                    mask[y, x] = False
        mask = thin(mask)

    if params.m > 0:
        base = mask.copy()            # spur-free reference for re-extension
        trimmed = mask
        for _ in range(params.m):
            trimmed = _remove_endpoints_once(trimmed)
        regrown = dilate(trimmed, square_se(params.m)) & base
        mask = thin(trimmed | regrown)

    return classify(mask)
