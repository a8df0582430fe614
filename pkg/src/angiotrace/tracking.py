"""Vessel graph construction and minimal-cost centerline tracing.

Nodes sit at coordinates where vessel likelihood is high (local maxima of
the vesselness magnitude, or skeleton pixels); two nodes are adjacent when
they share a common 5x5 window (Chebyshev distance <= 4). Paths between
user-selected points are found with Dijkstra under a cost mixing distance,
vesselness, and orientation agreement.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .errors import EmptyGraph, NoPath, UnknownNode
from .filtering import VesselnessMap
from .topology import Skeleton

Coord = Tuple[int, int]


@dataclass(frozen=True)
class VesselNode:
    id: int
    x: int
    y: int
    vesselness: float
    orientation: float


@dataclass(frozen=True)
class CostWeights:
    w_dist: float = 1.0
    w_vessel: float = 2.0
    w_orient: float = 0.5
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.w_dist < 0 or self.w_vessel < 0 or self.w_orient < 0:
            raise ValueError("weights must be nonnegative")
        if self.w_dist == 0 and self.w_vessel == 0 and self.w_orient == 0:
            raise ValueError("at least one weight must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")


@dataclass
class PixelGraph:
    nodes: List[VesselNode]
    edges: List[Tuple[int, int, float]]
    _adj: Optional[Dict[int, List[Tuple[int, float]]]] = field(default=None, repr=False)

    def adjacency(self) -> Dict[int, List[Tuple[int, float]]]:
        if self._adj is None:
            adj: Dict[int, List[Tuple[int, float]]] = {n.id: [] for n in self.nodes}
            for i, j, c in self.edges:
                adj[i].append((j, c))
                adj[j].append((i, c))
            for lst in adj.values():
                lst.sort()
            self._adj = adj
        return self._adj

    def to_json_dict(self) -> dict:
        return {
            "nodes": [{"id": n.id, "x": n.x, "y": n.y,
                       "v": n.vesselness, "theta": n.orientation}
                      for n in self.nodes],
            "edges": [[i, j, c] for i, j, c in self.edges],
        }


@dataclass(frozen=True)
class CenterlinePath:
    node_ids: Tuple[int, ...]
    pixels: Tuple[Coord, ...]
    total_cost: float

    def to_json_dict(self) -> dict:
        return {"nodes": list(self.node_ids),
                "pixels": [[x, y] for x, y in self.pixels],
                "cost": self.total_cost}


# ---------------------------------------------------------------------------
# Node extraction
# ---------------------------------------------------------------------------

def extract_nodes(vmap: VesselnessMap, window: int = 5,
                  floor: float = 0.05) -> List[VesselNode]:
    """Nodes at strict local maxima of the magnitude above ``floor``.

    A pixel qualifies when its magnitude strictly exceeds every other value
    in its window x window neighborhood. Ids run in row-major order.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    if not (0.0 <= floor < 1.0):
        raise ValueError("floor must lie in [0, 1)")
    mag = vmap.magnitude
    footprint = np.ones((window, window), dtype=bool)
    footprint[window // 2, window // 2] = False
    neigh_max = ndimage.maximum_filter(mag, footprint=footprint,
                                       mode="constant", cval=-np.inf)
    peaks = (mag > neigh_max) & (mag > floor)
    nodes = []
    ys, xs = np.nonzero(peaks)
    for nid, (y, x) in enumerate(zip(ys, xs)):     # nonzero is row-major
        nodes.append(VesselNode(id=nid, x=int(x), y=int(y),
                                vesselness=float(mag[y, x]),
                                orientation=float(vmap.orientation[y, x])))
    return nodes


def nodes_from_skeleton(skeleton: Skeleton, vmap: VesselnessMap) -> List[VesselNode]:
    """Alternative seeding: one node per skeleton pixel, row-major ids."""
    ys, xs = np.nonzero(skeleton.mask)
    return [VesselNode(id=i, x=int(x), y=int(y),
                       vesselness=float(vmap.magnitude[y, x]),
                       orientation=float(vmap.orientation[y, x]))
            for i, (y, x) in enumerate(zip(ys, xs))]


# ---------------------------------------------------------------------------
# Graph construction
# ---------------------------------------------------------------------------

def edge_cost(a: VesselNode, b: VesselNode, weights: CostWeights) -> float:
    dist = float(np.hypot(a.x - b.x, a.y - b.y))
    vessel = 1.0 - (a.vesselness + b.vesselness) / 2.0
    orient = 1.0 - abs(np.cos(a.orientation - b.orientation))
    cost = (weights.w_dist * dist + weights.w_vessel * vessel
            + weights.w_orient * orient)
    return max(cost, weights.epsilon)


def build_graph(nodes: Sequence[VesselNode],
                weights: CostWeights = CostWeights()) -> PixelGraph:
    """Undirected graph over nodes within Chebyshev distance 4 of each other."""
    by_pos: Dict[Coord, VesselNode] = {(n.x, n.y): n for n in nodes}
    edges: List[Tuple[int, int, float]] = []
    offsets = [(dx, dy) for dy in range(-4, 5) for dx in range(-4, 5)
               if (dy, dx) > (0, 0)]    # half-plane: each pair visited once
    for n in nodes:
        for dx, dy in offsets:
            other = by_pos.get((n.x + dx, n.y + dy))
            if other is not None and other.id != n.id:
                edges.append((n.id, other.id, edge_cost(n, other, weights)))
    return PixelGraph(nodes=list(nodes), edges=edges)


# ---------------------------------------------------------------------------
# Shortest path
# ---------------------------------------------------------------------------

def bresenham(p0: Coord, p1: Coord) -> List[Coord]:
    """Integer line segment from p0 to p1, inclusive."""
    x0, y0 = p0
    x1, y1 = p1
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    x, y = x0, y0
    while True:
        out.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
    return out


def _pixel_trace(graph: PixelGraph, node_ids: Sequence[int]) -> Tuple[Coord, ...]:
    pos = {n.id: (n.x, n.y) for n in graph.nodes}
    trace: List[Coord] = []
    for a, b in zip(node_ids, node_ids[1:]):
        seg = bresenham(pos[a], pos[b])
        trace.extend(seg if not trace else seg[1:])
    if not trace and node_ids:
        trace = [pos[node_ids[0]]]
    return tuple(trace)


def shortest_path(graph: PixelGraph, start: int, goal: int) -> CenterlinePath:
    """Minimal-total-cost path via Dijkstra.

    Ties between equal-cost paths resolve to the lexicographically smallest
    node-id sequence, achieved by keying the heap on (cost, path).
    """
    ids = {n.id for n in graph.nodes}
    if start not in ids:
        raise UnknownNode(f"unknown start node {start}")
    if goal not in ids:
        raise UnknownNode(f"unknown goal node {goal}")
    if start == goal:
        return CenterlinePath(node_ids=(start,),
                              pixels=_pixel_trace(graph, [start]),
                              total_cost=0.0)
    adj = graph.adjacency()
    settled = set()
    heap: List[Tuple[float, Tuple[int, ...]]] = [(0.0, (start,))]
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == goal:
            return CenterlinePath(node_ids=path,
                                  pixels=_pixel_trace(graph, path),
                                  total_cost=cost)
        for nxt, c in adj[node]:
            if nxt not in settled:
                heapq.heappush(heap, (cost + c, path + (nxt,)))
    raise NoPath(f"no path from node {start} to node {goal}")


def snap_to_node(graph: PixelGraph, click: Coord) -> int:
    """Nearest node by Euclidean distance; ties keep the smallest id."""
    if not graph.nodes:
        raise EmptyGraph("graph has no nodes")
    cx, cy = click
    best = min(graph.nodes,
               key=lambda n: ((n.x - cx) ** 2 + (n.y - cy) ** 2, n.id))
    return best.id
