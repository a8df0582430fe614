"""Pipeline orchestration: enhancement, segmentation, skeleton/edges, and
the vessel graph, plus interactive segment tracing on the result.

Stage order is fixed: median, frangi, otsu, close, skeleton, edges, graph.
Stage failures propagate as :class:`StageError` carrying the stage name.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import edges as edges_mod
from . import filtering, geometry, segmentation, topology, tracking
from .errors import StageError
from .raster import GrayImage, OverlayLayer, render_overlay, save_image, save_rgb

STAGE_ORDER = ("median", "frangi", "otsu", "close", "skeleton", "edges", "graph")

MAGNITUDE, ORIGINAL = "magnitude", "original"
SKELETON_NODES, VESSELNESS_NODES = "skeleton", "vesselness"
MASK_EDGES, FILTERED_EDGES = "mask", "filtered"


@dataclass(frozen=True)
class PipelineConfig:
    median_window: int = 3
    frangi: filtering.FrangiParams = filtering.FrangiParams()
    otsu_source: str = MAGNITUDE
    closing_radius: int = 1
    min_component: int = 30
    prune: topology.PruneParams = topology.PruneParams()
    canny_sigma: float = 1.0
    canny_low: float = 0.15
    canny_high: float = 0.4
    canny_source: str = MASK_EDGES
    node_source: str = SKELETON_NODES
    node_window: int = 5
    node_floor: float = 0.05
    weights: tracking.CostWeights = tracking.CostWeights()
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.median_window < 1 or self.median_window % 2 == 0:
            raise ValueError(f"median window must be odd and >= 1, got {self.median_window}")
        if self.otsu_source not in (MAGNITUDE, ORIGINAL):
            raise ValueError(f"unknown otsu source {self.otsu_source!r}")
        if self.closing_radius < 0 or self.min_component < 0:
            raise ValueError("closing_radius and min_component must be >= 0")
        if self.canny_sigma <= 0:
            raise ValueError("canny_sigma must be > 0")
        if not (0.0 < self.canny_low < self.canny_high <= 1.0):
            raise ValueError("need 0 < canny_low < canny_high <= 1")
        if self.canny_source not in (MASK_EDGES, FILTERED_EDGES):
            raise ValueError(f"unknown canny source {self.canny_source!r}")
        if self.node_source not in (SKELETON_NODES, VESSELNESS_NODES):
            raise ValueError(f"unknown node source {self.node_source!r}")
        if self.node_window < 3 or self.node_window % 2 == 0:
            raise ValueError("node_window must be odd and >= 3")
        if not (0.0 <= self.node_floor < 1.0):
            raise ValueError("node_floor must lie in [0, 1)")

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        """Build a config from a JSON file; every field is optional."""
        raw = json.loads(Path(path).read_text())
        kwargs = {}
        if "frangi" in raw:
            kwargs["frangi"] = filtering.FrangiParams(**raw.pop("frangi"))
        if "prune" in raw:
            kwargs["prune"] = topology.PruneParams(**raw.pop("prune"))
        if "weights" in raw:
            kwargs["weights"] = tracking.CostWeights(**raw.pop("weights"))
        kwargs.update(raw)
        return cls(**kwargs)


@dataclass
class PipelineResult:
    stages: Dict[str, object]
    timings_ms: Dict[str, float]
    threshold: int
    config: PipelineConfig
    # intensity-based vessel mask used for radius measurement; the Frangi
    # response ramps a few pixels beyond the lumen, so the segmentation mask
    # overestimates width
    measurement_mask: Optional[np.ndarray] = None

    @property
    def graph(self) -> tracking.PixelGraph:
        return self.stages["graph"]

    @property
    def closed_mask(self):
        return self.stages["close"]

    @property
    def skeleton(self) -> topology.Skeleton:
        return self.stages["skeleton"]


def _staged(name: str, timings: Dict[str, float]):
    class _Ctx:
        def __enter__(self):
            self.t0 = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            timings[name] = (time.perf_counter() - self.t0) * 1000.0
            if exc is not None and not isinstance(exc, StageError):
                raise StageError(name, exc) from exc
            return False
    return _Ctx()


def run_pipeline(image: GrayImage, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Run enhancement through graph construction on one frame."""
    stages: Dict[str, object] = {}
    timings: Dict[str, float] = {}

    with _staged("median", timings):
        filtered = filtering.median_filter(image, config.median_window)
        stages["median"] = filtered

    with _staged("frangi", timings):
        vmap = filtering.frangi_vesselness(filtered, config.frangi)
        stages["frangi"] = vmap

    with _staged("otsu", timings):
        if config.otsu_source == MAGNITUDE:
            source = segmentation.quantize256(vmap.magnitude)
        else:
            source = filtered
        threshold = segmentation.otsu_threshold(source)
        stages["otsu"] = segmentation.binarize(source, threshold)

    with _staged("close", timings):
        se = segmentation.square_se(config.closing_radius)
        closed = segmentation.morphology(stages["otsu"], se, segmentation.CLOSE)
        closed = segmentation.remove_small_components(closed, config.min_component)
        stages["close"] = closed

    with _staged("skeleton", timings):
        skel = topology.skeletonize(closed)
        skel = topology.prune(skel, config.prune)
        stages["skeleton"] = skel

    with _staged("edges", timings):
        if config.canny_source == MASK_EDGES:
            canny_input = np.where(closed, np.uint8(255), np.uint8(0))
        else:
            canny_input = filtered
        stages["edges"] = edges_mod.canny(canny_input, config.canny_sigma,
                                          config.canny_low, config.canny_high)

    with _staged("graph", timings):
        if config.node_source == SKELETON_NODES:
            nodes = tracking.nodes_from_skeleton(skel, vmap)
        else:
            nodes = tracking.extract_nodes(vmap, config.node_window, config.node_floor)
        stages["graph"] = tracking.build_graph(nodes, config.weights)

    t_int = segmentation.otsu_threshold(filtered)
    if config.frangi.polarity == filtering.DARK_ON_BRIGHT:
        measurement_mask = np.asarray(filtered) <= t_int
    else:
        measurement_mask = segmentation.binarize(filtered, t_int)

    result = PipelineResult(stages=stages, timings_ms=timings,
                            threshold=threshold, config=config,
                            measurement_mask=measurement_mask)
    if config.output_dir is not None:
        save_stage_artifacts(image, result, config.output_dir)
    return result


def save_stage_artifacts(image: GrayImage, result: PipelineResult, out_dir) -> List[str]:
    """Persist each stage as a numbered PNG (graph as JSON), Fig.-order names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def w(name, fn):
        fn(out / name)
        written.append(name)

    w("01_median.png", lambda p: save_image(result.stages["median"], p))
    w("02_frangi.png", lambda p: save_image(result.stages["frangi"].magnitude, p))
    w("03_otsu.png", lambda p: save_image(result.stages["otsu"], p))
    w("04_close.png", lambda p: save_image(result.stages["close"], p))
    w("05_skeleton.png", lambda p: save_image(result.stages["skeleton"].mask, p))
    w("06_edges.png", lambda p: save_image(result.stages["edges"], p))
    w("07_graph.json", lambda p: p.write_text(
        json.dumps(result.graph.to_json_dict())))
    return written


def render_stage(image: GrayImage, result: PipelineResult, name: str) -> np.ndarray:
    """RGB rendering of one stage for the viewer (overlays on the base image)."""
    stages = result.stages
    if name == "median":
        return render_overlay(stages["median"], [])
    if name == "frangi":
        mag = segmentation.quantize256(stages["frangi"].magnitude)
        return render_overlay(mag, [])
    if name == "otsu":
        return render_overlay(image, [OverlayLayer("mask", stages["otsu"], (255, 200, 0), 0.5)])
    if name == "close":
        return render_overlay(image, [OverlayLayer("mask", stages["close"], (255, 120, 0), 0.5)])
    if name == "skeleton":
        return render_overlay(image, [OverlayLayer("mask", stages["skeleton"].mask, (0, 255, 0), 1.0)])
    if name == "edges":
        return render_overlay(image, [OverlayLayer("mask", stages["edges"], (0, 255, 255), 1.0)])
    if name == "graph":
        pts = [(n.x, n.y) for n in result.graph.nodes]
        return render_overlay(image, [OverlayLayer("points", pts, (255, 0, 255), 1.0)])
    raise KeyError(f"unknown stage {name!r}")


# ---------------------------------------------------------------------------
# Interactive tracing
# ---------------------------------------------------------------------------

@dataclass
class SessionState:
    session_id: str
    image: GrayImage
    result: Optional[PipelineResult] = None
    segments: List[dict] = field(default_factory=list)
    pixel_spacing_mm: Optional[float] = None


def load_metadata_sidecar(image_path) -> dict:
    """Optional ``<image>.meta.json`` next to the input image."""
    side = Path(str(image_path) + ".meta.json")
    if side.is_file():
        return json.loads(side.read_text())
    return {}


def trace_segment(session: SessionState, start_click: Tuple[int, int],
                  end_click: Tuple[int, int]) -> dict:
    """Snap two clicks, trace the minimal-cost path, and measure it.

    Returns (and appends to the session) a record with the path, spline
    knots, pixel length (and mm when spacing is known), and radius profile.
    """
    if session.result is None:
        raise StageError("graph", RuntimeError("pipeline has not been run"))
    graph = session.result.graph
    start = tracking.snap_to_node(graph, tuple(start_click))
    goal = tracking.snap_to_node(graph, tuple(end_click))
    path = tracking.shortest_path(graph, start, goal)

    pos = {n.id: (n.x, n.y) for n in graph.nodes}
    knot_pts = [pos[i] for i in path.node_ids]
    spline_pts = None
    if len(knot_pts) >= 2:
        spline = geometry.fit_natural_spline(knot_pts)
        spline_pts = geometry.sample_spline(spline, step=1.0).tolist()

    length_px = geometry.path_length(path.pixels)
    measure_mask = session.result.measurement_mask
    if measure_mask is None:
        measure_mask = session.result.closed_mask
    profile = geometry.estimate_radius(path.pixels, measure_mask)

    record = {
        "start_node": start,
        "end_node": goal,
        "path": path.to_json_dict(),
        "spline": spline_pts,
        "length_px": length_px,
        "length_mm": (length_px * session.pixel_spacing_mm
                      if session.pixel_spacing_mm else None),
        "radius": {"samples": [[s, r] for s, r in profile.samples],
                   "off_mask": profile.off_mask},
    }
    session.segments.append(record)
    return record
