"""Angiogram vessel analysis: enhancement, segmentation, skeletons, edges,
and interactive minimal-cost centerline tracing with length/radius
measurement."""

from .errors import AngiotraceError, StageError
from .filtering import (FrangiParams, GaussianKernel, HessianField, VesselnessMap,
                        frangi_vesselness, gaussian_kernel, hessian_at_scale,
                        median_filter)
from .geometry import (CubicSpline, RadiusProfile, distance_transform,
                       estimate_radius, eval_spline, fit_natural_spline,
                       path_length)
from .pipeline import (PipelineConfig, PipelineResult, SessionState,
                       run_pipeline, trace_segment)
from .raster import OverlayLayer, load_image, render_overlay, save_image
from .segmentation import (StructuringElement, binarize, disk_se, morphology,
                           otsu_threshold, remove_small_components, square_se)
from .topology import PruneParams, Skeleton, prune, skeletonize, trace_branches
from .tracking import (CenterlinePath, CostWeights, PixelGraph, VesselNode,
                       build_graph, extract_nodes, shortest_path, snap_to_node)

__version__ = "0.1.0"
