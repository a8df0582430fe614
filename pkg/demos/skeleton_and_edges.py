"""Compare the two shape abstractions the pipeline computes from a
vessel mask: the 1-px skeleton (for centerlines) and the Canny contour
(for walls).

    python3 demos/skeleton_and_edges.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np

from angiotrace import phantoms, raster, topology
from angiotrace.edges import canny
from angiotrace.geometry import distance_transform

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/shape")
out.mkdir(parents=True, exist_ok=True)

mask = phantoms.tube_mask(128, width=7, angle=45)
raster.save_image(mask, out / "0_mask.png")

# Thinning peels boundary pixels until only a connected 1-px curve is
# left. Endpoints and branchpoints fall out of the neighbor counts.
skel = topology.skeletonize(mask)
raster.save_image(skel.mask, out / "1_skeleton.png")
print(f"skeleton: {skel.mask.sum()} px, "
      f"{len(skel.endpoints)} endpoints, {len(skel.branchpoints)} branchpoints")

# The skeleton should ride the medial axis: compare against the
# distance transform, whose per-column maxima mark the true centerline.
dist = distance_transform(mask)
ys, xs = np.nonzero(skel.mask)
offsets = [abs(y - int(np.argmax(dist[:, x]))) for y, x in zip(ys, xs)]
print(f"max deviation from the medial axis: {max(offsets)} px")

# Spur pruning: add a short parasitic branch and watch it go.
spurred = skel.mask.copy()
midx = xs[len(xs) // 2]
midy = ys[len(xs) // 2]
spurred[midy - 3:midy, midx] = True
pruned = topology.prune(topology.classify(spurred),
                        topology.PruneParams(m=0, min_branch=5))
print(f"spur of 3 px added, pruned back to {pruned.mask.sum()} px "
      f"(skeleton had {skel.mask.sum()})")

# Canny on the two-level mask localizes the walls to 1-px contours.
levels = np.where(mask, np.uint8(255), np.uint8(0))
edges = canny(levels, sigma=1.0, low=0.15, high=0.4)
raster.save_image(edges, out / "2_edges.png")
print(f"canny walls: {edges.sum()} px on both sides of the tube")
print(f"wrote images to {out}")
