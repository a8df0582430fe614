"""Walk a synthetic frame through enhancement and segmentation, one
operation at a time, and save what each step sees.

Run from the repository root:

    python3 demos/enhance_and_segment.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np

from angiotrace import filtering, phantoms, raster, segmentation

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/enhance")
out.mkdir(parents=True, exist_ok=True)

# A fake 256x256 coronary frame: bright field, mild noise, dark curved
# vessels of three widths. Ground truth is known by construction.
frame = phantoms.synthetic_angiogram(256, seed=7)
raster.save_image(frame, out / "0_input.png")

# Step 1: median filtering knocks out the speckle without blurring the
# vessel walls the way a Gaussian would.
filtered = filtering.median_filter(frame, 3)
raster.save_image(filtered, out / "1_median.png")
print(f"median 3x3: noise std {frame.std():.1f} -> {filtered.std():.1f}")

# Step 2: multiscale vesselness. Each scale responds to tubes of a
# matching width; the map keeps the best response per pixel along with
# the orientation of the ridge and the winning scale.
vmap = filtering.frangi_vesselness(filtered)
raster.save_image(vmap.magnitude, out / "2_vesselness.png")
raster.save_image(vmap.best_scale, out / "2_best_scale.png")
print(f"vesselness: max {vmap.magnitude.max():.3f}, "
      f"scales used {sorted(set(np.unique(vmap.best_scale)))}")

# Step 3: Otsu picks the threshold that best separates the vesselness
# histogram into background and vessel classes.
quantized = segmentation.quantize256(vmap.magnitude)
t = segmentation.otsu_threshold(quantized)
mask = segmentation.binarize(quantized, t)
raster.save_image(mask, out / "3_otsu_mask.png")
print(f"otsu threshold {t}/255, mask covers {100 * mask.mean():.1f}% of the frame")

# Step 4: a 3x3 closing seals single-pixel gaps, then small specks go.
closed = segmentation.morphology(mask, segmentation.square_se(1), segmentation.CLOSE)
closed = segmentation.remove_small_components(closed, 30)
raster.save_image(closed, out / "4_closed.png")
print(f"after closing + speck removal: {closed.sum()} vessel pixels")

print(f"wrote {len(list(out.iterdir()))} images to {out}")
