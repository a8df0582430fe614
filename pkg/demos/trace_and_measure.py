"""Trace a vessel segment on a phantom tube and check the measurements
against ground truth.

The tube is 7 px wide, so the true radius is 3.5 px, and a trace from
x=10 to x=118 along the centerline should measure 108 px.

    python3 demos/trace_and_measure.py
"""

import numpy as np

from angiotrace import phantoms
from angiotrace.pipeline import SessionState, run_pipeline, trace_segment

tube = phantoms.horizontal_tube(128, width=7)
result = run_pipeline(tube)

print("stage timings:")
for name, ms in result.timings_ms.items():
    print(f"  {name:10s} {ms:7.1f} ms")
print(f"graph: {len(result.graph.nodes)} nodes, {len(result.graph.edges)} edges")

# Two clicks near the tube ends, the way an operator would place them.
# Clicks snap to the nearest graph node before tracing.
session = SessionState("demo", tube, result)
record = trace_segment(session, (10, 64), (118, 64))

radii = np.array([r for _, r in record["radius"]["samples"]])
print(f"length: {record['length_px']:.2f} px (truth 108.00)")
print(f"radius: median {np.median(radii[3:-3]):.2f} px (truth 3.50)")
print(f"path runs through {len(record['path']['pixels'])} pixels, "
      f"cost {record['path']['cost']:.3f}")

# The same session accumulates segments; a second identical trace
# appends an identical record.
trace_segment(session, (10, 64), (118, 64))
assert session.segments[0] == session.segments[1]
print(f"session now holds {len(session.segments)} segments")
