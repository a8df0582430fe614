/** DOM rendering helpers: measurement cards, error surfaces, and overlay
 * styling. Pure functions of their inputs so they are unit-testable. */

import { ServiceError } from "./api.js";
import { SegmentMeasurement } from "./state.js";

/** Fixed overlay palette; the path is drawn in red, skeleton in green,
 * edges in cyan, and vesselness as a heat map rendered by the service. */
export const OVERLAY_COLORS: Record<string, string> = {
  frangi: "heatmap",
  skeleton: "#00c853",
  edges: "#00e5ff",
  path: "#ff1744",
};

/** Measurement card: length (px, and mm when known) plus a radius-vs-arc
 * sparkline. Length strings are shown verbatim as the service sent them. */
export function renderMeasurementCard(
  doc: Document,
  segment: SegmentMeasurement,
): HTMLElement {
  const card = doc.createElement("div");
  card.className = "measurement-card";

  const length = doc.createElement("p");
  length.className = "length-px";
  length.textContent = `length: ${segment.lengthPxText} px`;
  card.appendChild(length);

  if (segment.lengthMmText !== null) {
    const mm = doc.createElement("p");
    mm.className = "length-mm";
    mm.textContent = `length: ${segment.lengthMmText} mm`;
    card.appendChild(mm);
  }

  card.appendChild(renderSparkline(doc, segment.radiusSamples));
  return card;
}

/** Inline SVG polyline of radius against arc length. */
export function renderSparkline(
  doc: Document,
  samples: Array<{ arcLength: number; radius: number }>,
  width = 160,
  height = 40,
): SVGSVGElement {
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = doc.createElementNS(svgNs, "svg");
  svg.setAttribute("class", "radius-sparkline");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  if (samples.length > 0) {
    const maxArc = Math.max(...samples.map((s) => s.arcLength), 1e-9);
    const maxR = Math.max(...samples.map((s) => s.radius), 1e-9);
    const points = samples
      .map((s) => {
        const x = (s.arcLength / maxArc) * (width - 2) + 1;
        const y = height - 1 - (s.radius / maxR) * (height - 2);
        return `${x},${y}`;
      })
      .join(" ");
    const line = doc.createElementNS(svgNs, "polyline");
    line.setAttribute("points", points);
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#555");
    svg.appendChild(line);
  }
  return svg;
}

/** NoPath is shown inline next to the canvas, not as a toast, with both
 * snapped nodes still highlighted. */
export function renderNoPathNotice(doc: Document, message: string): HTMLElement {
  const el = doc.createElement("p");
  el.className = "no-path-notice";
  el.textContent = `no path between the selected points: ${message}`;
  return el;
}

/** Error toast naming the failing pipeline stage when the service sent one. */
export function renderErrorToast(doc: Document, err: ServiceError): HTMLElement {
  const toast = doc.createElement("div");
  toast.className = "error-toast";
  const stage = err.body.stage ? ` (stage: ${err.body.stage})` : "";
  toast.textContent = `${err.body.error}${stage}: ${err.body.message}`;
  return toast;
}
