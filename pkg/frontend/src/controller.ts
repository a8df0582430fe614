/** Orchestrates the click-to-trace flow: pair up clicks, call the
 * service, and render the outcome into the measurement panel. At most one
 * trace request is in flight per session. */

import { Client, ServiceError, TraceResponse } from "./api.js";
import { renderErrorToast, renderMeasurementCard, renderNoPathNotice } from "./render.js";
import { SegmentMeasurement, ViewerState } from "./state.js";

export function toSegmentMeasurement(resp: TraceResponse): SegmentMeasurement {
  return {
    startNode: resp.record.start_node,
    endNode: resp.record.end_node,
    pathPixels: resp.record.path.pixels,
    lengthPxText: resp.lengthPxText,
    lengthMmText: resp.lengthMmText,
    radiusSamples: resp.record.radius.samples.map(([arcLength, radius]) => ({
      arcLength,
      radius,
    })),
  };
}

export class TraceController {
  private inFlight = false;

  constructor(
    private readonly state: ViewerState,
    private readonly client: Client,
    private readonly panel: HTMLElement,
    private readonly doc: Document,
  ) {}

  /** Handle one canvas click; on the second click of a pair, trace. */
  async handleClick(canvasX: number, canvasY: number): Promise<void> {
    if (this.state.sessionId === null || this.inFlight) {
      return;
    }
    const outcome = this.state.registerClick(canvasX, canvasY);
    if (outcome.kind === "pending") {
      return;
    }
    this.inFlight = true;
    try {
      const resp = await this.client.trace(
        this.state.sessionId,
        [outcome.start.x, outcome.start.y],
        [outcome.end.x, outcome.end.y],
      );
      const segment = toSegmentMeasurement(resp);
      this.state.completeTrace(segment);
      this.panel.appendChild(renderMeasurementCard(this.doc, segment));
    } catch (err) {
      this.state.completeTrace(null);
      if (err instanceof ServiceError && err.body.error === "no_path") {
        this.panel.appendChild(renderNoPathNotice(this.doc, err.body.message));
      } else if (err instanceof ServiceError) {
        this.panel.appendChild(renderErrorToast(this.doc, err));
      } else {
        throw err;
      }
    } finally {
      this.inFlight = false;
    }
  }
}
