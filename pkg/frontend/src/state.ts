/** Viewer-side state: session, overlay toggles, click pairing, and the
 * zoom/pan transform between canvas and image coordinates. */

export interface Transform {
  /** pixels on canvas per image pixel */
  zoom: number;
  /** canvas x of image pixel (0, 0) */
  panX: number;
  /** canvas y of image pixel (0, 0) */
  panY: number;
}

export interface Point {
  x: number;
  y: number;
}

/** Map a canvas position to the image pixel under it. Exact inverse of
 * imageToCanvas at integer zoom levels. */
export function canvasToImage(t: Transform, cx: number, cy: number): Point {
  return {
    x: Math.floor((cx - t.panX) / t.zoom),
    y: Math.floor((cy - t.panY) / t.zoom),
  };
}

/** Canvas position of the top-left corner of an image pixel. */
export function imageToCanvas(t: Transform, x: number, y: number): Point {
  return { x: t.panX + x * t.zoom, y: t.panY + y * t.zoom };
}

export interface RadiusSample {
  arcLength: number;
  radius: number;
}

export interface SegmentMeasurement {
  startNode: number;
  endNode: number;
  pathPixels: Array<[number, number]>;
  /** length in pixels, exactly as the service printed it */
  lengthPxText: string;
  /** length in millimetres as printed by the service, when spacing is known */
  lengthMmText: string | null;
  radiusSamples: RadiusSample[];
}

export type ClickOutcome =
  | { kind: "pending"; start: Point }
  | { kind: "pair"; start: Point; end: Point };

export class ViewerState {
  sessionId: string | null = null;
  stages: string[] = [];
  readonly activeOverlays = new Set<string>();
  pendingClick: Point | null = null;
  readonly segments: SegmentMeasurement[] = [];
  transform: Transform = { zoom: 1, panX: 0, panY: 0 };

  toggleOverlay(name: string): boolean {
    if (this.activeOverlays.has(name)) {
      this.activeOverlays.delete(name);
      return false;
    }
    this.activeOverlays.add(name);
    return true;
  }

  /** First click arms the pair; the second yields both image points. */
  registerClick(canvasX: number, canvasY: number): ClickOutcome {
    const p = canvasToImage(this.transform, canvasX, canvasY);
    if (this.pendingClick === null) {
      this.pendingClick = p;
      return { kind: "pending", start: p };
    }
    const start = this.pendingClick;
    return { kind: "pair", start, end: p };
  }

  /** A completed trace (success or NoPath) always clears the pending click. */
  completeTrace(segment: SegmentMeasurement | null): void {
    this.pendingClick = null;
    if (segment !== null) {
      this.segments.push(segment);
    }
  }

  cancelClick(): void {
    this.pendingClick = null;
  }

  setZoom(zoom: number): void {
    if (!(zoom > 0)) {
      throw new Error(`zoom must be positive, got ${zoom}`);
    }
    this.transform = { ...this.transform, zoom };
  }

  panBy(dx: number, dy: number): void {
    this.transform = {
      ...this.transform,
      panX: this.transform.panX + dx,
      panY: this.transform.panY + dy,
    };
  }
}
