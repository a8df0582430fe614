/** Typed client for the vessel-analysis HTTP+JSON service.
 *
 * The viewer never computes pipeline math locally: every number it shows
 * comes from these responses. Numeric length fields are additionally kept
 * as the literal tokens from the response body so they can be displayed
 * byte-for-byte.
 */

export interface ApiErrorBody {
  error: string;
  message: string;
  stage?: string;
}

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(`${body.error}: ${body.message}`);
    this.name = "ServiceError";
  }
}

export interface RunSummary {
  stages: string[];
  timings_ms: Record<string, number>;
  node_count: number;
  threshold: number;
}

export interface TraceRecord {
  start_node: number;
  end_node: number;
  path: { nodes: number[]; pixels: Array<[number, number]>; cost: number };
  spline: Array<[number, number]> | null;
  length_px: number;
  length_mm: number | null;
  radius: { samples: Array<[number, number]>; off_mask: number };
}

export interface TraceResponse {
  record: TraceRecord;
  /** literal "length_px" token from the response body */
  lengthPxText: string;
  /** literal "length_mm" token, or null when the service sent null */
  lengthMmText: string | null;
}

/** Extract the literal value token of a top-level key from a JSON body. */
export function jsonValueToken(body: string, key: string): string | null {
  const m = body.match(new RegExp(`"${key}"\\s*:\\s*(-?[0-9][0-9.eE+-]*|null)`));
  return m === null ? null : m[1];
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let body: ApiErrorBody;
      try {
        body = (await resp.json()) as ApiErrorBody;
      } catch {
        body = { error: "unknown", message: `HTTP ${resp.status}` };
      }
      throw new ServiceError(resp.status, body);
    }
    return resp;
  }

  async createSession(
    imageBase64: string,
    opts: { config?: object; pixelSpacingMm?: number } = {},
  ): Promise<string> {
    const payload: Record<string, unknown> = { image: imageBase64 };
    if (opts.config !== undefined) payload.config = opts.config;
    if (opts.pixelSpacingMm !== undefined) {
      payload.pixel_spacing_mm = opts.pixelSpacingMm;
    }
    const resp = await this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    const data = (await resp.json()) as { session_id: string };
    return data.session_id;
  }

  async run(sessionId: string): Promise<RunSummary> {
    const resp = await this.request(`/sessions/${sessionId}/run`, {
      method: "POST",
    });
    return (await resp.json()) as RunSummary;
  }

  stageUrl(sessionId: string, stage: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/stage/${stage}.png`;
  }

  async trace(
    sessionId: string,
    start: [number, number],
    end: [number, number],
  ): Promise<TraceResponse> {
    const resp = await this.request(`/sessions/${sessionId}/trace`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ start, end }),
    });
    const text = await resp.text();
    const record = JSON.parse(text) as TraceRecord;
    const px = jsonValueToken(text, "length_px");
    const mm = jsonValueToken(text, "length_mm");
    return {
      record,
      lengthPxText: px ?? String(record.length_px),
      lengthMmText: mm === null || mm === "null" ? null : mm,
    };
  }

  async segments(sessionId: string): Promise<TraceRecord[]> {
    const resp = await this.request(`/sessions/${sessionId}/segments`);
    const data = (await resp.json()) as { segments: TraceRecord[] };
    return data.segments;
  }

  async deleteSession(sessionId: string): Promise<void> {
    await this.request(`/sessions/${sessionId}`, { method: "DELETE" });
  }
}
