/** Typed client for the metric service. Array endpoints stream raw little-endian
 * float32; typed arrays share the platform byte order, which is little-endian on
 * every target we run on, so decoding is a zero-copy view over the response body. */

export interface MetricDescriptor {
  metric_name: string;
  params: Record<string, unknown>;
  vmin: number;
  vmax: number;
}

export interface MetadataInfo {
  name: string;
  kind: "categorical" | "continuous";
}

export interface ManifestInfo {
  dataset: string;
  n: number;
  embeddings: string[];
  metrics: Record<string, MetricDescriptor[]>;
  metadata: MetadataInfo[];
  defaults: { k_list: number[]; seed: number };
}

export interface MetricColumn {
  values: Float32Array;
  vmin: number;
  vmax: number;
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // fall through to the generic message
  }
  return res.statusText;
}

export class TraceApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async get(path: string): Promise<Response> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!res.ok) {
      throw new Error(`GET ${path} -> ${res.status}: ${await errorDetail(res)}`);
    }
    return res;
  }

  private async getFloats(path: string): Promise<Float32Array> {
    const res = await this.get(path);
    return new Float32Array(await res.arrayBuffer());
  }

  async manifest(): Promise<ManifestInfo> {
    const res = await this.get("/api/manifest");
    return res.json() as Promise<ManifestInfo>;
  }

  /** Flat [x0, y0, x1, y1, ...] of length 2n. */
  async coords(embedding: string): Promise<Float32Array> {
    return this.getFloats(`/api/embeddings/${encodeURIComponent(embedding)}/coords`);
  }

  async metric(
    embedding: string,
    metricName: string,
    params: { k?: number; seed?: number } = {},
  ): Promise<MetricColumn> {
    const query = new URLSearchParams();
    if (params.k !== undefined) query.set("k", String(params.k));
    if (params.seed !== undefined) query.set("seed", String(params.seed));
    const suffix = query.size > 0 ? `?${query}` : "";
    const res = await this.get(
      `/api/embeddings/${encodeURIComponent(embedding)}/metrics/${encodeURIComponent(metricName)}${suffix}`,
    );
    return {
      values: new Float32Array(await res.arrayBuffer()),
      vmin: Number(res.headers.get("X-Vmin")),
      vmax: Number(res.headers.get("X-Vmax")),
    };
  }

  async metadata(column: string): Promise<string[] | Float32Array> {
    const res = await this.get(`/api/metadata/${encodeURIComponent(column)}`);
    const type = res.headers.get("Content-Type") ?? "";
    if (type.includes("application/json")) {
      return res.json() as Promise<string[]>;
    }
    return new Float32Array(await res.arrayBuffer());
  }

  async hdDistances(point: number): Promise<Float32Array> {
    return this.getFloats(`/api/points/${point}/hd_distances`);
  }

  async selectionNeighbors(indices: number[], k: number): Promise<number[]> {
    const res = await this.fetchFn(`${this.baseUrl}/api/selection/neighbors`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ indices, k }),
    });
    if (!res.ok) {
      throw new Error(`POST /api/selection/neighbors -> ${res.status}: ${await errorDetail(res)}`);
    }
    const body = (await res.json()) as { indices: number[] };
    return body.indices;
  }
}

/** Serializes requests of one resource kind: only the newest caller's result is
 * delivered; anything that was overtaken resolves to undefined. */
export class LatestOnly {
  private ticket = 0;

  async run<T>(task: () => Promise<T>): Promise<T | undefined> {
    const mine = ++this.ticket;
    const value = await task();
    return mine === this.ticket ? value : undefined;
  }
}
