/** Test doubles: a manually stepped frame scheduler and a stub fetch that
 * mimics the metric service over the four-point line dataset. Payloads match
 * what the real service returns for that bundle byte for byte. */

import type { ManifestInfo } from "../src/api.js";
import type { FrameScheduler } from "../src/transition.js";

export class FakeScheduler implements FrameScheduler {
  time = 0;
  private queue = new Map<number, () => void>();
  private nextHandle = 1;

  now(): number {
    return this.time;
  }

  request(callback: () => void): number {
    const handle = this.nextHandle++;
    this.queue.set(handle, callback);
    return handle;
  }

  cancel(handle: number): void {
    this.queue.delete(handle);
  }

  /** Advance the clock and fire every frame queued before this step. */
  step(ms: number): void {
    this.time += ms;
    const callbacks = [...this.queue.values()];
    this.queue.clear();
    for (const cb of callbacks) cb();
  }

  pending(): number {
    return this.queue.size;
  }
}

export const LINE_COORDS = new Float32Array([0, 0, 1, 0, 2, 0, 10, 0]);
export const SCRAMBLED_COORDS = new Float32Array([0, 0, 10, 0, 1, 0, 2, 0]);

/** Source-space values are [0, 1, 2, 10], one per point. */
const HD_VALUES = [0, 1, 2, 10];

/** k=1 neighbor of each point in source space (ties break to lower index). */
const KNN1 = [[1], [0], [1], [2]];

const PRESERVATION: Record<string, Float32Array> = {
  line: new Float32Array([1, 1, 1, 1]),
  scrambled: new Float32Array([0, 0, 0, 1]),
};

const TRIPLETS: Record<string, Float32Array> = {
  line: new Float32Array([1, 1, 1, 1]),
  scrambled: new Float32Array([1 / 3, 0, 0, 2 / 3]),
};

export const MANIFEST: ManifestInfo = {
  dataset: "line4",
  n: 4,
  embeddings: ["line", "scrambled"],
  metrics: Object.fromEntries(
    ["line", "scrambled"].map((name) => [
      name,
      [
        {
          metric_name: "neighborhood_preservation",
          params: { hd_exactness: "exact", k: 1, ld_exactness: "exact" },
          vmin: 0,
          vmax: 1,
        },
        {
          metric_name: "triplet_accuracy",
          params: { mode: "sampled", seed: 42, triplets_per_point: 500 },
          vmin: 0,
          vmax: 1,
        },
      ],
    ]),
  ),
  metadata: [
    { name: "cluster", kind: "categorical" },
    { name: "x0", kind: "continuous" },
  ],
  defaults: { k_list: [1], seed: 42 },
};

function f32Response(values: Float32Array, headers: Record<string, string> = {}): Response {
  return new Response(values.slice().buffer, {
    headers: { "Content-Type": "application/octet-stream", ...headers },
  });
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface Line4Server {
  fetchFn: typeof fetch;
  /** Request log, one "METHOD /path" entry per call. */
  calls: string[];
}

export function line4Server(): Line4Server {
  const calls: string[] = [];

  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input));
    const method = init?.method ?? "GET";
    calls.push(`${method} ${url.pathname}`);

    if (url.pathname === "/api/manifest") return jsonResponse(MANIFEST);

    const coords = url.pathname.match(/^\/api\/embeddings\/([^/]+)\/coords$/);
    if (coords !== null) {
      const name = coords[1] as string;
      if (name === "line") return f32Response(LINE_COORDS);
      if (name === "scrambled") return f32Response(SCRAMBLED_COORDS);
      return jsonResponse({ detail: `unknown embedding '${name}'` }, 404);
    }

    const metric = url.pathname.match(/^\/api\/embeddings\/([^/]+)\/metrics\/([^/]+)$/);
    if (metric !== null) {
      const [, name, metricName] = metric as unknown as [string, string, string];
      const table = metricName === "neighborhood_preservation" ? PRESERVATION : TRIPLETS;
      const values = table[name];
      if (values === undefined || !["neighborhood_preservation", "triplet_accuracy"].includes(metricName)) {
        return jsonResponse({ detail: `no ${metricName} column cached for ${name}` }, 404);
      }
      return f32Response(values, { "X-Vmin": "0.0", "X-Vmax": "1.0" });
    }

    const distances = url.pathname.match(/^\/api\/points\/(\d+)\/hd_distances$/);
    if (distances !== null) {
      const anchor = Number(distances[1]);
      if (anchor >= HD_VALUES.length) return jsonResponse({ detail: "point out of range" }, 404);
      const row = HD_VALUES.map((v) => Math.abs(v - (HD_VALUES[anchor] as number)));
      return f32Response(new Float32Array(row));
    }

    if (url.pathname === "/api/selection/neighbors" && method === "POST") {
      const body = JSON.parse(String(init?.body)) as { indices: number[]; k: number };
      const selected = new Set(body.indices);
      const union = new Set<number>();
      for (const i of body.indices) {
        for (const j of (KNN1[i] ?? []).slice(0, body.k)) {
          if (!selected.has(j)) union.add(j);
        }
      }
      return jsonResponse({ indices: [...union].sort((a, b) => a - b) });
    }

    const metadata = url.pathname.match(/^\/api\/metadata\/([^/]+)$/);
    if (metadata !== null) {
      if (metadata[1] === "cluster") return jsonResponse(["near", "near", "near", "far"]);
      if (metadata[1] === "x0") return f32Response(new Float32Array(HD_VALUES));
      return jsonResponse({ detail: `unknown metadata column '${metadata[1]}'` }, 404);
    }

    return jsonResponse({ detail: `no route for ${url.pathname}` }, 404);
  }) as typeof fetch;

  return { fetchFn, calls };
}
