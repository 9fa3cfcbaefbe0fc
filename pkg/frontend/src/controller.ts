/** Orchestrates data loading, view state and transitions.
 *
 * Everything the viewer does short of touching the DOM lives here, so the
 * interaction flows (switch embedding, recolor, lasso, neighbor overlay) can
 * be driven headless in tests with a stub fetch and a fake frame scheduler.
 * All metric values arrive as served bytes; this side only maps them to
 * colors and positions.
 */

import { LatestOnly, TraceApi, type MetricDescriptor } from "./api.js";
import {
  colorCategorical,
  colorContinuous,
  colorUniform,
  type Coloring,
} from "./colors.js";
import {
  fitCamera,
  lassoSelect,
  nearestPoint,
  screenToWorld,
  type Polygon,
  type Viewport,
} from "./geometry.js";
import { INITIAL_STATE, reduce, type Action, type ViewState } from "./state.js";
import {
  rafScheduler,
  transitionCoords,
  TRANSITION_MS,
  type FrameScheduler,
} from "./transition.js";

export interface ControllerOptions {
  scheduler?: FrameScheduler;
  transitionMs?: number;
  viewport?: Viewport;
  onRender?: () => void;
}

/** Pixel radius a click may miss a point by and still hit it. */
const CLICK_SLOP_PX = 8;

export class ViewerController {
  state: ViewState = INITIAL_STATE;
  /** Coordinates currently on screen; mid-transition these are interpolated. */
  displayed: Float32Array | null = null;
  coloring: Coloring;
  viewport: Viewport;

  private readonly api: TraceApi;
  private readonly scheduler: FrameScheduler;
  private readonly transitionMs: number;
  private readonly onRender: () => void;
  private readonly coordsCache = new Map<string, Float32Array>();
  private readonly latestCoords = new LatestOnly();
  private readonly latestColor = new LatestOnly();
  private readonly latestOverlay = new LatestOnly();
  private cancelTransition: (() => void) | null = null;

  constructor(api: TraceApi, options: ControllerOptions = {}) {
    this.api = api;
    this.scheduler = options.scheduler ?? rafScheduler;
    this.transitionMs = options.transitionMs ?? TRANSITION_MS;
    this.viewport = options.viewport ?? { width: 800, height: 600 };
    this.onRender = options.onRender ?? (() => {});
    this.coloring = colorUniform(0);
  }

  get transitioning(): boolean {
    return this.cancelTransition !== null;
  }

  dispatch(action: Action): void {
    this.state = reduce(this.state, action);
    this.onRender();
  }

  async init(): Promise<void> {
    const manifest = await this.api.manifest();
    this.coordsCache.clear();
    this.dispatch({ type: "manifest-loaded", manifest });
    this.coloring = colorUniform(manifest.n);
    const first = this.state.activeEmbedding;
    if (first === null) return;
    const coords = await this.fetchCoords(first);
    this.displayed = coords;
    this.fitToData();
  }

  /** Refit the camera to the displayed coordinates. */
  fitToData(): void {
    if (this.displayed === null) return;
    this.dispatch({ type: "set-camera", camera: fitCamera(this.displayed, this.viewport) });
  }

  setViewport(view: Viewport): void {
    this.viewport = view;
    this.onRender();
  }

  /** Switch the active embedding, animating points from their current spots.
   * Selection, overlay and coloring carry over; point identity is the index. */
  async switchEmbedding(name: string): Promise<void> {
    if (name === this.state.activeEmbedding) return;
    this.dispatch({ type: "switch-embedding", name });
    if (this.state.activeEmbedding !== name) return; // unknown name: toast is up
    const target = await this.latestCoords.run(() => this.fetchCoords(name));
    if (target === undefined) return; // a newer switch superseded this one
    this.beginTransition(target);
    if (this.state.colorSource.kind === "metric") {
      // metric columns are per-embedding; the others do not depend on it
      await this.refreshColors();
    }
  }

  async colorByMetric(descriptor: MetricDescriptor): Promise<void> {
    this.dispatch({ type: "color-by", source: { kind: "metric", descriptor } });
    await this.refreshColors();
  }

  async colorByMetadata(column: string): Promise<void> {
    this.dispatch({ type: "color-by", source: { kind: "metadata", column } });
    await this.refreshColors();
  }

  /** Recolor every point by its source-space distance to the clicked point. */
  async colorByAnchor(point: number): Promise<void> {
    this.dispatch({ type: "color-by", source: { kind: "anchor", point } });
    await this.refreshColors();
  }

  clearColor(): void {
    this.dispatch({ type: "color-by", source: { kind: "none" } });
    this.coloring = colorUniform(this.state.manifest?.n ?? 0);
    this.onRender();
  }

  /** Resolve a click in screen pixels to an anchor recoloring, if it lands on
   * a point. Returns the point index or null. */
  async clickAt(sx: number, sy: number): Promise<number | null> {
    if (this.displayed === null) return null;
    const [wx, wy] = screenToWorld(this.state.camera, this.viewport, sx, sy);
    const hit = nearestPoint(this.displayed, wx, wy, CLICK_SLOP_PX / this.state.camera.scale);
    if (hit === null) return null;
    await this.colorByAnchor(hit);
    return hit;
  }

  /** Select the points inside a world-space polygon. */
  lassoWorld(polygon: Polygon): number[] {
    if (this.displayed === null) return [];
    const hits = lassoSelect(this.displayed, polygon);
    this.dispatch(hits.length > 0 ? { type: "select", indices: hits } : { type: "clear-selection" });
    return hits;
  }

  lassoScreen(polygon: Polygon): number[] {
    const world: Polygon = polygon.map(([sx, sy]) =>
      screenToWorld(this.state.camera, this.viewport, sx, sy),
    );
    return this.lassoWorld(world);
  }

  clearSelection(): void {
    this.dispatch({ type: "clear-selection" });
  }

  defaultK(): number {
    const ks = this.state.manifest?.defaults.k_list ?? [];
    return ks.length > 0 ? (ks[0] as number) : 1;
  }

  /** Overlay the union of the selection's source-space neighbor lists, with
   * the selected points themselves excluded. */
  async showNeighbors(k: number = this.defaultK()): Promise<void> {
    const selection = [...this.state.selection].sort((a, b) => a - b);
    if (selection.length === 0) {
      this.dispatch({ type: "toast", message: "select points first" });
      return;
    }
    try {
      const indices = await this.latestOverlay.run(() =>
        this.api.selectionNeighbors(selection, k),
      );
      if (indices === undefined) return;
      this.dispatch({ type: "overlay", indices });
    } catch (err) {
      this.dispatch({ type: "toast", message: String(err instanceof Error ? err.message : err) });
    }
  }

  clearOverlay(): void {
    this.dispatch({ type: "overlay", indices: [] });
  }

  private async fetchCoords(name: string): Promise<Float32Array> {
    const cached = this.coordsCache.get(name);
    if (cached !== undefined) return cached;
    const coords = await this.api.coords(name);
    const n = this.state.manifest?.n ?? coords.length / 2;
    if (coords.length !== 2 * n) {
      throw new Error(`coords for ${name}: expected ${2 * n} floats, got ${coords.length}`);
    }
    this.coordsCache.set(name, coords);
    return coords;
  }

  private beginTransition(target: Float32Array): void {
    if (this.cancelTransition !== null) {
      this.cancelTransition();
      this.cancelTransition = null;
    }
    const from = this.displayed;
    if (from === null || from.length !== target.length) {
      this.displayed = target;
      this.onRender();
      return;
    }
    // start from a copy: `from` may be the transition buffer we are replacing
    this.cancelTransition = transitionCoords(
      from.slice(),
      target,
      (frame) => {
        this.displayed = frame;
        this.onRender();
      },
      () => {
        this.cancelTransition = null;
        this.displayed = target;
        this.onRender();
      },
      this.transitionMs,
      this.scheduler,
    );
  }

  private async refreshColors(): Promise<void> {
    const source = this.state.colorSource;
    const manifest = this.state.manifest;
    if (manifest === null) return;
    try {
      const coloring = await this.latestColor.run(() => this.loadColoring(source, manifest.n));
      if (coloring === undefined) return; // a newer recoloring superseded this one
      this.coloring = coloring;
      this.onRender();
    } catch (err) {
      this.dispatch({ type: "toast", message: String(err instanceof Error ? err.message : err) });
    }
  }

  private async loadColoring(
    source: ViewState["colorSource"],
    n: number,
  ): Promise<Coloring> {
    switch (source.kind) {
      case "none":
        return colorUniform(n);
      case "metric": {
        const embedding = this.state.activeEmbedding;
        if (embedding === null) return colorUniform(n);
        const params = source.descriptor.params;
        const column = await this.api.metric(embedding, source.descriptor.metric_name, {
          k: typeof params["k"] === "number" ? params["k"] : undefined,
          seed: typeof params["seed"] === "number" ? params["seed"] : undefined,
        });
        return colorContinuous(column.values, column.vmin, column.vmax);
      }
      case "metadata": {
        const values = await this.api.metadata(source.column);
        if (Array.isArray(values)) return colorCategorical(values);
        let vmin = Infinity;
        let vmax = -Infinity;
        for (const v of values) {
          if (v < vmin) vmin = v;
          if (v > vmax) vmax = v;
        }
        return colorContinuous(values, vmin, vmax);
      }
      case "anchor": {
        const distances = await this.api.hdDistances(source.point);
        let vmax = 0;
        for (const v of distances) {
          if (v > vmax) vmax = v;
        }
        // the anchor itself sits at distance zero, the ramp minimum
        return colorContinuous(distances, 0, vmax);
      }
    }
  }
}
