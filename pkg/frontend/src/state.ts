/** View state and its reducer.
 *
 * The reducer is total: every action from every state returns a valid state.
 * Invalid payloads (unknown embedding names, out-of-range indices, non-finite
 * camera math) are dropped or clamped, never thrown, so UI handlers can
 * dispatch whatever the user did and stay consistent.
 */

import type { ManifestInfo, MetricDescriptor } from "./api.js";

export type ColorSource =
  | { kind: "none" }
  | { kind: "metric"; descriptor: MetricDescriptor }
  | { kind: "metadata"; column: string }
  | { kind: "anchor"; point: number };

export interface Camera {
  /** World coordinate at the viewport center. */
  x: number;
  y: number;
  /** Screen pixels per world unit. */
  scale: number;
}

export interface ViewState {
  manifest: ManifestInfo | null;
  activeEmbedding: string | null;
  colorSource: ColorSource;
  selection: ReadonlySet<number>;
  overlay: ReadonlySet<number>;
  camera: Camera;
  toast: string | null;
}

export type Action =
  | { type: "manifest-loaded"; manifest: ManifestInfo }
  | { type: "switch-embedding"; name: string }
  | { type: "color-by"; source: ColorSource }
  | { type: "select"; indices: number[] }
  | { type: "clear-selection" }
  | { type: "overlay"; indices: number[] }
  | { type: "pan"; dx: number; dy: number }
  | { type: "zoom"; factor: number }
  | { type: "set-camera"; camera: Camera }
  | { type: "toast"; message: string }
  | { type: "dismiss-toast" };

export const INITIAL_STATE: ViewState = {
  manifest: null,
  activeEmbedding: null,
  colorSource: { kind: "none" },
  selection: new Set(),
  overlay: new Set(),
  camera: { x: 0, y: 0, scale: 1 },
  toast: null,
};

const MIN_SCALE = 1e-6;
const MAX_SCALE = 1e6;

function pointCount(state: ViewState): number {
  return state.manifest?.n ?? 0;
}

function validIndices(state: ViewState, indices: number[]): Set<number> {
  const n = pointCount(state);
  const kept = new Set<number>();
  for (const i of indices) {
    if (Number.isInteger(i) && i >= 0 && i < n) kept.add(i);
  }
  return kept;
}

function colorSourceValid(state: ViewState, source: ColorSource): boolean {
  const manifest = state.manifest;
  if (source.kind === "none") return true;
  if (manifest === null) return false;
  switch (source.kind) {
    case "metadata":
      return manifest.metadata.some((col) => col.name === source.column);
    case "anchor":
      return Number.isInteger(source.point) && source.point >= 0 && source.point < manifest.n;
    case "metric":
      return Object.values(manifest.metrics).some((cols) =>
        cols.some((col) => col.metric_name === source.descriptor.metric_name),
      );
  }
}

export function reduce(state: ViewState, action: Action): ViewState {
  switch (action.type) {
    case "manifest-loaded": {
      const manifest = action.manifest;
      const first = manifest.embeddings[0] ?? null;
      // a reloaded manifest may describe a different bundle: keep nothing
      return { ...INITIAL_STATE, manifest, activeEmbedding: first };
    }
    case "switch-embedding": {
      if (!state.manifest || !state.manifest.embeddings.includes(action.name)) {
        return { ...state, toast: `unknown embedding "${action.name}"` };
      }
      // selection, overlay and color source all survive the switch: point
      // identity is index-based across embeddings
      return { ...state, activeEmbedding: action.name, toast: null };
    }
    case "color-by": {
      if (!colorSourceValid(state, action.source)) {
        return { ...state, toast: "color source not in this bundle" };
      }
      return { ...state, colorSource: action.source, toast: null };
    }
    case "select": {
      const selection = validIndices(state, action.indices);
      if (selection.size === 0) {
        return { ...state, selection: new Set(), overlay: new Set() };
      }
      // a fresh selection invalidates the previous neighbor overlay
      return { ...state, selection, overlay: new Set() };
    }
    case "clear-selection":
      return { ...state, selection: new Set(), overlay: new Set() };
    case "overlay": {
      const overlay = validIndices(state, action.indices);
      for (const i of state.selection) overlay.delete(i);
      return { ...state, overlay };
    }
    case "pan": {
      const { dx, dy } = action;
      if (!Number.isFinite(dx) || !Number.isFinite(dy)) return state;
      const camera = {
        ...state.camera,
        x: state.camera.x + dx / state.camera.scale,
        y: state.camera.y + dy / state.camera.scale,
      };
      if (!Number.isFinite(camera.x) || !Number.isFinite(camera.y)) return state;
      return { ...state, camera };
    }
    case "zoom": {
      const factor = action.factor;
      if (!Number.isFinite(factor) || factor <= 0) return state;
      const scale = Math.min(MAX_SCALE, Math.max(MIN_SCALE, state.camera.scale * factor));
      return { ...state, camera: { ...state.camera, scale } };
    }
    case "set-camera": {
      const { x, y, scale } = action.camera;
      if (!Number.isFinite(x) || !Number.isFinite(y) || !Number.isFinite(scale) || scale <= 0) {
        return state;
      }
      return {
        ...state,
        camera: { x, y, scale: Math.min(MAX_SCALE, Math.max(MIN_SCALE, scale)) },
      };
    }
    case "toast":
      return { ...state, toast: action.message };
    case "dismiss-toast":
      return { ...state, toast: null };
  }
}

/** The invariants the reducer maintains; exported so tests can assert them
 * after arbitrary action sequences. */
export function invariantViolations(state: ViewState): string[] {
  const problems: string[] = [];
  const n = pointCount(state);
  if (state.manifest === null) {
    if (state.activeEmbedding !== null) problems.push("embedding set without manifest");
  } else if (
    state.activeEmbedding === null
      ? state.manifest.embeddings.length > 0
      : !state.manifest.embeddings.includes(state.activeEmbedding)
  ) {
    problems.push(`active embedding ${state.activeEmbedding} not in manifest`);
  }
  for (const i of state.selection) {
    if (!Number.isInteger(i) || i < 0 || i >= n) problems.push(`selection index ${i}`);
  }
  for (const i of state.overlay) {
    if (!Number.isInteger(i) || i < 0 || i >= n) problems.push(`overlay index ${i}`);
    if (state.selection.has(i)) problems.push(`overlay overlaps selection at ${i}`);
  }
  const { x, y, scale } = state.camera;
  if (!Number.isFinite(x) || !Number.isFinite(y)) problems.push("camera position not finite");
  if (!Number.isFinite(scale) || scale <= 0) problems.push(`camera scale ${scale}`);
  return problems;
}
