/** Camera math and lasso hit-testing, all in plain functions so they can be
 * tested without a DOM. World space is the embedding's coordinate system;
 * screen space is CSS pixels with the origin at the top-left. */

import type { Camera } from "./state.js";

export interface Viewport {
  width: number;
  height: number;
}

export function worldToScreen(
  camera: Camera,
  view: Viewport,
  wx: number,
  wy: number,
): [number, number] {
  // y flips: world y grows upward, screen y grows downward
  return [
    view.width / 2 + (wx - camera.x) * camera.scale,
    view.height / 2 - (wy - camera.y) * camera.scale,
  ];
}

export function screenToWorld(
  camera: Camera,
  view: Viewport,
  sx: number,
  sy: number,
): [number, number] {
  return [
    camera.x + (sx - view.width / 2) / camera.scale,
    camera.y - (sy - view.height / 2) / camera.scale,
  ];
}

/** Camera that fits all coords with a margin factor, centered on their box. */
export function fitCamera(coords: Float32Array, view: Viewport, margin = 0.9): Camera {
  const n = coords.length / 2;
  if (n === 0) return { x: 0, y: 0, scale: 1 };
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (let i = 0; i < n; i++) {
    const x = coords[2 * i] as number;
    const y = coords[2 * i + 1] as number;
    if (x < minX) minX = x;
    if (x > maxX) maxX = x;
    if (y < minY) minY = y;
    if (y > maxY) maxY = y;
  }
  const spanX = maxX - minX;
  const spanY = maxY - minY;
  const span = Math.max(spanX, spanY);
  const scale = span > 0 ? (margin * Math.min(view.width, view.height)) / span : 1;
  return { x: (minX + maxX) / 2, y: (minY + maxY) / 2, scale };
}

export type Polygon = [number, number][];

/** Ray-casting point-in-polygon; points exactly on an edge may fall on either
 * side, which is fine for freehand lassos. */
export function pointInPolygon(polygon: Polygon, x: number, y: number): boolean {
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const [xi, yi] = polygon[i] as [number, number];
    const [xj, yj] = polygon[j] as [number, number];
    const crosses = yi > y !== yj > y && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi;
    if (crosses) inside = !inside;
  }
  return inside;
}

/** Indices of coords falling inside a world-space lasso polygon. */
export function lassoSelect(coords: Float32Array, polygon: Polygon): number[] {
  if (polygon.length < 3) return [];
  const hits: number[] = [];
  const n = coords.length / 2;
  for (let i = 0; i < n; i++) {
    if (pointInPolygon(polygon, coords[2 * i] as number, coords[2 * i + 1] as number)) {
      hits.push(i);
    }
  }
  return hits;
}

/** Index of the nearest point within maxDist world units, or null. */
export function nearestPoint(
  coords: Float32Array,
  wx: number,
  wy: number,
  maxDist: number,
): number | null {
  let best = -1;
  let bestD2 = maxDist * maxDist;
  const n = coords.length / 2;
  for (let i = 0; i < n; i++) {
    const dx = (coords[2 * i] as number) - wx;
    const dy = (coords[2 * i + 1] as number) - wy;
    const d2 = dx * dx + dy * dy;
    if (d2 <= bestD2) {
      best = i;
      bestD2 = d2;
    }
  }
  return best >= 0 ? best : null;
}
