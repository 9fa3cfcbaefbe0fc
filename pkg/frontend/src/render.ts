/** Canvas 2D scatter renderer. Kept to the small slice of the context API that
 * a test stub can record: clearRect, beginPath, arc, fill, stroke. */

import { worldToScreen, type Viewport } from "./geometry.js";
import type { Camera } from "./state.js";

export interface Scene {
  coords: Float32Array;
  colors: string[];
  selection: ReadonlySet<number>;
  overlay: ReadonlySet<number>;
  camera: Camera;
  pointRadius?: number;
}

export const DEFAULT_POINT_RADIUS = 4;

export function drawScatter(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  scene: Scene,
): void {
  const radius = scene.pointRadius ?? DEFAULT_POINT_RADIUS;
  const n = scene.coords.length / 2;
  ctx.clearRect(0, 0, view.width, view.height);

  for (let i = 0; i < n; i++) {
    const [sx, sy] = worldToScreen(
      scene.camera,
      view,
      scene.coords[2 * i] as number,
      scene.coords[2 * i + 1] as number,
    );
    ctx.beginPath();
    ctx.arc(sx, sy, radius, 0, 2 * Math.PI);
    ctx.fillStyle = scene.colors[i] ?? "#888888";
    ctx.globalAlpha = 0.85;
    ctx.fill();
    ctx.globalAlpha = 1;

    if (scene.selection.has(i)) {
      ctx.beginPath();
      ctx.arc(sx, sy, radius + 2, 0, 2 * Math.PI);
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#111111";
      ctx.stroke();
    }
    if (scene.overlay.has(i)) {
      ctx.beginPath();
      ctx.arc(sx, sy, radius + 4, 0, 2 * Math.PI);
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#d62728";
      ctx.stroke();
    }
  }
}

export function drawLasso(
  ctx: CanvasRenderingContext2D,
  screenPolygon: [number, number][],
): void {
  if (screenPolygon.length < 2) return;
  ctx.beginPath();
  const [x0, y0] = screenPolygon[0] as [number, number];
  ctx.moveTo(x0, y0);
  for (const [x, y] of screenPolygon.slice(1)) ctx.lineTo(x, y);
  ctx.closePath();
  ctx.lineWidth = 1;
  ctx.strokeStyle = "#2563eb";
  ctx.setLineDash([4, 3]);
  ctx.stroke();
  ctx.setLineDash([]);
}
