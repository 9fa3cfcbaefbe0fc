import { describe, expect, it } from "vitest";

import { drawLasso, drawScatter } from "../src/render.js";

type Op = [string, ...unknown[]];

/** Records every context call and style assignment in order. */
function recordingCtx(): { ctx: CanvasRenderingContext2D; ops: Op[] } {
  const ops: Op[] = [];
  const target: Record<string, unknown> = {};
  const ctx = new Proxy(target, {
    get(_, prop: string) {
      return (...args: unknown[]) => {
        ops.push([prop, ...args]);
      };
    },
    set(_, prop: string, value) {
      ops.push([`set ${prop}`, value]);
      return true;
    },
  }) as unknown as CanvasRenderingContext2D;
  return { ctx, ops };
}

const VIEW = { width: 100, height: 100 };

describe("drawScatter", () => {
  it("clears the canvas and draws one disc per point", () => {
    const { ctx, ops } = recordingCtx();
    drawScatter(ctx, VIEW, {
      coords: new Float32Array([0, 0, 1, 1]),
      colors: ["rgb(1,2,3)", "rgb(4,5,6)"],
      selection: new Set(),
      overlay: new Set(),
      camera: { x: 0.5, y: 0.5, scale: 10 },
    });
    expect(ops[0]).toEqual(["clearRect", 0, 0, 100, 100]);
    expect(ops.filter(([op]) => op === "arc")).toHaveLength(2);
    expect(ops.filter(([op]) => op === "fill")).toHaveLength(2);
    const fills = ops.filter(([op]) => op === "set fillStyle").map(([, v]) => v);
    expect(fills).toEqual(["rgb(1,2,3)", "rgb(4,5,6)"]);
  });

  it("adds rings for selected and overlaid points", () => {
    const { ctx, ops } = recordingCtx();
    drawScatter(ctx, VIEW, {
      coords: new Float32Array([0, 0, 1, 1, 2, 2]),
      colors: ["#111", "#222", "#333"],
      selection: new Set([0]),
      overlay: new Set([2]),
      camera: { x: 1, y: 1, scale: 10 },
    });
    // three point discs plus one selection ring plus one overlay ring
    expect(ops.filter(([op]) => op === "arc")).toHaveLength(5);
    expect(ops.filter(([op]) => op === "stroke")).toHaveLength(2);
  });

  it("keeps point centers consistent with the camera transform", () => {
    const { ctx, ops } = recordingCtx();
    drawScatter(ctx, VIEW, {
      coords: new Float32Array([3, 4]),
      colors: ["#000"],
      selection: new Set(),
      overlay: new Set(),
      camera: { x: 3, y: 4, scale: 5 },
    });
    const arc = ops.find(([op]) => op === "arc");
    // the camera centers on the point: it lands mid-viewport
    expect(arc?.[1]).toBe(50);
    expect(arc?.[2]).toBe(50);
  });
});

describe("drawLasso", () => {
  it("traces the polygon as a closed dashed outline", () => {
    const { ctx, ops } = recordingCtx();
    drawLasso(ctx, [
      [0, 0],
      [10, 0],
      [10, 10],
    ]);
    expect(ops.filter(([op]) => op === "moveTo")).toHaveLength(1);
    expect(ops.filter(([op]) => op === "lineTo")).toHaveLength(2);
    expect(ops.filter(([op]) => op === "closePath")).toHaveLength(1);
    expect(ops.filter(([op]) => op === "stroke")).toHaveLength(1);
  });

  it("ignores degenerate polygons", () => {
    const { ctx, ops } = recordingCtx();
    drawLasso(ctx, [[5, 5]]);
    expect(ops).toEqual([]);
  });
});
