/** Browser entry point: builds the DOM shell and wires events to the
 * controller. No data or interaction logic lives here. */

import { TraceApi, type MetricDescriptor } from "./api.js";
import { rampColor, type Legend } from "./colors.js";
import { drawLasso, drawScatter } from "./render.js";
import { ViewerController } from "./controller.js";
import type { Polygon } from "./geometry.js";

function apiBaseUrl(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return (param ?? "http://127.0.0.1:8000").replace(/\/$/, "");
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className !== undefined) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function metricLabel(descriptor: MetricDescriptor): string {
  const parts = Object.entries(descriptor.params)
    .filter(([, v]) => v !== null)
    .map(([key, v]) => `${key}=${v}`);
  return parts.length > 0 ? `${descriptor.metric_name} (${parts.join(", ")})` : descriptor.metric_name;
}

function legendHtml(legend: Legend): HTMLElement {
  const box = el("div", "legend");
  if (legend.kind === "continuous") {
    const bar = el("div", "legend-bar");
    const stops: string[] = [];
    for (let i = 0; i <= 10; i++) stops.push(rampColor(i / 10));
    bar.style.background = `linear-gradient(to right, ${stops.join(",")})`;
    box.appendChild(bar);
    const row = el("div", "legend-row");
    row.appendChild(el("span", "", legend.vmin.toPrecision(4)));
    row.appendChild(el("span", "legend-mean", `mean ${legend.mean.toPrecision(4)}`));
    row.appendChild(el("span", "", legend.vmax.toPrecision(4)));
    box.appendChild(row);
  } else {
    for (const entry of legend.entries) {
      const row = el("div", "legend-row");
      const swatch = el("span", "legend-swatch");
      swatch.style.background = entry.color;
      row.appendChild(swatch);
      row.appendChild(el("span", "", entry.label));
      box.appendChild(row);
    }
  }
  return box;
}

function main(): void {
  const app = document.getElementById("app");
  if (app === null) throw new Error("no #app element");

  const sidebar = el("div", "sidebar");
  const stage = el("div", "stage");
  const canvas = el("canvas");
  const toast = el("div", "toast");
  stage.appendChild(canvas);
  stage.appendChild(toast);
  app.appendChild(sidebar);
  app.appendChild(stage);

  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error("canvas 2d context unavailable");

  const embeddingBox = el("div", "panel");
  const colorBox = el("div", "panel");
  const selectionBox = el("div", "panel");
  const legendBox = el("div", "panel");
  sidebar.append(embeddingBox, colorBox, selectionBox, legendBox);

  let lassoMode = false;
  let lassoScreenPts: Polygon = [];
  let dragging = false;
  let dragMoved = false;
  let lastX = 0;
  let lastY = 0;

  const api = new TraceApi(apiBaseUrl());
  const controller = new ViewerController(api, { onRender: render });

  function viewportSize(): { width: number; height: number } {
    return { width: stage.clientWidth, height: stage.clientHeight };
  }

  function resize(): void {
    const view = viewportSize();
    const dpr = window.devicePixelRatio || 1;
    canvas.width = Math.max(1, Math.round(view.width * dpr));
    canvas.height = Math.max(1, Math.round(view.height * dpr));
    canvas.style.width = `${view.width}px`;
    canvas.style.height = `${view.height}px`;
    if (ctx) ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
    controller.setViewport(view);
  }

  function render(): void {
    const state = controller.state;
    if (ctx === null) return;
    if (controller.displayed !== null) {
      drawScatter(ctx, controller.viewport, {
        coords: controller.displayed,
        colors: controller.coloring.colors,
        selection: state.selection,
        overlay: state.overlay,
        camera: state.camera,
      });
      if (lassoScreenPts.length > 1) drawLasso(ctx, lassoScreenPts);
    }
    toast.textContent = state.toast ?? "";
    toast.style.display = state.toast === null ? "none" : "block";
    renderSidebar();
  }

  function renderSidebar(): void {
    const state = controller.state;
    const manifest = state.manifest;

    embeddingBox.replaceChildren(el("h3", "", "Embeddings"));
    for (const name of manifest?.embeddings ?? []) {
      const button = el("button", name === state.activeEmbedding ? "active" : "", name);
      button.onclick = () => void controller.switchEmbedding(name);
      embeddingBox.appendChild(button);
    }

    colorBox.replaceChildren(el("h3", "", "Color by"));
    const noneButton = el("button", state.colorSource.kind === "none" ? "active" : "", "none");
    noneButton.onclick = () => controller.clearColor();
    colorBox.appendChild(noneButton);
    const active = state.activeEmbedding;
    if (manifest !== null && active !== null) {
      for (const descriptor of manifest.metrics[active] ?? []) {
        const isActive =
          state.colorSource.kind === "metric" &&
          state.colorSource.descriptor.metric_name === descriptor.metric_name &&
          JSON.stringify(state.colorSource.descriptor.params) ===
            JSON.stringify(descriptor.params);
        const button = el("button", isActive ? "active" : "", metricLabel(descriptor));
        button.onclick = () => void controller.colorByMetric(descriptor);
        colorBox.appendChild(button);
      }
      for (const col of manifest.metadata) {
        const isActive =
          state.colorSource.kind === "metadata" && state.colorSource.column === col.name;
        const button = el("button", isActive ? "active" : "", `${col.name} (${col.kind})`);
        button.onclick = () => void controller.colorByMetadata(col.name);
        colorBox.appendChild(button);
      }
    }
    if (state.colorSource.kind === "anchor") {
      colorBox.appendChild(el("div", "hint", `distance to point ${state.colorSource.point}`));
    }

    selectionBox.replaceChildren(el("h3", "", "Selection"));
    selectionBox.appendChild(el("div", "hint", `${state.selection.size} selected`));
    const lassoButton = el("button", lassoMode ? "active" : "", "lasso");
    lassoButton.onclick = () => {
      lassoMode = !lassoMode;
      render();
    };
    const neighborsButton = el("button", "", `show HD neighbors (k=${controller.defaultK()})`);
    neighborsButton.onclick = () => void controller.showNeighbors();
    const clearButton = el("button", "", "clear");
    clearButton.onclick = () => controller.clearSelection();
    const fitButton = el("button", "", "fit view");
    fitButton.onclick = () => controller.fitToData();
    selectionBox.append(lassoButton, neighborsButton, clearButton, fitButton);

    legendBox.replaceChildren(el("h3", "", "Legend"));
    legendBox.appendChild(legendHtml(controller.coloring.legend));
  }

  canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    dragMoved = false;
    lastX = e.offsetX;
    lastY = e.offsetY;
    if (lassoMode) lassoScreenPts = [[e.offsetX, e.offsetY]];
  });

  canvas.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    const dx = e.offsetX - lastX;
    const dy = e.offsetY - lastY;
    if (Math.abs(dx) + Math.abs(dy) > 2) dragMoved = true;
    if (lassoMode) {
      lassoScreenPts.push([e.offsetX, e.offsetY]);
      render();
    } else {
      // dragging right moves the camera left; world y is flipped
      controller.dispatch({ type: "pan", dx: -dx, dy: dy });
      lastX = e.offsetX;
      lastY = e.offsetY;
    }
  });

  canvas.addEventListener("mouseup", (e) => {
    if (!dragging) return;
    dragging = false;
    if (lassoMode) {
      controller.lassoScreen(lassoScreenPts);
      lassoScreenPts = [];
      render();
    } else if (!dragMoved) {
      void controller.clickAt(e.offsetX, e.offsetY);
    }
  });

  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    controller.dispatch({ type: "zoom", factor: Math.exp(-e.deltaY * 0.001) });
  });

  window.addEventListener("resize", resize);
  resize();
  controller.init().catch((err) => {
    controller.dispatch({ type: "toast", message: `failed to load: ${err.message ?? err}` });
  });
}

main();
