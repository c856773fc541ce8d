/**
 * Canvas scatterplot: camera math plus draw routines.
 *
 * The camera maps normalized data coordinates (unit square, y up) onto
 * screen pixels. All transforms are pure so they can be tested without a
 * DOM; the renderer takes any CanvasRenderingContext2D-compatible surface.
 */

import { ViewState } from "./state.js";

export interface Camera {
  /** Data coordinate at the screen origin. */
  x: number;
  y: number;
  /** Pixels per data unit. */
  k: number;
}

export function fitCamera(width: number, height: number,
                          margin = 0.05): Camera {
  const k = Math.min(width, height) * (1 - 2 * margin);
  return {
    x: -(width / k - 1) / 2,
    y: -(height / k - 1) / 2,
    k,
  };
}

export function toScreen(cam: Camera, px: number, py: number):
    [number, number] {
  return [(px - cam.x) * cam.k, (py - cam.y) * cam.k];
}

export function toData(cam: Camera, sx: number, sy: number):
    [number, number] {
  return [sx / cam.k + cam.x, sy / cam.k + cam.y];
}

export function panned(cam: Camera, dxPixels: number, dyPixels: number):
    Camera {
  return { x: cam.x - dxPixels / cam.k, y: cam.y - dyPixels / cam.k, k: cam.k };
}

/** Zoom by `factor` keeping the data point under (sx, sy) fixed. */
export function zoomedAt(cam: Camera, sx: number, sy: number,
                         factor: number): Camera {
  const k = Math.min(1e7, Math.max(1e-3, cam.k * factor));
  const [dx, dy] = toData(cam, sx, sy);
  return { x: dx - sx / k, y: dy - sy / k, k };
}

const LABEL_PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
  "#86bcb6", "#d37295",
];

export function labelColor(label: number): string {
  return LABEL_PALETTE[((label % LABEL_PALETTE.length)
    + LABEL_PALETTE.length) % LABEL_PALETTE.length];
}

/** Lightness ramp for ghost markers: small offsets dark, large ones pale. */
export function ghostShadeColor(offset: number, radius: number): string {
  const t = radius > 0 ? Math.min(1, offset / radius) : 0;
  const lightness = 25 + 55 * t;
  return `hsl(260, 45%, ${lightness}%)`;
}

type Ctx = CanvasRenderingContext2D;

function drawCross(ctx: Ctx, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.moveTo(x - r, y);
  ctx.lineTo(x + r, y);
  ctx.moveTo(x, y - r);
  ctx.lineTo(x, y + r);
  ctx.stroke();
}

function drawTriangle(ctx: Ctx, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.moveTo(x, y - r);
  ctx.lineTo(x - 0.87 * r, y + 0.5 * r);
  ctx.lineTo(x + 0.87 * r, y + 0.5 * r);
  ctx.closePath();
  ctx.fill();
}

function drawDiamond(ctx: Ctx, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.moveTo(x, y - r);
  ctx.lineTo(x + r, y);
  ctx.lineTo(x, y + r);
  ctx.lineTo(x - r, y);
  ctx.closePath();
  ctx.stroke();
}

export interface RenderOptions {
  width: number;
  height: number;
  pointRadius: number;
  pointAlpha: number;
}

export function render(ctx: Ctx, view: ViewState, cam: Camera,
                       opts: RenderOptions): void {
  const { positions, labels, radius } = view.export_;
  ctx.clearRect(0, 0, opts.width, opts.height);

  ctx.globalAlpha = opts.pointAlpha;
  for (const id of view.visibleIds()) {
    const [sx, sy] = toScreen(cam, positions[id][0], positions[id][1]);
    if (sx < -4 || sy < -4 || sx > opts.width + 4 || sy > opts.height + 4) {
      continue;
    }
    const unstable = view.isUnstable(id);
    if (view.colorMode === "labels" && labels !== undefined) {
      ctx.fillStyle = labelColor(labels[id]);
    } else {
      ctx.fillStyle = "#777777";
    }
    ctx.beginPath();
    ctx.arc(sx, sy, unstable ? opts.pointRadius * 1.6 : opts.pointRadius,
            0, 2 * Math.PI);
    ctx.fill();
    if (unstable) {
      ctx.strokeStyle = "#d62728";
      ctx.lineWidth = 1.5;
      ctx.stroke();
    }
  }
  ctx.globalAlpha = 1;

  for (const id of view.selected()) {
    drawInspection(ctx, view, cam, id, radius);
  }
}

function drawInspection(ctx: Ctx, view: ViewState, cam: Camera,
                        id: number, radius: number): void {
  const { positions, neighbor_ids } = view.export_;
  const entry = view.ghostsOf(id);

  if (neighbor_ids !== undefined) {
    ctx.strokeStyle = "#2a9d8f";
    ctx.lineWidth = 1.2;
    for (const nid of neighbor_ids[id]) {
      const [sx, sy] = toScreen(cam, positions[nid][0], positions[nid][1]);
      drawDiamond(ctx, sx, sy, 5);
    }
  }

  if (entry !== undefined) {
    for (let g = 0; g < entry.positions.length; g++) {
      const [sx, sy] = toScreen(cam, entry.positions[g][0],
                                entry.positions[g][1]);
      ctx.fillStyle = view.ghostShade
        ? ghostShadeColor(entry.initial_offsets[g], radius)
        : "#6a4c93";
      drawTriangle(ctx, sx, sy, 5);
    }
  }

  const [sx, sy] = toScreen(cam, positions[id][0], positions[id][1]);
  ctx.strokeStyle = "#111111";
  ctx.lineWidth = 2;
  drawCross(ctx, sx, sy, 7);
}

/** Nearest visible point within `maxPixels` of a screen location. */
export function pickPoint(view: ViewState, cam: Camera, sx: number,
                          sy: number, maxPixels = 6): number | undefined {
  const { positions } = view.export_;
  let best: number | undefined;
  let bestDist = maxPixels * maxPixels;
  for (const id of view.visibleIds()) {
    const [px, py] = toScreen(cam, positions[id][0], positions[id][1]);
    const dd = (px - sx) * (px - sx) + (py - sy) * (py - sy);
    if (dd <= bestDist) {
      bestDist = dd;
      best = id;
    }
  }
  return best;
}
