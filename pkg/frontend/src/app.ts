/**
 * DOM wiring: file loading, the d slider, the unstable list, toggles,
 * and pointer-driven pan/zoom on the canvas.
 */

import { parseExport, ExportError } from "./types.js";
import { ViewState } from "./state.js";
import {
  Camera, fitCamera, panned, pickPoint, render, zoomedAt,
} from "./scatter.js";

const MAX_LIST_ROWS = 200;

export interface AppHandles {
  root: HTMLElement;
  slider: HTMLInputElement;
  sliderValue: HTMLElement;
  countLabel: HTMLElement;
  list: HTMLElement;
  detail: HTMLElement;
  banner: HTMLElement;
  canvas: HTMLCanvasElement;
  showUnstableBox: HTMLInputElement;
  colorBox: HTMLInputElement;
  shadeBox: HTMLInputElement;
  fileInput: HTMLInputElement;
  getView(): ViewState | undefined;
  loadText(text: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
    doc: Document, tag: K, className?: string,
    text?: string): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className !== undefined) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function createApp(root: HTMLElement): AppHandles {
  const doc = root.ownerDocument;
  let view: ViewState | undefined;
  let cam: Camera | undefined;

  const banner = el(doc, "div", "banner");
  banner.style.display = "none";

  const canvas = el(doc, "canvas", "plot");
  canvas.width = 900;
  canvas.height = 640;

  const fileInput = el(doc, "input") as HTMLInputElement;
  fileInput.type = "file";
  fileInput.accept = ".json,.ghost.json,application/json";

  const slider = el(doc, "input") as HTMLInputElement;
  slider.type = "range";
  slider.min = "0";
  slider.max = "1";
  slider.step = "0.001";
  slider.value = "0.1";
  const sliderValue = el(doc, "span", "slider-value", "d = 0.100");

  const countLabel = el(doc, "div", "count", "no file loaded");
  const list = el(doc, "ul", "unstable-list");
  const detail = el(doc, "div", "detail");

  const showUnstableBox = el(doc, "input") as HTMLInputElement;
  showUnstableBox.type = "checkbox";
  showUnstableBox.checked = true;
  const colorBox = el(doc, "input") as HTMLInputElement;
  colorBox.type = "checkbox";
  colorBox.checked = true;
  const shadeBox = el(doc, "input") as HTMLInputElement;
  shadeBox.type = "checkbox";
  shadeBox.checked = true;

  const controls = el(doc, "div", "controls");
  const sliderRow = el(doc, "label", "row", "threshold ");
  sliderRow.appendChild(slider);
  sliderRow.appendChild(sliderValue);
  const showRow = el(doc, "label", "row", "show unstable ");
  showRow.appendChild(showUnstableBox);
  const colorRow = el(doc, "label", "row", "color by label ");
  colorRow.appendChild(colorBox);
  const shadeRow = el(doc, "label", "row", "shade ghosts by initial offset ");
  shadeRow.appendChild(shadeBox);
  controls.append(fileInput, sliderRow, showRow, colorRow, shadeRow,
                  countLabel, list, detail);

  root.append(banner, canvas, controls);

  function redraw(): void {
    if (view === undefined || cam === undefined) {
      return;
    }
    const ctx = canvas.getContext("2d");
    if (ctx !== null) {
      render(ctx, view, cam, {
        width: canvas.width,
        height: canvas.height,
        pointRadius: 2.5,
        pointAlpha: 0.8,
      });
    }
  }

  function renderDetail(): void {
    detail.textContent = "";
    if (view === undefined) {
      return;
    }
    for (const id of view.selected()) {
      const row = el(doc, "div", "detail-row");
      const label = view.labelName(id);
      const d_i = view.export_.distances[id];
      let text = `#${id}`;
      if (label !== undefined) {
        text += ` (${label})`;
      }
      text += ` d_i=${d_i.toFixed(4)}`;
      if (view.isDropped(id)) {
        text += " - ghosts dropped (stable)";
      } else {
        text += ` - pattern ${view.patternOf(id)} (heuristic)`;
      }
      row.textContent = text;
      detail.appendChild(row);
    }
  }

  function renderList(): void {
    list.textContent = "";
    if (view === undefined) {
      return;
    }
    const items = view.unstableList();
    countLabel.textContent =
      `${items.length} unstable of ${view.export_.n_points} `
      + `at d=${view.threshold.toFixed(3)}`;
    for (const item of items.slice(0, MAX_LIST_ROWS)) {
      const row = el(doc, "li", "unstable-item",
                     `#${item.id}  d_i=${item.d_i.toFixed(4)}`);
      row.addEventListener("click", () => {
        view?.toggleSelect(item.id);
      });
      list.appendChild(row);
    }
  }

  function refresh(): void {
    renderList();
    renderDetail();
    redraw();
  }

  function loadText(text: string): void {
    banner.style.display = "none";
    let parsed;
    try {
      parsed = parseExport(text);
    } catch (err) {
      if (err instanceof ExportError) {
        banner.textContent = `could not load export: ${err.message}`;
        banner.style.display = "block";
        return;
      }
      throw err;
    }
    view = new ViewState(parsed);
    cam = fitCamera(canvas.width, canvas.height);
    slider.value = String(parsed.default_d);
    sliderValue.textContent = `d = ${parsed.default_d.toFixed(3)}`;
    view.subscribe(refresh);
    refresh();
  }

  slider.addEventListener("input", () => {
    const d = Number(slider.value);
    sliderValue.textContent = `d = ${d.toFixed(3)}`;
    view?.setThreshold(d);
  });
  showUnstableBox.addEventListener("change", () => {
    view?.setShowUnstable(showUnstableBox.checked);
  });
  colorBox.addEventListener("change", () => {
    if (view !== undefined) {
      view.colorMode = colorBox.checked ? "labels" : "none";
      redraw();
    }
  });
  shadeBox.addEventListener("change", () => {
    if (view !== undefined) {
      view.ghostShade = shadeBox.checked;
      redraw();
    }
  });
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file === undefined) {
      return;
    }
    file.text().then(loadText);
  });

  let dragging = false;
  let moved = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("pointerdown", (ev) => {
    dragging = true;
    moved = false;
    lastX = ev.offsetX;
    lastY = ev.offsetY;
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (!dragging || cam === undefined) {
      return;
    }
    const dx = ev.offsetX - lastX;
    const dy = ev.offsetY - lastY;
    if (Math.abs(dx) + Math.abs(dy) > 2) {
      moved = true;
      cam = panned(cam, dx, dy);
      lastX = ev.offsetX;
      lastY = ev.offsetY;
      redraw();
    }
  });
  canvas.addEventListener("pointerup", (ev) => {
    dragging = false;
    if (moved || view === undefined || cam === undefined) {
      return;
    }
    const hit = pickPoint(view, cam, ev.offsetX, ev.offsetY);
    if (hit !== undefined) {
      view.toggleSelect(hit);
    } else {
      view.clearSelection();
    }
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    if (cam === undefined) {
      return;
    }
    const factor = Math.exp(-ev.deltaY * 0.0015);
    cam = zoomedAt(cam, ev.offsetX, ev.offsetY, factor);
    redraw();
  });

  return {
    root, slider, sliderValue, countLabel, list, detail, banner, canvas,
    showUnstableBox, colorBox, shadeBox, fileInput,
    getView: () => view,
    loadText,
  };
}

/** Browser entry point: mount on #app and honor an ?export= URL. */
export function main(doc: Document, fetchFn: typeof fetch = fetch): void {
  const root = doc.getElementById("app");
  if (root === null) {
    return;
  }
  const app = createApp(root);
  const url = new URL(doc.defaultView?.location.href ?? "http://localhost/");
  const source = url.searchParams.get("export");
  if (source !== null) {
    fetchFn(source)
      .then((resp) => resp.text())
      .then((text) => app.loadText(text))
      .catch((err) => {
        app.banner.textContent = `could not fetch ${source}: ${err}`;
        app.banner.style.display = "block";
      });
  }
}
