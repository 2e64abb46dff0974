/** DOM renderers. Everything is SVG so the output is inspectable in tests;
 * each render replaces the panel's contents wholesale from the latest
 * server responses (no local state). Elements carry data-role attributes
 * for querying. */

import {
  PROVENANCE_COLORS,
  divergingColor,
  extent,
  feedbackBox,
  scale,
} from "./geometry.js";
import {
  ArchiveEntry,
  HistoryEntry,
  SessionView,
  SurfaceView,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 640;
const H = 400;
const PAD = 40;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

function panel(root: HTMLElement, id: string): HTMLElement {
  let node = root.querySelector<HTMLElement>(`#${id}`);
  if (!node) {
    node = el("div", { id, class: "panel" });
    root.appendChild(node);
  }
  node.replaceChildren();
  return node;
}

export function renderBanner(
  root: HTMLElement,
  view: SessionView,
  exportUrl: string,
): void {
  const banner = panel(root, "banner");
  banner.dataset.role = "status-banner";
  banner.dataset.status = view.status;
  const label: Record<string, string> = {
    ready_to_propose: "ready to propose the next case",
    awaiting_measurement: "awaiting the measured value",
    converged: "converged: the model met the error standard",
    failed: "failed: see the session log",
  };
  banner.appendChild(el("strong", {}, `session ${view.id}`));
  banner.appendChild(
    el("span", { class: `status status-${view.status}` }, ` ${label[view.status]}`),
  );
  banner.appendChild(
    el(
      "span",
      { class: "progress" },
      ` | ${view.archive.length} measured, ${view.v} selected, ` +
        `${view.consecutive_passes}/${view.stopping_run_length} clean iterations`,
    ),
  );
  if (view.status === "converged") {
    const button = el("a", {
      "data-role": "export-button",
      class: "export",
      href: exportUrl,
      download: `${view.id}-model.json`,
    }, "download model artifact");
    banner.appendChild(button);
  }
}

function archiveDots(
  svg: SVGElement,
  entries: ArchiveEntry[],
  toPx: (coords: number[]) => [number, number],
): void {
  for (const entry of entries) {
    const [cx, cy] = toPx(entry.coords);
    const dot = svgEl("circle", {
      "data-role": "archive-point",
      "data-provenance": entry.provenance,
      cx: String(cx),
      cy: String(cy),
      r: "4",
      fill: PROVENANCE_COLORS[entry.provenance] ?? "#444",
      stroke: "white",
      "stroke-width": "1",
    });
    svg.appendChild(dot);
  }
}

function pendingMarker(
  svg: SVGElement,
  view: SessionView,
  toPx: (coords: number[]) => [number, number],
): void {
  if (!view.pending) return;
  const [cx, cy] = toPx(view.pending.coords);
  svg.appendChild(
    svgEl("circle", {
      "data-role": "pending-marker",
      cx: String(cx),
      cy: String(cy),
      r: "7",
      fill: "none",
      stroke: "#ff9500",
      "stroke-width": "3",
    }),
  );
}

export function renderSurface(
  root: HTMLElement,
  view: SessionView,
  surface: SurfaceView | null,
  axisX = 0,
  axisY = 1,
): void {
  const host = panel(root, "surface");
  host.dataset.role = "surface-panel";
  if (!surface) {
    host.appendChild(el("p", { class: "placeholder" }, "no surrogate yet"));
    return;
  }
  const svg = svgEl("svg", {
    viewBox: `0 0 ${W} ${H}`,
    width: String(W),
    height: String(H),
    "data-role": "surface-svg",
  });
  host.appendChild(svg as unknown as Node);

  if (surface.kind === "curve") {
    const r = view.domain.ivs[0];
    const xScale = scale(r.low, r.high, PAD, W - PAD);
    const values = surface.predictions.concat(
      surface.archive.filter((a) => a.value !== null).map((a) => a.value as number),
    );
    const { lo, hi } = extent(values);
    const yScale = scale(lo, hi, H - PAD, PAD);

    if (view.feedback) {
      const [band] = feedbackBox([r], view.feedback);
      svg.appendChild(
        svgEl("rect", {
          "data-role": "s2-box",
          x: String(xScale(band.lo)),
          y: String(PAD),
          width: String(xScale(band.hi) - xScale(band.lo)),
          height: String(H - 2 * PAD),
          fill: "rgba(214, 40, 40, 0.12)",
          stroke: "#d62828",
          "stroke-dasharray": "6 3",
        }),
      );
    }
    const path = surface.xs
      .map((x, i) => `${i ? "L" : "M"}${xScale(x)},${yScale(surface.predictions[i])}`)
      .join(" ");
    svg.appendChild(
      svgEl("path", {
        "data-role": "prediction-curve",
        d: path,
        fill: "none",
        stroke: "#333",
        "stroke-width": "2",
      }),
    );
    for (const entry of surface.archive) {
      if (entry.value === null) continue;
      archiveDots(svg, [entry], (c) => [xScale(c[0]), yScale(entry.value as number)]);
    }
    if (view.pending) {
      const px = xScale(view.pending.coords[0]);
      const py = view.pending.predicted === null ? H / 2 : yScale(view.pending.predicted);
      svg.appendChild(
        svgEl("circle", {
          "data-role": "pending-marker",
          cx: String(px),
          cy: String(py),
          r: "7",
          fill: "none",
          stroke: "#ff9500",
          "stroke-width": "3",
        }),
      );
    }
  } else {
    const rx = view.domain.ivs[axisX];
    const ry = view.domain.ivs[axisY];
    const xScale = scale(rx.low, rx.high, PAD, W - PAD);
    const yScale = scale(ry.low, ry.high, H - PAD, PAD);
    const flat = surface.z.flat();
    const { lo, hi } = extent(flat);
    const nx = surface.xs.length;
    const ny = surface.ys.length;
    const cellW = (W - 2 * PAD) / (nx - 1 || 1);
    const cellH = (H - 2 * PAD) / (ny - 1 || 1);
    for (let j = 0; j < ny; j++) {
      for (let i = 0; i < nx; i++) {
        svg.appendChild(
          svgEl("rect", {
            "data-role": "heatmap-cell",
            x: String(xScale(surface.xs[i]) - cellW / 2),
            y: String(yScale(surface.ys[j]) - cellH / 2),
            width: String(cellW + 0.5),
            height: String(cellH + 0.5),
            fill: divergingColor(surface.z[j][i], lo, hi),
          }),
        );
      }
    }
    if (view.feedback) {
      const box = feedbackBox(view.domain.ivs, view.feedback);
      const bx = box[axisX];
      const by = box[axisY];
      svg.appendChild(
        svgEl("rect", {
          "data-role": "s2-box",
          x: String(xScale(bx.lo)),
          y: String(yScale(by.hi)),
          width: String(xScale(bx.hi) - xScale(bx.lo)),
          height: String(yScale(by.lo) - yScale(by.hi)),
          fill: "none",
          stroke: "#d62828",
          "stroke-width": "2",
          "stroke-dasharray": "6 3",
        }),
      );
    }
    archiveDots(svg, surface.archive, (c) => [xScale(c[axisX]), yScale(c[axisY])]);
    pendingMarker(svg, view, (c) => [xScale(c[axisX]), yScale(c[axisY])]);
  }
}

export function renderProposal(root: HTMLElement, view: SessionView): void {
  const host = panel(root, "proposal");
  host.dataset.role = "proposal-panel";
  if (!view.pending) {
    host.appendChild(
      el("p", { class: "placeholder" },
         view.status === "ready_to_propose"
           ? "no pending case; propose the next one"
           : "no pending case"),
    );
    return;
  }
  const names = view.domain.ivs.map((r) => r.name);
  const coordText = view.pending.coords
    .map((c, i) => `${names[i]} = ${c.toPrecision(6)}`)
    .join(", ");
  host.appendChild(
    el("p", { "data-role": "proposal-coords" },
       `case #${view.pending.sequence_index} (${view.pending.provenance}): ${coordText}`),
  );
  if (view.pending.predicted !== null) {
    host.appendChild(
      el("p", { "data-role": "proposal-predicted" },
         `predicted ${view.domain.dv_name} = ${view.pending.predicted.toPrecision(6)}`),
    );
  }
  // audit values come verbatim from the service
  host.appendChild(
    el("p", { "data-role": "audit" },
       `spacing: d = ${view.pending.audit.distance} > threshold = ` +
         `${view.pending.audit.threshold}`),
  );
}

export function renderHistory(root: HTMLElement, history: HistoryEntry[]): void {
  const host = panel(root, "history");
  host.dataset.role = "history-panel";
  if (history.length === 0) {
    host.appendChild(el("p", { class: "placeholder" }, "no iterations yet"));
    return;
  }
  const svg = svgEl("svg", {
    viewBox: `0 0 ${W} 160`,
    width: String(W),
    height: "160",
    "data-role": "history-svg",
  });
  const maes = history.map((h) => h.mae);
  const { lo, hi } = extent(maes);
  const xScale = scale(0, Math.max(history.length - 1, 1), PAD, W - PAD);
  const yScale = scale(lo, hi, 140, 12);
  const path = history
    .map((h, i) => `${i ? "L" : "M"}${xScale(i)},${yScale(h.mae)}`)
    .join(" ");
  svg.appendChild(
    svgEl("path", { d: path, fill: "none", stroke: "#1f6fd6", "stroke-width": "2" }),
  );
  history.forEach((h, i) => {
    svg.appendChild(
      svgEl("circle", {
        "data-role": "history-point",
        "data-passed": String(h.passed),
        "data-feedback": String(h.feedback),
        cx: String(xScale(i)),
        cy: String(yScale(h.mae)),
        r: "4",
        fill: h.feedback ? "#d62828" : h.passed ? "#1da153" : "#888",
      }),
    );
  });
  host.appendChild(svg as unknown as Node);
  const last = history[history.length - 1];
  host.appendChild(
    el("p", { "data-role": "history-latest" },
       `latest: MAE ${last.mae.toPrecision(4)}, MAPE ${last.mape.toPrecision(4)}%, ` +
         `R ${last.r.toPrecision(5)}`),
  );
}

export function renderError(root: HTMLElement, message: string | null): void {
  let node = root.querySelector<HTMLElement>("#error-panel");
  if (!node) {
    node = el("div", { id: "error-panel", "data-role": "error-panel" });
    root.prepend(node);
  }
  if (message === null) {
    node.style.display = "none";
    node.replaceChildren();
    return;
  }
  node.style.display = "block";
  node.replaceChildren();
  node.appendChild(el("strong", {}, "problem: "));
  node.appendChild(el("span", {}, message));
  const retry = el("button", { "data-role": "retry-button", type: "button" }, "retry");
  node.appendChild(retry);
}
