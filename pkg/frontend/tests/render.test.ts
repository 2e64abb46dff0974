// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import {
  renderBanner,
  renderError,
  renderHistory,
  renderProposal,
  renderSurface,
} from "../src/render.js";
import { HistoryEntry, SessionView, SurfaceView } from "../src/types.js";

function baseView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    id: "s1",
    status: "ready_to_propose",
    domain: { ivs: [{ name: "x", low: 0, high: 1 }], dv_name: "y" },
    archive: [
      { coords: [0], value: 0.1, provenance: "initial", sequence_index: 0 },
      { coords: [1], value: 0.9, provenance: "initial", sequence_index: 1 },
    ],
    v: 0,
    consecutive_passes: 0,
    stopping_run_length: 3,
    pending: null,
    feedback: null,
    iterations: 0,
    has_model: true,
    ...overrides,
  };
}

function curveSurface(): SurfaceView {
  return {
    kind: "curve",
    xs: [0, 0.5, 1],
    predictions: [0.1, 0.5, 0.9],
    archive: baseView().archive,
  };
}

let root: HTMLElement;
beforeEach(() => {
  document.body.innerHTML = "<div id='root'></div>";
  root = document.getElementById("root") as HTMLElement;
});

describe("renderBanner", () => {
  it("shows progress and no export button before convergence", () => {
    renderBanner(root, baseView(), "/export");
    const banner = root.querySelector("[data-role=status-banner]")!;
    expect(banner.textContent).toContain("2 measured");
    expect(root.querySelector("[data-role=export-button]")).toBeNull();
  });

  it("converged session gets a banner with an export button", () => {
    renderBanner(root, baseView({ status: "converged" }), "/sessions/s1/export");
    const button = root.querySelector<HTMLAnchorElement>("[data-role=export-button]");
    expect(button).not.toBeNull();
    expect(button!.getAttribute("href")).toBe("/sessions/s1/export");
  });
});

describe("renderSurface", () => {
  it("renders a prediction curve with archive points for one iv", () => {
    renderSurface(root, baseView(), curveSurface());
    expect(root.querySelector("[data-role=prediction-curve]")).not.toBeNull();
    expect(root.querySelectorAll("[data-role=archive-point]")).toHaveLength(2);
  });

  it("draws the feedback band spanning 40% of the axis", () => {
    const view = baseView({
      feedback: { coords: [0.5], triggering_ape: 22, sigma_fraction: 0.1 },
    });
    renderSurface(root, view, curveSurface());
    const box = root.querySelector("[data-role=s2-box]")!;
    expect(box).not.toBeNull();
    const width = Number(box.getAttribute("width"));
    // plot area is 640 - 2*40 px wide; 40% of it
    expect(width).toBeCloseTo(0.4 * (640 - 80), 6);
  });

  it("clips the feedback band at the domain edge", () => {
    const view = baseView({
      feedback: { coords: [0.05], triggering_ape: 22, sigma_fraction: 0.1 },
    });
    renderSurface(root, view, curveSurface());
    const box = root.querySelector("[data-role=s2-box]")!;
    const width = Number(box.getAttribute("width"));
    expect(width).toBeCloseTo(0.25 * (640 - 80), 6);
  });

  it("renders a heatmap with an s2 rectangle for two ivs", () => {
    const view = baseView({
      domain: {
        ivs: [
          { name: "x", low: -3, high: 3 },
          { name: "y", low: -3, high: 3 },
        ],
        dv_name: "z",
      },
      archive: [
        { coords: [-3, -3], value: 0, provenance: "initial", sequence_index: 0 },
        { coords: [3, 3], value: 0, provenance: "initial", sequence_index: 1 },
      ],
      feedback: { coords: [0, 0], triggering_ape: 30, sigma_fraction: 0.1 },
      pending: {
        coords: [1, 1],
        provenance: "feedback",
        sequence_index: 2,
        predicted: 4.2,
        audit: { distance: 0.4, threshold: 0.2 },
      },
    });
    const surface: SurfaceView = {
      kind: "grid",
      xs: [-3, 0, 3],
      ys: [-3, 0, 3],
      z: [
        [0, 1, 0],
        [1, 2, 1],
        [0, 1, 0],
      ],
      archive: view.archive,
    };
    renderSurface(root, view, surface);
    expect(root.querySelectorAll("[data-role=heatmap-cell]")).toHaveLength(9);
    const box = root.querySelector("[data-role=s2-box]")!;
    expect(box).not.toBeNull();
    // 40% of each axis: the plot spans 560x320 px
    expect(Number(box.getAttribute("width"))).toBeCloseTo(0.4 * 560, 6);
    expect(Number(box.getAttribute("height"))).toBeCloseTo(0.4 * 320, 6);
    expect(root.querySelector("[data-role=pending-marker]")).not.toBeNull();
  });

  it("placeholder without a surface", () => {
    renderSurface(root, baseView({ has_model: false }), null);
    expect(root.querySelector("#surface")!.textContent).toContain("no surrogate yet");
  });
});

describe("renderProposal", () => {
  it("shows coords, prediction, and the audit verbatim", () => {
    const view = baseView({
      status: "awaiting_measurement",
      pending: {
        coords: [0.123456789],
        provenance: "drawn",
        sequence_index: 2,
        predicted: 0.42,
        audit: { distance: 0.3954752883185553, threshold: 0.1 },
      },
    });
    renderProposal(root, view);
    const audit = root.querySelector("[data-role=audit]")!;
    // values are displayed exactly as the service reported them
    expect(audit.textContent).toContain("0.3954752883185553");
    expect(audit.textContent).toContain("0.1");
    expect(root.querySelector("[data-role=proposal-coords]")!.textContent)
      .toContain("case #2 (drawn)");
    expect(root.querySelector("[data-role=proposal-predicted]")!.textContent)
      .toContain("0.420000");
  });
});

describe("renderHistory", () => {
  const entry = (mae: number, passed: boolean, feedback: boolean): HistoryEntry => ({
    archive_size: 3,
    mae,
    mape: 5,
    r: 0.99,
    eligible: true,
    passed,
    feedback,
  });

  it("draws one point per iteration", () => {
    renderHistory(root, [entry(0.5, false, true), entry(0.2, true, false)]);
    const points = root.querySelectorAll("[data-role=history-point]");
    expect(points).toHaveLength(2);
    expect(points[0].getAttribute("data-feedback")).toBe("true");
    expect(points[1].getAttribute("data-passed")).toBe("true");
  });

  it("gains a point when history grows", () => {
    renderHistory(root, [entry(0.5, false, false)]);
    expect(root.querySelectorAll("[data-role=history-point]")).toHaveLength(1);
    renderHistory(root, [entry(0.5, false, false), entry(0.3, true, false)]);
    expect(root.querySelectorAll("[data-role=history-point]")).toHaveLength(2);
  });
});

describe("renderError", () => {
  it("shows a retry affordance and clears cleanly", () => {
    renderError(root, "service unreachable");
    const panel = root.querySelector<HTMLElement>("[data-role=error-panel]")!;
    expect(panel.style.display).toBe("block");
    expect(panel.textContent).toContain("service unreachable");
    expect(panel.querySelector("[data-role=retry-button]")).not.toBeNull();
    renderError(root, null);
    expect(panel.style.display).toBe("none");
  });

  it("does not wipe other panels", () => {
    renderBanner(root, baseView(), "/e");
    renderError(root, "oops");
    expect(root.querySelector("[data-role=status-banner]")).not.toBeNull();
  });
});
