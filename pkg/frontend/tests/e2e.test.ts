// @vitest-environment jsdom
/**
 * Round-trip against a live service: spawns `ared serve`, drives the real
 * dashboard code (client + state machine + renderers) against it, and
 * checks the rendered DOM after every step.
 */
import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AredClient } from "../src/api.js";
import { Dashboard } from "../src/controller.js";
import { feedbackInterval } from "../src/geometry.js";

const PORT = 8907;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForService(timeoutMs = 90_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastErr: unknown = null;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/sessions`);
      if (resp.ok) return;
    } catch (err) {
      lastErr = err;
    }
    await new Promise((r) => setTimeout(r, 500));
  }
  throw new Error(`service did not come up: ${String(lastErr)}`);
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "ared-e2e-"));
  server = spawn("ared", ["serve", "--bind", `127.0.0.1:${PORT}`, "--data", dataDir], {
    stdio: "ignore",
  });
  await waitForService();
});

afterAll(() => {
  server?.kill("SIGTERM");
});

function freshRoot(): HTMLElement {
  document.body.innerHTML = "<div id='root'></div>";
  return document.getElementById("root") as HTMLElement;
}

describe("dashboard round-trip against the live service", () => {
  it("create -> proposal -> submit -> history grows and the next proposal appears", async () => {
    const client = new AredClient(BASE);
    const id = await client.createSession({
      domain: { ivs: [{ name: "x", low: 0, high: 1 }], dv_name: "y" },
      initial_samples: [
        { coords: [0], value: 0.1 },
        { coords: [1], value: 0.9 },
      ],
      rng_seed: 21,
    });

    const root = freshRoot();
    const dash = new Dashboard(root, client, id, { surfaceResolution: 21 });
    await dash.refresh();

    expect(root.querySelector("[data-role=status-banner]")!.textContent).toContain(id);
    expect(root.querySelectorAll("[data-role=history-point]")).toHaveLength(0);
    expect(root.querySelector("[data-role=prediction-curve]")).not.toBeNull();

    await dash.propose();
    const audit = root.querySelector("[data-role=audit]");
    expect(audit).not.toBeNull();
    expect(audit!.textContent).toContain("spacing: d = ");
    const coordsText = root.querySelector("[data-role=proposal-coords]")!.textContent!;
    expect(coordsText).toContain("case #2 (drawn)");

    await dash.submitResult("0.55");
    expect(root.querySelectorAll("[data-role=history-point]")).toHaveLength(1);
    expect(dash.view!.status).toBe("ready_to_propose");

    await dash.propose();
    expect(root.querySelector("[data-role=proposal-coords]")!.textContent)
      .toContain("case #3");
    expect(root.querySelectorAll("[data-role=history-point]")).toHaveLength(1);
  });

  it("invalid input never reaches the service", async () => {
    const client = new AredClient(BASE);
    const id = await client.createSession({
      domain: { ivs: [{ name: "x", low: 0, high: 1 }], dv_name: "y" },
      initial_samples: [
        { coords: [0], value: 0.0 },
        { coords: [1], value: 1.0 },
      ],
      rng_seed: 5,
    });
    const root = freshRoot();
    const dash = new Dashboard(root, client, id);
    await dash.refresh();
    const accepted = await dash.submitResult("not-a-number");
    expect(accepted).toBe(false); // inline validation, no request sent
    // the state is untouched: still no pending case, submitting a number
    // in the wrong state surfaces a 409 without corrupting the view
    const ok = await dash.submitResult("1.5");
    expect(ok).toBe(true);
    const panel = root.querySelector<HTMLElement>("[data-role=error-panel]")!;
    expect(panel.textContent).toContain("WrongState");
    expect(root.querySelector("[data-role=status-banner]")).not.toBeNull();
  });

  it("feedback-active state draws the S2 box at 40% of the axis", async () => {
    const client = new AredClient(BASE);
    // ultra-sensitive trigger: any case with any nonzero residual qualifies
    const id = await client.createSession({
      domain: { ivs: [{ name: "x", low: 0, high: 1 }], dv_name: "y" },
      initial_samples: [
        { coords: [0], value: 0.0 },
        { coords: [1], value: 1.0 },
      ],
      rng_seed: 33,
      overrides: {
        feedback_policy: {
          dimension: 2,
          ape_threshold: 1e-9,
          range_fraction: 1e-6,
        },
      },
    });
    const root = freshRoot();
    const dash = new Dashboard(root, client, id, { surfaceResolution: 21 });

    // wild measured values force large residuals; after the archive passes
    // the eligibility gate the worst case becomes the feedback center
    const wild = [5.0, -3.0, 8.0, -6.0, 9.0, -9.0, 7.0, -7.0];
    for (const value of wild) {
      await dash.propose();
      await dash.submitResult(String(value));
      if (dash.view!.feedback) break;
    }
    expect(dash.view!.feedback).not.toBeNull();

    await dash.refresh();
    const box = root.querySelector("[data-role=s2-box]");
    expect(box).not.toBeNull();

    const center = dash.view!.feedback!.coords[0];
    const band = feedbackInterval({ name: "x", low: 0, high: 1 }, center, 0.1);
    const plotWidth = 640 - 80;
    const expectedPx = (band.hi - band.lo) * plotWidth;
    expect(Number(box!.getAttribute("width"))).toBeCloseTo(expectedPx, 6);
    // the box spans 40% of the axis (unless the center sits within 0.2 of
    // an edge, where it clips; this seed keeps it interior)
    if (center >= 0.2 && center <= 0.8) {
      expect(Number(box!.getAttribute("width"))).toBeCloseTo(0.4 * plotWidth, 6);
    }
  });
});
