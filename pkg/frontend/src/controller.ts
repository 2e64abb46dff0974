/** Dashboard state machine: polls the service, funnels every response
 * through the renderers, and guards against concurrent mutations. The
 * service is the single source of truth; a failed call leaves the last
 * good view on screen and raises the error panel with a retry affordance. */

import { ApiError, AredClient, NetworkError } from "./api.js";
import { parseResultInput } from "./geometry.js";
import {
  renderBanner,
  renderError,
  renderHistory,
  renderProposal,
  renderSurface,
} from "./render.js";
import { HistoryEntry, ParseError, SessionView, SurfaceView } from "./types.js";

export interface DashboardOptions {
  pollIntervalMs?: number;
  surfaceResolution?: number;
}

export class Dashboard {
  view: SessionView | null = null;
  surface: SurfaceView | null = null;
  history: HistoryEntry[] = [];
  busy = false;
  axisX = 0;
  axisY = 1;
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly pollMs: number;
  private readonly resolution: number | undefined;

  constructor(
    public root: HTMLElement,
    public client: AredClient,
    public sessionId: string,
    options: DashboardOptions = {},
  ) {
    this.pollMs = options.pollIntervalMs ?? 1000;
    this.resolution = options.surfaceResolution;
  }

  start(): void {
    void this.refresh();
    this.timer = setInterval(() => {
      if (!this.busy) void this.refresh();
    }, this.pollMs);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  async refresh(): Promise<void> {
    try {
      const view = await this.client.getSession(this.sessionId);
      const history = await this.client.getHistory(this.sessionId);
      let surface: SurfaceView | null = null;
      if (view.has_model) {
        try {
          surface = await this.client.getSurface(
            this.sessionId, this.resolution, this.axisX, this.axisY,
          );
        } catch (err) {
          if (!(err instanceof ApiError && err.status === 409)) throw err;
        }
      }
      this.view = view;
      this.history = history;
      this.surface = surface;
      this.render();
      renderError(this.root, null);
    } catch (err) {
      this.showError(err);
    }
  }

  render(): void {
    if (!this.view) return;
    renderBanner(this.root, this.view, this.client.exportUrl(this.sessionId));
    renderSurface(this.root, this.view, this.surface, this.axisX, this.axisY);
    renderProposal(this.root, this.view);
    renderHistory(this.root, this.history);
  }

  /** Ask the service for the next condition. */
  async propose(): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      this.view = await this.client.propose(this.sessionId);
      await this.refresh();
    } catch (err) {
      this.showError(err);
    } finally {
      this.busy = false;
    }
  }

  /** Validate and submit the measured value; returns false when the input
   * fails inline validation (no request is sent). */
  async submitResult(text: string): Promise<boolean> {
    const value = parseResultInput(text);
    if (value === null) return false;
    if (this.busy) return true;
    this.busy = true;
    try {
      this.view = await this.client.submitResult(this.sessionId, value);
      await this.refresh();
    } catch (err) {
      this.showError(err);
    } finally {
      this.busy = false;
    }
    return true;
  }

  setAxes(x: number, y: number): void {
    this.axisX = x;
    this.axisY = y;
    void this.refresh();
  }

  private showError(err: unknown): void {
    let message: string;
    if (err instanceof ApiError) {
      message = `${err.errorName} (HTTP ${err.status}): ${err.message}`;
    } else if (err instanceof NetworkError) {
      message = `${err.message}; the last good state is still shown`;
    } else if (err instanceof ParseError) {
      message = `malformed service response: ${err.message}`;
    } else {
      message = String(err);
    }
    renderError(this.root, message);
  }
}
