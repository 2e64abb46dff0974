/** Page bootstrap: session picker, propose/submit wiring, axis-pair
 * dropdown for three-plus-variable sessions. */

import { AredClient } from "./api.js";
import { Dashboard } from "./controller.js";
import { renderError } from "./render.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function setupAxisSelector(
  container: HTMLElement,
  dashboard: Dashboard,
  ivNames: string[],
): void {
  container.replaceChildren();
  if (ivNames.length <= 2) return;
  const select = document.createElement("select");
  select.dataset.role = "axis-select";
  for (let x = 0; x < ivNames.length; x++) {
    for (let y = 0; y < ivNames.length; y++) {
      if (x === y) continue;
      const opt = document.createElement("option");
      opt.value = `${x},${y}`;
      opt.textContent = `${ivNames[x]} vs ${ivNames[y]}`;
      select.appendChild(opt);
    }
  }
  select.addEventListener("change", () => {
    const [x, y] = select.value.split(",").map(Number);
    dashboard.setAxes(x, y);
  });
  container.appendChild(document.createTextNode("slice axes: "));
  container.appendChild(select);
}

async function openSession(client: AredClient, id: string): Promise<void> {
  const root = byId<HTMLDivElement>("dashboard");
  root.replaceChildren();
  const dashboard = new Dashboard(root, client, id);
  (window as unknown as { dashboard: Dashboard }).dashboard = dashboard;

  const view = await client.getSession(id);
  setupAxisSelector(byId("axis-controls"), dashboard, view.domain.ivs.map((r) => r.name));
  dashboard.start();

  byId<HTMLButtonElement>("propose-button").onclick = () => {
    void dashboard.propose();
  };
  const form = byId<HTMLFormElement>("result-form");
  const input = byId<HTMLInputElement>("result-input");
  const validation = byId<HTMLSpanElement>("result-validation");
  form.onsubmit = (ev) => {
    ev.preventDefault();
    const submit = byId<HTMLButtonElement>("result-submit");
    submit.disabled = true;
    void dashboard
      .submitResult(input.value)
      .then((accepted) => {
        validation.textContent = accepted ? "" : "enter a finite number";
        if (accepted) input.value = "";
      })
      .finally(() => {
        submit.disabled = false;
      });
  };
}

async function boot(): Promise<void> {
  const client = new AredClient("");
  const params = new URLSearchParams(window.location.search);
  const picker = byId<HTMLSelectElement>("session-picker");

  async function refreshPicker(): Promise<void> {
    const ids = await client.listSessions();
    picker.replaceChildren();
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = ids.length ? "pick a session" : "no sessions yet";
    picker.appendChild(blank);
    for (const id of ids) {
      const opt = document.createElement("option");
      opt.value = id;
      opt.textContent = id;
      picker.appendChild(opt);
    }
  }

  picker.onchange = () => {
    if (picker.value) {
      const url = new URL(window.location.href);
      url.searchParams.set("session", picker.value);
      window.location.href = url.toString();
    }
  };

  byId<HTMLFormElement>("new-session-form").onsubmit = (ev) => {
    ev.preventDefault();
    const textarea = byId<HTMLTextAreaElement>("new-session-spec");
    void (async () => {
      try {
        const spec = JSON.parse(textarea.value);
        const id = await client.createSession(spec);
        const url = new URL(window.location.href);
        url.searchParams.set("session", id);
        window.location.href = url.toString();
      } catch (err) {
        renderError(byId("dashboard"), `cannot create session: ${String(err)}`);
      }
    })();
  };

  try {
    await refreshPicker();
  } catch (err) {
    renderError(byId("dashboard"), `cannot reach the service: ${String(err)}`);
  }

  const sessionId = params.get("session");
  if (sessionId) {
    picker.value = sessionId;
    try {
      await openSession(client, sessionId);
    } catch (err) {
      renderError(byId("dashboard"), `cannot open ${sessionId}: ${String(err)}`);
    }
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined"
    && document.getElementById("dashboard")) {
  void boot();
}
