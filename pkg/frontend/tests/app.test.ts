import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { App } from "../src/app.js";
import { createApp } from "../src/app.js";
import { jsonResponse, makeView } from "./fixtures.js";

let fetchMock: ReturnType<typeof vi.fn>;
let root: HTMLElement;
let app: App | null = null;

beforeEach(() => {
  fetchMock = vi.fn();
  vi.stubGlobal("fetch", fetchMock);
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  window.location.hash = "";
});

afterEach(() => {
  app?.dispose();
  app = null;
  vi.unstubAllGlobals();
});

function boot(): App {
  app = createApp(root, "http://api.test");
  return app;
}

function requestAt(i: number): { url: string; method: string; body: unknown } {
  const call = fetchMock.mock.calls[i];
  expect(call, `request #${i}`).toBeDefined();
  const init = (call![1] ?? {}) as RequestInit;
  return {
    url: call![0] as string,
    method: init.method ?? "GET",
    body: init.body ? JSON.parse(init.body as string) : null,
  };
}

function click(selector: string): void {
  const btn = root.querySelector<HTMLButtonElement>(selector);
  expect(btn, selector).not.toBeNull();
  btn!.click();
}

describe("session lifecycle", () => {
  it("boots to the start screen and creates a session", async () => {
    const a = boot();
    await a.idle();
    expect(root.querySelector("#start-card")).not.toBeNull();
    expect(fetchMock).not.toHaveBeenCalled();

    fetchMock.mockResolvedValueOnce(jsonResponse(makeView()));
    click('[data-action="new-session"]');
    await a.idle();

    expect(fetchMock).toHaveBeenCalledTimes(1);
    const req = requestAt(0);
    expect(req.url).toBe("http://api.test/v1/sessions");
    expect(req.method).toBe("POST");
    expect(req.body).toEqual({ epsilon_floor: false });
    expect(root.querySelector("#state-chip")?.textContent).toBe("awaiting_trust");
    expect(window.location.hash).toBe("#/session/s-1");
  });

  it("passes the epsilon floor option through", async () => {
    const a = boot();
    await a.idle();
    const box = root.querySelector<HTMLInputElement>("#epsilon-floor");
    box!.checked = true;
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView()));
    click('[data-action="new-session"]');
    await a.idle();
    expect(requestAt(0).body).toEqual({ epsilon_floor: true });
  });

  it("walks a full round and submits the reordered ranking", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView()));
    click('[data-action="new-session"]');
    await a.idle();

    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_counter" })));
    click('[data-action="trust"][data-label="probable"]');
    await a.idle();
    expect(requestAt(1).url).toBe("http://api.test/v1/sessions/s-1/trust");
    expect(requestAt(1).body).toEqual({ level_label: "probable" });

    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_ranking" })));
    click('[data-action="counter"][data-index="1"]');
    await a.idle();
    expect(requestAt(2).url).toBe("http://api.test/v1/sessions/s-1/counter");
    expect(requestAt(2).body).toEqual({ pool_index: 1 });

    click('[data-action="rank-down"][data-pos="0"]');
    expect(fetchMock).toHaveBeenCalledTimes(3);
    const texts = Array.from(root.querySelectorAll(".rank-text")).map(
      (el) => el.textContent,
    );
    expect(texts[0]).toBe("stable & !fast");
    expect(texts[1]).toBe("stable & fast");

    fetchMock.mockResolvedValueOnce(
      jsonResponse(
        makeView({
          state: "between_rounds",
          rounds_completed: 1,
          round: 2,
          rankings: [[1, 0, 2, 3]],
          rhos: [0.8],
        }),
      ),
    );
    click('[data-action="rank-submit"]');
    await a.idle();
    expect(requestAt(3).url).toBe("http://api.test/v1/sessions/s-1/ranking");
    expect(requestAt(3).body).toEqual({ ranking: [1, 0, 2, 3] });

    const trustBtn = root.querySelector<HTMLButtonElement>('[data-action="trust"]');
    expect(trustBtn?.disabled).toBe(false);
    expect(root.querySelector("#rho-panel")?.textContent).toContain("0.8000");
  });

  it("skips the counterargument with an explicit null", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_counter" })));
    click('[data-action="new-session"]');
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_ranking" })));
    click('[data-action="counter-skip"]');
    await a.idle();
    expect(requestAt(1).body).toEqual({ pool_index: null });
  });

  it("starts a fresh session from the ended screen", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(makeView({ state: "ended", end_reason: "user_end" })),
    );
    click('[data-action="new-session"]');
    await a.idle();
    expect(root.querySelector("#ended-card")).not.toBeNull();

    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ id: "s-2" })));
    click('#ended-card [data-action="new-session"]');
    await a.idle();
    expect(fetchMock).toHaveBeenCalledTimes(2);
    expect(window.location.hash).toBe("#/session/s-2");
  });
});

describe("gating at the dispatcher", () => {
  it("refuses to send an action the state forbids even if the DOM is tampered with", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_counter" })));
    click('[data-action="new-session"]');
    await a.idle();

    const trustBtn = root.querySelector<HTMLButtonElement>('[data-action="trust"]');
    expect(trustBtn?.disabled).toBe(true);
    trustBtn!.removeAttribute("disabled");
    trustBtn!.click();
    await a.idle();

    expect(fetchMock).toHaveBeenCalledTimes(1);
    expect(root.querySelector("#banner-message")?.textContent).toContain(
      'not available in state "awaiting_counter"',
    );
  });

  it("blocks an incomplete ranking client-side without sending a request", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_ranking" })));
    click('[data-action="new-session"]');
    await a.idle();

    (a as unknown as { order: number[] }).order = [0, 1];
    click('[data-action="rank-submit"]');
    await a.idle();

    expect(fetchMock).toHaveBeenCalledTimes(1);
    expect(root.querySelector("#banner-message")?.textContent).toContain(
      "every perspective exactly once",
    );
  });

  it("validates the raw tau locally before any request", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView()));
    click('[data-action="new-session"]');
    await a.idle();

    click('[data-action="tau-submit"]');
    await a.idle();
    expect(fetchMock).toHaveBeenCalledTimes(1);
    expect(root.querySelector("#banner-message")?.textContent).toContain(
      "between 0 and 1",
    );

    root.querySelector<HTMLInputElement>("#tau-input")!.value = "1.5";
    click('[data-action="tau-submit"]');
    await a.idle();
    expect(fetchMock).toHaveBeenCalledTimes(1);

    root.querySelector<HTMLInputElement>("#tau-input")!.value = "0.35";
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_counter" })));
    click('[data-action="tau-submit"]');
    await a.idle();
    expect(fetchMock).toHaveBeenCalledTimes(2);
    expect(requestAt(1).body).toEqual({ tau: 0.35 });
  });
});

describe("error handling", () => {
  it("shows a retryable banner on a conflict and retries the same request", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView()));
    click('[data-action="new-session"]');
    await a.idle();

    fetchMock.mockResolvedValueOnce(
      jsonResponse(
        {
          detail: {
            error: "out_of_order",
            action: "trust",
            state: "awaiting_counter",
            allowed_states: ["awaiting_trust", "between_rounds"],
          },
        },
        409,
      ),
    );
    click('[data-action="trust"][data-label="certain"]');
    await a.idle();
    expect(root.querySelector("#banner-message")?.textContent).toBe(
      'action "trust" is not allowed in state "awaiting_counter"',
    );
    expect(root.querySelector("#state-chip")?.textContent).toBe("awaiting_trust");

    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ state: "awaiting_counter" })));
    click('[data-action="retry"]');
    await a.idle();
    expect(fetchMock).toHaveBeenCalledTimes(3);
    expect(requestAt(2).url).toBe(requestAt(1).url);
    expect(requestAt(2).body).toEqual(requestAt(1).body);
    expect(root.querySelector("#state-chip")?.textContent).toBe("awaiting_counter");
  });

  it("reports network failures and clears the banner on dismiss", async () => {
    const a = boot();
    await a.idle();
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView()));
    click('[data-action="new-session"]');
    await a.idle();

    fetchMock.mockRejectedValueOnce(new TypeError("socket hang up"));
    click('[data-action="end"]');
    await a.idle();
    expect(root.querySelector("#banner-message")?.textContent).toContain(
      "cannot reach the server",
    );
    expect(root.querySelector("#state-chip")?.textContent).toBe("awaiting_trust");

    click('[data-action="dismiss-banner"]');
    expect(root.querySelector("#banner-message")).toBeNull();
  });
});

describe("refresh safety", () => {
  it("restores the session named in the hash on boot", async () => {
    window.location.hash = "#/session/zz9";
    fetchMock.mockResolvedValueOnce(
      jsonResponse(makeView({ id: "zz9", state: "between_rounds", rounds_completed: 1 })),
    );
    const a = boot();
    await a.idle();
    expect(requestAt(0).url).toBe("http://api.test/v1/sessions/zz9");
    expect(requestAt(0).method).toBe("GET");
    expect(root.querySelector("#state-chip")?.textContent).toBe("between_rounds");
  });

  it("follows hash changes to a different session", async () => {
    window.location.hash = "#/session/one";
    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ id: "one" })));
    const a = boot();
    await a.idle();

    fetchMock.mockResolvedValueOnce(jsonResponse(makeView({ id: "two", state: "ended" })));
    window.location.hash = "#/session/two";
    window.dispatchEvent(new Event("hashchange"));
    await a.idle();
    expect(requestAt(1).url).toBe("http://api.test/v1/sessions/two");
    expect(root.querySelector("#ended-card")).not.toBeNull();
  });
});
