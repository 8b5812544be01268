/** Application controller: owns the state, delegates clicks, talks to
 * the API client, and re-renders from server responses only.
 *
 * There is no optimistic UI. While a request is in flight everything
 * is disabled, and every action is checked against the gating table a
 * second time before a request is issued, so an illegal action never
 * leaves the app.
 */

import { ApiClient, ApiError } from "./api.js";
import { isLegal, type ActionKind } from "./gating.js";
import { initialOrder, isPermutation, moveItem } from "./ranking.js";
import { renderApp, renderStart } from "./render.js";
import type { Banner, SessionView } from "./types.js";

function messageOf(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}

function parseHash(hash: string): string | null {
  const m = /^#\/session\/(.+)$/.exec(hash);
  return m ? decodeURIComponent(m[1] as string) : null;
}

export class App {
  private view: SessionView | null = null;
  private order: number[] = [];
  private busy = false;
  private banner: Banner | null = null;
  private lastAction: (() => Promise<SessionView>) | null = null;
  private pending: Promise<void> | null = null;
  private readonly onClickBound: (ev: Event) => void;
  private readonly onHashBound: () => void;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.onClickBound = (ev) => this.onClick(ev);
    this.onHashBound = () => this.onHashChange();
    root.addEventListener("click", this.onClickBound);
    window.addEventListener("hashchange", this.onHashBound);
  }

  /** Boot: restore the session named in the URL hash, if any. */
  start(): void {
    const id = parseHash(window.location.hash);
    if (id) {
      void this.run(() => this.api.getSession(id));
    } else {
      this.render();
    }
  }

  dispose(): void {
    this.root.removeEventListener("click", this.onClickBound);
    window.removeEventListener("hashchange", this.onHashBound);
  }

  /** Resolve once no request is in flight. Test helper. */
  async idle(): Promise<void> {
    while (this.pending) {
      const p = this.pending;
      await p;
      if (this.pending === p) this.pending = null;
    }
  }

  currentView(): SessionView | null {
    return this.view;
  }

  private onHashChange(): void {
    const id = parseHash(window.location.hash);
    if (!id) {
      if (this.view) {
        this.view = null;
        this.banner = null;
        this.render();
      }
      return;
    }
    if (this.view && this.view.id === id) return;
    void this.run(() => this.api.getSession(id));
  }

  private onClick(ev: Event): void {
    const target = ev.target as Element | null;
    const el = target?.closest?.("[data-action]") as HTMLButtonElement | null;
    if (!el) return;
    if (el.disabled) return;
    void this.dispatch(el.dataset.action ?? "", el);
  }

  /** Second gating check, independent of the rendered disabled flags. */
  private guard(kind: ActionKind): boolean {
    if (this.view && isLegal(this.view.state, kind)) return true;
    this.banner = {
      message: `that action is not available in state "${this.view?.state ?? "none"}"`,
      retryable: false,
    };
    this.render();
    return false;
  }

  private complain(message: string): void {
    this.banner = { message, retryable: false };
    this.render();
  }

  private async dispatch(action: string, el: HTMLButtonElement): Promise<void> {
    if (this.busy && action !== "dismiss-banner") return;
    switch (action) {
      case "new-session": {
        if (this.view && this.view.state !== "ended") {
          this.complain("end the current dialogue before starting a new one");
          return;
        }
        const box = this.root.querySelector<HTMLInputElement>("#epsilon-floor");
        const eps = box?.checked ?? false;
        await this.run(() => this.api.createSession({ epsilon_floor: eps }));
        return;
      }
      case "trust": {
        if (!this.guard("trust")) return;
        const label = el.dataset.label ?? "";
        const id = this.view!.id;
        await this.run(() => this.api.submitTrust(id, { level_label: label }));
        return;
      }
      case "tau-submit": {
        if (!this.guard("trust")) return;
        const input = this.root.querySelector<HTMLInputElement>("#tau-input");
        const raw = input ? input.value.trim() : "";
        const tau = Number(raw);
        if (raw === "" || !Number.isFinite(tau) || tau < 0 || tau > 1) {
          this.complain("enter a trust value between 0 and 1");
          return;
        }
        const id = this.view!.id;
        await this.run(() => this.api.submitTrust(id, { tau }));
        return;
      }
      case "counter": {
        if (!this.guard("counter")) return;
        const index = Number(el.dataset.index);
        const id = this.view!.id;
        await this.run(() => this.api.submitCounter(id, index));
        return;
      }
      case "counter-skip": {
        if (!this.guard("counter")) return;
        const id = this.view!.id;
        await this.run(() => this.api.submitCounter(id, null));
        return;
      }
      case "rank-up":
      case "rank-down": {
        if (!this.guard("ranking")) return;
        const pos = Number(el.dataset.pos);
        const to = action === "rank-up" ? pos - 1 : pos + 1;
        this.order = moveItem(this.order, pos, to);
        this.render();
        return;
      }
      case "rank-submit": {
        if (!this.guard("ranking")) return;
        const count = this.view!.perspectives.length;
        if (!isPermutation(this.order, count)) {
          this.complain("ranking must order every perspective exactly once");
          return;
        }
        const id = this.view!.id;
        const ranking = this.order.slice();
        await this.run(() => this.api.submitRanking(id, ranking));
        return;
      }
      case "end": {
        if (!this.guard("end")) return;
        const id = this.view!.id;
        await this.run(() => this.api.endSession(id));
        return;
      }
      case "retry": {
        if (this.lastAction) await this.run(this.lastAction);
        return;
      }
      case "dismiss-banner": {
        this.banner = null;
        this.render();
        return;
      }
      default:
        return;
    }
  }

  private run(fn: () => Promise<SessionView>): Promise<void> {
    if (this.busy) return Promise.resolve();
    this.lastAction = fn;
    this.busy = true;
    this.banner = null;
    this.render();
    const p = (async () => {
      try {
        this.adopt(await fn());
      } catch (err) {
        this.banner = { message: messageOf(err), retryable: true };
      } finally {
        this.busy = false;
        this.render();
      }
    })();
    this.pending = p;
    return p;
  }

  private adopt(view: SessionView): void {
    const entering =
      view.state === "awaiting_ranking" &&
      (this.view === null ||
        this.view.id !== view.id ||
        this.view.state !== "awaiting_ranking");
    this.view = view;
    if (entering || this.order.length !== view.perspectives.length) {
      this.order = initialOrder(view.perspectives.length);
    }
    const hash = `#/session/${encodeURIComponent(view.id)}`;
    if (window.location.hash !== hash) {
      window.location.hash = hash;
    }
  }

  private render(): void {
    this.root.innerHTML = this.view
      ? renderApp(this.view, this.order, this.busy, this.banner)
      : renderStart(this.busy, this.banner);
  }
}

export function createApp(root: HTMLElement, baseUrl = ""): App {
  const app = new App(root, new ApiClient(baseUrl));
  app.start();
  return app;
}
