/** HTML renderers: pure functions from view state to markup strings.
 *
 * Every control carries a data-action attribute for event delegation
 * and is disabled unless the gating table allows it in the current
 * state (and nothing is in flight; there is no optimistic UI).
 */

import { controlsFor } from "./gating.js";
import type {
  Banner,
  CounterOption,
  RenderedArgument,
  SessionView,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function escapeAttr(text: string): string {
  return escapeHtml(text);
}

export function formatPercent(p: number): string {
  return `${(p * 100).toFixed(1)}%`;
}

function disabledAttr(enabled: boolean): string {
  return enabled ? "" : " disabled";
}

function renderArgument(a: RenderedArgument): string {
  const premises = a.premises.map((p) => `<li>${escapeHtml(p)}</li>`).join("");
  return `<ul class="premises">${premises}</ul>
    <div class="claim">therefore <strong>${escapeHtml(a.claim)}</strong></div>`;
}

function renderAgentCard(view: SessionView): string {
  if (!view.agent_argument) {
    return `<section class="card" id="agent-card"><h2>Agent argument</h2>
      <p class="muted">No argument to show.</p></section>`;
  }
  return `<section class="card" id="agent-card">
    <h2>Agent argument</h2>
    ${renderArgument(view.agent_argument)}
  </section>`;
}

function renderTrustPanel(view: SessionView, enabled: boolean): string {
  const buttons = view.trust_levels
    .map(
      ([label, tau]) =>
        `<button class="trust-btn" data-action="trust" data-label="${escapeAttr(label)}"${disabledAttr(enabled)}>
          ${escapeHtml(label)} <span class="muted">(&tau; = ${tau})</span>
        </button>`,
    )
    .join("");
  return `<section class="card${enabled ? "" : " inactive"}" id="trust-panel">
    <h2>Your trust in this argument</h2>
    <div class="btn-column">${buttons}</div>
    <div class="tau-row">
      <label for="tau-input" class="muted">raw &tau;</label>
      <input type="number" id="tau-input" min="0" max="1" step="0.01"${disabledAttr(enabled)}>
      <button data-action="tau-submit"${disabledAttr(enabled)}>use value</button>
    </div>
  </section>`;
}

function renderCounterOption(option: CounterOption, enabled: boolean): string {
  const premises = option.premises.map(escapeHtml).join(", ");
  return `<button class="counter-btn" data-action="counter" data-index="${option.index}"${disabledAttr(enabled)}>
    <span class="cue">${escapeHtml(option.cue)}</span>
    <span>{${premises}} &#8658; ${escapeHtml(option.claim)}</span>
    <span class="muted">certainty ${option.certainty}</span>
  </button>`;
}

function renderCounterPanel(view: SessionView, enabled: boolean): string {
  const options = view.counter_options
    .map((o) => renderCounterOption(o, enabled))
    .join("");
  return `<section class="card${enabled ? "" : " inactive"}" id="counter-panel">
    <h2>Counterargument</h2>
    <div class="btn-column">${options}</div>
    <button data-action="counter-skip"${disabledAttr(enabled)}>continue without a counterargument</button>
  </section>`;
}

function renderRankingPanel(
  view: SessionView,
  order: number[],
  enabled: boolean,
): string {
  const rows = order
    .map((perspectiveIndex, pos) => {
      const text = view.perspectives[perspectiveIndex] ?? `#${perspectiveIndex}`;
      return `<li class="rank-row">
        <span class="rank-pos">${pos + 1}.</span>
        <span class="rank-text">${escapeHtml(text)}</span>
        <button data-action="rank-up" data-pos="${pos}" aria-label="move up"${disabledAttr(enabled && pos > 0)}>&#9650;</button>
        <button data-action="rank-down" data-pos="${pos}" aria-label="move down"${disabledAttr(enabled && pos < order.length - 1)}>&#9660;</button>
      </li>`;
    })
    .join("");
  return `<section class="card${enabled ? "" : " inactive"}" id="ranking-panel">
    <h2>Rank the perspectives (most likely first)</h2>
    <ol class="rank-list">${rows}</ol>
    <button data-action="rank-submit"${disabledAttr(enabled)}>submit ranking</button>
  </section>`;
}

function renderBars(labels: string[], values: number[], kind: string): string {
  return labels
    .map((label, i) => {
      const v = values[i] ?? 0;
      const pct = Math.max(0, Math.min(100, v * 100));
      return `<div class="bar-row" data-kind="${kind}" data-value="${v}">
        <span class="bar-label">${escapeHtml(label)}</span>
        <span class="bar-track"><span class="bar-fill" style="width:${pct.toFixed(1)}%"></span></span>
        <span class="bar-pct">${formatPercent(v)}</span>
      </div>`;
    })
    .join("");
}

function renderDistribution(view: SessionView): string {
  const d = view.distribution;
  return `<section class="card" id="distribution">
    <h2>Model distribution</h2>
    <div id="model-bars">${renderBars(d.models, d.probs, "model")}</div>
    <h2>Belief per perspective</h2>
    <div id="belief-bars">${renderBars(view.perspectives, view.beliefs, "belief")}</div>
  </section>`;
}

function renderRhos(view: SessionView): string {
  if (view.rhos.length === 0) return "";
  const rows = view.rhos
    .map(
      (rho, i) =>
        `<li>round ${i + 1}: &rho; = ${rho.toFixed(4)}</li>`,
    )
    .join("");
  return `<section class="card" id="rho-panel">
    <h2>Ranking agreement</h2>
    <ul>${rows}</ul>
  </section>`;
}

export function renderBanner(banner: Banner | null): string {
  if (!banner) return "";
  return `<div class="banner" role="alert">
    <span id="banner-message">${escapeHtml(banner.message)}</span>
    ${banner.retryable ? `<button data-action="retry">retry</button>` : ""}
    <button data-action="dismiss-banner">dismiss</button>
  </div>`;
}

function renderEnded(view: SessionView, live: boolean): string {
  const reason = view.end_reason ? escapeHtml(view.end_reason) : "ended";
  return `<section class="card" id="ended-card">
    <h2>Dialogue ended</h2>
    <p>Reason: <strong>${reason}</strong>. ${view.rounds_completed} round(s) completed.</p>
    <p><a id="trace-link" href="/v1/sessions/${encodeURIComponent(view.id)}/trace" target="_blank" rel="noopener">export the trace</a></p>
    <button data-action="new-session"${disabledAttr(live)}>start a new session</button>
  </section>`;
}

export function renderStart(busy: boolean, banner: Banner | null): string {
  return `${renderBanner(banner)}
  <section class="card" id="start-card">
    <h2>Start a dialogue session</h2>
    <label class="muted"><input type="checkbox" id="epsilon-floor"${disabledAttr(!busy)}> epsilon floor (rescue degenerate updates)</label>
    <button data-action="new-session"${disabledAttr(!busy)}>start session</button>
  </section>`;
}

export function renderApp(
  view: SessionView,
  order: number[],
  busy: boolean,
  banner: Banner | null,
): string {
  const gating = controlsFor(view.state);
  const live = !busy;
  const header = `<header>
    <span class="title">${escapeHtml(view.scenario_name)}</span>
    <span>round ${view.round} of ${view.max_rounds}</span>
    <span class="state-chip" id="state-chip">${escapeHtml(view.state)}</span>
    <button data-action="end"${disabledAttr(gating.end && live)}>end dialogue</button>
  </header>`;
  const left =
    view.state === "ended"
      ? renderEnded(view, live)
      : `${renderAgentCard(view)}
        ${renderTrustPanel(view, gating.trust && live)}
        ${renderCounterPanel(view, gating.counter && live)}
        ${renderRankingPanel(view, order, gating.ranking && live)}`;
  return `${header}
  ${renderBanner(banner)}
  <main>
    <div class="column">${left}</div>
    <div class="column">${renderDistribution(view)}${renderRhos(view)}</div>
  </main>`;
}
