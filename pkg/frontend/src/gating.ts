/** Which controls are legal in each session state.
 *
 * This mirrors the server's state machine exactly; the app consults it
 * both when rendering (disabled controls) and again before issuing any
 * request, so the UI cannot send an action the server would 409.
 */

import type { SessionState } from "./types.js";

export interface Gating {
  trust: boolean;
  counter: boolean;
  ranking: boolean;
  end: boolean;
}

export const ALL_STATES: SessionState[] = [
  "awaiting_trust",
  "awaiting_counter",
  "awaiting_ranking",
  "between_rounds",
  "ended",
];

export function controlsFor(state: SessionState): Gating {
  return {
    trust: state === "awaiting_trust" || state === "between_rounds",
    counter: state === "awaiting_counter",
    ranking: state === "awaiting_ranking",
    end: state !== "ended",
  };
}

export type ActionKind = keyof Gating;

export function isLegal(state: SessionState, action: ActionKind): boolean {
  return controlsFor(state)[action];
}
