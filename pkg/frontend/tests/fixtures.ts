/** Shared test fixtures: a realistic session view and response helpers. */

import type { SessionView } from "../src/types.js";

export function makeView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    id: "s-1",
    state: "awaiting_trust",
    round: 1,
    rounds_completed: 0,
    max_rounds: 3,
    scenario_name: "demo",
    agent_argument: {
      premises: ["stable", "stable -> fast"],
      claim: "stable & fast",
    },
    trust_levels: [
      ["certain", 1.0],
      ["probable", 0.7],
      ["chance", 0.5],
      ["doubtful", 0.2],
    ],
    counter_options: [
      {
        index: 0,
        premises: ["!stable"],
        claim: "!stable",
        certainty: 0.9,
        cue: "I am certain that",
      },
      {
        index: 1,
        premises: ["!fast"],
        claim: "!fast",
        certainty: 0.7,
        cue: "It seems probable that",
      },
    ],
    perspectives: ["stable & fast", "stable & !fast", "!stable & fast", "!stable & !fast"],
    distribution: {
      vocab: ["stable", "fast"],
      probs: [0.45, 0.0164, 0.45, 0.0836],
      models: ["!stable & !fast", "!stable & fast", "stable & !fast", "stable & fast"],
    },
    beliefs: [0.0836, 0.45, 0.0164, 0.45],
    rankings: [],
    rhos: [],
    end_reason: null,
    ...overrides,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as unknown as Response;
}

export function unparsableResponse(status: number): Response {
  return {
    ok: false,
    status,
    json: async () => {
      throw new SyntaxError("not json");
    },
  } as unknown as Response;
}
