/** Payload shapes of the /v1 session API. */

export type SessionState =
  | "awaiting_trust"
  | "awaiting_counter"
  | "awaiting_ranking"
  | "between_rounds"
  | "ended";

export interface RenderedArgument {
  premises: string[];
  claim: string;
  trust?: number;
  certainty?: number;
}

export interface CounterOption {
  index: number;
  premises: string[];
  claim: string;
  certainty: number;
  cue: string;
}

export interface Distribution {
  vocab: string[];
  probs: number[];
  models: string[];
}

export interface SessionView {
  id: string;
  state: SessionState;
  round: number;
  rounds_completed: number;
  max_rounds: number;
  scenario_name: string;
  agent_argument: RenderedArgument | null;
  trust_levels: [string, number][];
  counter_options: CounterOption[];
  perspectives: string[];
  distribution: Distribution;
  beliefs: number[];
  rankings: number[][];
  rhos: number[];
  end_reason: string | null;
}

export interface TraceMove {
  source: "agent" | "human";
  premises: string[];
  claim: string;
  timestep: number;
  trust?: number;
  certainty?: number;
  cue?: string;
}

export interface TracePayload {
  schema: number;
  scenario: string;
  moves: TraceMove[];
  rankings: number[][];
}

/** A non-destructive error notice shown above the panels. */
export interface Banner {
  message: string;
  retryable: boolean;
}
