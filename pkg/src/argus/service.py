"""HTTP session service: live dialogues over a JSON API under /v1.

Each session walks the round state machine awaiting_trust ->
awaiting_counter -> awaiting_ranking -> (between_rounds | ended); the
between_rounds state already holds the next agent argument, so a trust
report is legal from it exactly as from awaiting_trust. Sessions are
persisted one JSON file each (atomically replaced) and rebuilt by replay
on reload, so the exported trace is always the source of truth.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .arguments import AGENT, HUMAN, Argument
from .belief import (
    ModelDistribution,
    apply_move,
    perspective_beliefs,
    rank_perspectives,
    uniform_prior,
)
from .dialogue import (
    DialogueTrace,
    Scenario,
    canonical_json,
    replay,
    select_agent_argument,
)
from .errors import ArgusError, DegenerateUpdateError, NoArgumentAvailableError
from .evaluation import ordering_rho

AWAITING_TRUST = "awaiting_trust"
AWAITING_COUNTER = "awaiting_counter"
AWAITING_RANKING = "awaiting_ranking"
BETWEEN_ROUNDS = "between_rounds"
ENDED = "ended"

SESSION_SCHEMA = 1


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    id: str
    scenario: Scenario
    trace: DialogueTrace
    distribution: ModelDistribution
    state: str
    pending: Argument | None
    rhos: list[float] = field(default_factory=list)
    epsilon_floor: bool = False
    end_reason: str | None = None
    created: str = field(default_factory=_now)
    updated: str = field(default_factory=_now)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    """In-memory registry with optional one-file-per-session persistence."""

    def __init__(self, data_dir: Path | None):
        self.data_dir = data_dir
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()
        if data_dir is not None:
            data_dir.mkdir(parents=True, exist_ok=True)

    def add(self, session: Session) -> None:
        with self._registry_lock:
            self._sessions[session.id] = session
        self.save(session)

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        session = self._load(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        with self._registry_lock:
            return self._sessions.setdefault(session_id, session)

    def save(self, session: Session) -> None:
        if self.data_dir is None:
            return
        payload = {
            "schema": SESSION_SCHEMA,
            "id": session.id,
            "scenario": session.scenario.to_payload(),
            "trace": session.trace.to_payload(),
            "state": session.state,
            "pending": (
                None
                if session.pending is None
                else {
                    "premises": [str(p) for p in session.pending.sorted_premises()],
                    "claim": str(session.pending.claim),
                }
            ),
            "rhos": session.rhos,
            "epsilon_floor": session.epsilon_floor,
            "end_reason": session.end_reason,
            "created": session.created,
            "updated": session.updated,
        }
        path = self.data_dir / f"{session.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(canonical_json(payload))
        os.replace(tmp, path)

    def _load(self, session_id: str) -> Session | None:
        import json

        if self.data_dir is None:
            return None
        path = self.data_dir / f"{session_id}.json"
        if not path.exists():
            return None
        payload = json.loads(path.read_text())
        scenario = Scenario.from_payload(payload["scenario"])
        trace = DialogueTrace.from_payload(payload["trace"], scenario)
        epsilon_floor = bool(payload.get("epsilon_floor", False))
        distribution = replay(trace, epsilon_floor=epsilon_floor)[-1]
        pending = None
        if payload.get("pending") is not None:
            from .logic import parse_formula

            pending = Argument(
                premises=frozenset(
                    parse_formula(p, scenario.vocab)
                    for p in payload["pending"]["premises"]
                ),
                claim=parse_formula(payload["pending"]["claim"], scenario.vocab),
            )
        return Session(
            id=payload["id"],
            scenario=scenario,
            trace=trace,
            distribution=distribution,
            state=payload["state"],
            pending=pending,
            rhos=[float(r) for r in payload.get("rhos", [])],
            epsilon_floor=epsilon_floor,
            end_reason=payload.get("end_reason"),
            created=payload.get("created", _now()),
            updated=payload.get("updated", _now()),
        )


class CreateSessionBody(BaseModel):
    scenario: dict | None = None
    epsilon_floor: bool = False


class TrustBody(BaseModel):
    level_label: str | None = None
    tau: float | None = None


class CounterBody(BaseModel):
    pool_index: int | None = None


class RankingBody(BaseModel):
    ranking: list[int]


def _render_argument(a: Argument | None) -> dict | None:
    if a is None:
        return None
    out = {
        "premises": [str(p) for p in a.sorted_premises()],
        "claim": str(a.claim),
    }
    if a.trust is not None:
        out["trust"] = a.trust
    if a.certainty is not None:
        out["certainty"] = a.certainty
    return out


def _session_view(s: Session) -> dict:
    scenario = s.scenario
    if s.pending is not None:
        current = s.pending
    else:
        agent_moves = [m for m in s.trace.moves if m.source == AGENT]
        current = agent_moves[-1] if agent_moves else None
    return {
        "id": s.id,
        "state": s.state,
        "round": len(s.trace.rankings) + (0 if s.state == ENDED else 1),
        "rounds_completed": len(s.trace.rankings),
        "max_rounds": scenario.max_rounds,
        "scenario_name": scenario.name,
        "agent_argument": _render_argument(current),
        "trust_levels": [[label, tau] for label, tau in scenario.trust_levels],
        "counter_options": [
            {
                "index": i,
                "premises": [str(p) for p in e.argument.sorted_premises()],
                "claim": str(e.argument.claim),
                "certainty": e.certainty,
                "cue": e.cue,
            }
            for i, e in enumerate(scenario.human_pool)
        ],
        "perspectives": [str(p) for p in scenario.perspectives],
        "distribution": {
            "vocab": list(scenario.vocab.atoms),
            "probs": [float(p) for p in s.distribution.probs],
            "models": [str(m) for m in scenario.vocab.models()],
        },
        "beliefs": perspective_beliefs(s.distribution, scenario.perspectives),
        "rankings": [list(r) for r in s.trace.rankings],
        "rhos": s.rhos,
        "end_reason": s.end_reason,
    }


def _degenerate_to_http(exc: DegenerateUpdateError, timestep: int) -> HTTPException:
    return HTTPException(
        status_code=500,
        detail={
            "error": "degenerate_update",
            "message": str(exc),
            "timestep": timestep,
        },
    )


def _require_state(s: Session, allowed: tuple[str, ...], action: str) -> None:
    if s.state not in allowed:
        raise HTTPException(
            status_code=409,
            detail={
                "error": "out_of_order",
                "action": action,
                "state": s.state,
                "allowed_states": list(allowed),
            },
        )


def create_app(
    data_dir: str | Path | None = None,
    default_scenario: Scenario | None = None,
) -> FastAPI:
    """Build the service. data_dir falls back to $ARGUS_DATA_DIR."""
    if data_dir is None:
        data_dir = os.environ.get("ARGUS_DATA_DIR")
    store = SessionStore(Path(data_dir) if data_dir else None)
    app = FastAPI(title="argus session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if body.scenario is not None:
            try:
                scenario = Scenario.from_payload(body.scenario)
            except (ArgusError, KeyError, TypeError, ValueError) as exc:
                raise HTTPException(status_code=422, detail=f"bad scenario: {exc}")
        elif default_scenario is not None:
            scenario = default_scenario
        else:
            raise HTTPException(
                status_code=422,
                detail="no scenario given and the service has no default",
            )
        d = uniform_prior(scenario.vocab)
        trace = DialogueTrace(scenario=scenario)
        try:
            pending = select_agent_argument(d, scenario, trace)
        except NoArgumentAvailableError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = Session(
            id=uuid.uuid4().hex[:12],
            scenario=scenario,
            trace=trace,
            distribution=d,
            state=AWAITING_TRUST,
            pending=pending,
            epsilon_floor=body.epsilon_floor,
        )
        store.add(session)
        return _session_view(session)

    @app.post("/v1/sessions/{session_id}/trust")
    def post_trust(session_id: str, body: TrustBody):
        s = store.get(session_id)
        with s.lock:
            _require_state(s, (AWAITING_TRUST, BETWEEN_ROUNDS), "trust")
            if (body.level_label is None) == (body.tau is None):
                raise HTTPException(
                    status_code=422,
                    detail="provide exactly one of level_label or tau",
                )
            if body.level_label is not None:
                try:
                    tau = s.scenario.trust_of_label(body.level_label)
                except ArgusError as exc:
                    raise HTTPException(status_code=422, detail=str(exc))
            else:
                tau = body.tau
                if not 0.0 <= tau <= 1.0:
                    raise HTTPException(
                        status_code=422, detail=f"tau must lie in [0, 1], got {tau}"
                    )
            move = s.pending.as_agent_move(trust=tau, timestep=s.trace.next_timestep())
            try:
                d, _ = apply_move(
                    s.distribution,
                    move,
                    s.scenario.rule,
                    s.scenario.params,
                    epsilon_floor=s.epsilon_floor,
                )
            except DegenerateUpdateError as exc:
                raise _degenerate_to_http(exc, move.timestep)
            s.trace = s.trace.with_move(move)
            s.distribution = d
            s.pending = None
            s.state = AWAITING_COUNTER
            s.updated = _now()
            store.save(s)
            return _session_view(s)

    @app.post("/v1/sessions/{session_id}/counter")
    def post_counter(session_id: str, body: CounterBody):
        s = store.get(session_id)
        with s.lock:
            _require_state(s, (AWAITING_COUNTER,), "counter")
            if body.pool_index is not None:
                pool = s.scenario.human_pool
                if not 0 <= body.pool_index < len(pool):
                    raise HTTPException(
                        status_code=422,
                        detail=f"pool_index must lie in [0, {len(pool) - 1}]",
                    )
                entry = pool[body.pool_index]
                move = replace(
                    entry.argument,
                    source=HUMAN,
                    certainty=entry.certainty,
                    cue=entry.cue,
                    timestep=s.trace.next_timestep(),
                )
                try:
                    d, _ = apply_move(
                        s.distribution,
                        move,
                        s.scenario.rule,
                        s.scenario.params,
                        epsilon_floor=s.epsilon_floor,
                    )
                except DegenerateUpdateError as exc:
                    raise _degenerate_to_http(exc, move.timestep)
                s.trace = s.trace.with_move(move)
                s.distribution = d
            s.state = AWAITING_RANKING
            s.updated = _now()
            store.save(s)
            return _session_view(s)

    @app.post("/v1/sessions/{session_id}/ranking")
    def post_ranking(session_id: str, body: RankingBody):
        s = store.get(session_id)
        with s.lock:
            _require_state(s, (AWAITING_RANKING,), "ranking")
            n = len(s.scenario.perspectives)
            if sorted(body.ranking) != list(range(n)):
                raise HTTPException(
                    status_code=422,
                    detail=f"ranking must be a permutation of 0..{n - 1}",
                )
            framework = rank_perspectives(s.distribution, s.scenario.perspectives)
            rho = ordering_rho(framework, body.ranking)
            s.trace = s.trace.with_ranking(body.ranking)
            s.rhos.append(rho)
            if s.trace.rounds >= s.scenario.max_rounds:
                s.state = ENDED
                s.end_reason = "max_rounds"
            else:
                try:
                    s.pending = select_agent_argument(
                        s.distribution, s.scenario, s.trace
                    )
                    s.state = BETWEEN_ROUNDS
                except NoArgumentAvailableError:
                    s.state = ENDED
                    s.end_reason = "no_argument_available"
            s.updated = _now()
            store.save(s)
            view = _session_view(s)
            view["rho"] = rho
            return view

    @app.post("/v1/sessions/{session_id}/end")
    def post_end(session_id: str):
        s = store.get(session_id)
        with s.lock:
            _require_state(
                s,
                (AWAITING_TRUST, AWAITING_COUNTER, AWAITING_RANKING, BETWEEN_ROUNDS),
                "end",
            )
            s.state = ENDED
            s.end_reason = "user_end"
            s.pending = None
            s.updated = _now()
            store.save(s)
            return _session_view(s)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(store.get(session_id))

    @app.get("/v1/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        s = store.get(session_id)
        return Response(
            content=canonical_json(s.trace.to_payload()),
            media_type="application/json",
        )

    return app
