"""Command-line interface: replay, fit, evaluate, simulate, serve.

Exit codes: 0 on success, 1 for file/schema/argument problems, 2 when a
replay hits a degenerate update (the message names the timestep).
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .belief import BASELINE_1, BASELINE_2, BASELINE_3, PROPOSED, UpdateRule
from .dialogue import (
    DialogueTrace,
    Scenario,
    canonical_json,
    demo_scenario,
    framework_rankings,
    replay_steps,
)
from .errors import (
    ArgusError,
    DegenerateInputError,
    DegenerateUpdateError,
    InsufficientRoundsError,
    LengthMismatchError,
    MalformedTraceError,
)
from .evaluation import (
    DEFAULT_GAMMA_GRID,
    PERSONALIZATION_1,
    PERSONALIZATION_2,
    UPPER_BOUND,
    evaluate_methods,
    fit_gamma,
    load_records_csv,
    load_trace_dir,
    ordering_rho,
    save_records_csv,
    synthesize_cohort,
    synthetic_scenario,
    trust_round_comparison,
    variant_round_split,
)

RULES = ("proposed", "baseline1", "baseline2", "baseline3")
ALL_METHODS = (BASELINE_1, BASELINE_2, BASELINE_3, PROPOSED)
VARIANTS = (UPPER_BOUND, PERSONALIZATION_1, PERSONALIZATION_2)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise MalformedTraceError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise MalformedTraceError(f"{path}: invalid JSON: {exc}") from exc


def _load_scenario(path: str | None, rule: str | None, gamma: float | None) -> Scenario:
    scenario = demo_scenario() if path is None else Scenario.from_payload(_load_json(path))
    if rule is not None:
        scenario = replace(scenario, rule=UpdateRule.from_name(rule))
    if gamma is not None:
        scenario = replace(scenario, gamma=gamma)
    return scenario


def _load_cohort(records_path: str, traces_dir: str, scenario: Scenario):
    try:
        records = load_records_csv(records_path)
    except FileNotFoundError:
        raise MalformedTraceError(f"no such file: {records_path}") from None
    except (OSError, KeyError, ValueError) as exc:
        raise MalformedTraceError(f"{records_path}: malformed records CSV: {exc}") from exc
    if not Path(traces_dir).is_dir():
        raise MalformedTraceError(f"no such directory: {traces_dir}")
    try:
        traces = load_trace_dir(traces_dir, scenario)
    except json.JSONDecodeError as exc:
        raise MalformedTraceError(f"{traces_dir}: invalid JSON: {exc}") from exc
    return records, traces


def _write_out(path: str | None, payload: dict) -> None:
    if path:
        Path(path).write_text(canonical_json(payload))
        click.echo(f"report written to {path}")


def _fmt_dist(probs) -> str:
    return "[" + " ".join(f"{p:.4f}" for p in probs) + "]"


@click.group(name="argus")
def cli():
    """Model a dialogue partner's beliefs from argument traces."""


@cli.command("replay")
@click.option("--trace", "trace_path", required=True, help="Trace JSON file.")
@click.option("--scenario", "scenario_path", default=None, help="Scenario JSON file (default: built-in demo).")
@click.option("--rule", type=click.Choice(RULES), default=None, help="Override the scenario's update rule.")
@click.option("--gamma", type=float, default=None, help="Override the scenario's gamma.")
@click.option("--epsilon-floor", is_flag=True, help="Floor zero priors at 1e-9 before each update.")
@click.option("--out", "out_path", default=None, help="Write a JSON report here.")
def cmd_replay(trace_path, scenario_path, rule, gamma, epsilon_floor, out_path):
    """Replay a trace and print each step's distribution."""
    scenario = _load_scenario(scenario_path, rule, gamma)
    trace = DialogueTrace.from_payload(_load_json(trace_path), scenario)
    dists, probs = replay_steps(trace, epsilon_floor=epsilon_floor)
    models = [str(m) for m in scenario.vocab.models()]
    click.echo(f"scenario: {scenario.name}  rule: {scenario.rule.name}  gamma: {scenario.gamma}")
    click.echo(f"models: {models}")
    click.echo(f"t=0  prior {' ' * 42}{_fmt_dist(dists[0].probs)}")
    for move, p_used, d in zip(trace.moves, probs, dists[1:]):
        label = f"trust={move.trust}" if move.trust is not None else f"certainty={move.certainty}"
        head = f"t={move.timestep}  {move.source} {move} {label} p={p_used:.4f}"
        click.echo(f"{head:<58}{_fmt_dist(d.probs)}")
    rankings = framework_rankings(trace, epsilon_floor=epsilon_floor)
    if rankings:
        final = rankings[-1]
        shown = " > ".join(str(trace.scenario.perspectives[i]) for i in final)
        click.echo(f"final ranking: {shown}")
    rhos = []
    for i, human in enumerate(trace.rankings):
        rho = ordering_rho(rankings[i], human)
        rhos.append(rho)
        click.echo(f"round {i + 1}: rho={rho:.4f}")
    _write_out(
        out_path,
        {
            "scenario": scenario.name,
            "rule": scenario.rule.name,
            "gamma": scenario.gamma,
            "models": models,
            "distributions": [[float(p) for p in d.probs] for d in dists],
            "p_used": probs,
            "rankings": [list(r) for r in rankings],
            "rhos": rhos,
        },
    )


@cli.command("fit")
@click.option("--records", "records_path", required=True, help="Round-records CSV.")
@click.option("--traces", "traces_dir", required=True, help="Directory of trace JSON files.")
@click.option("--scenario", "scenario_path", default=None, help="Scenario JSON file (default: built-in demo).")
@click.option("--variant", type=click.Choice(VARIANTS), default=UPPER_BOUND, show_default=True)
@click.option("--grid", default=None, help="Comma-separated gamma candidates.")
@click.option("--rule", type=click.Choice(RULES), default=None, help="Override the scenario's update rule.")
@click.option("--out", "out_path", default=None, help="Write a JSON report here.")
def cmd_fit(records_path, traces_dir, scenario_path, variant, grid, rule, out_path):
    """Personalize gamma per participant from recorded rankings."""
    scenario = _load_scenario(scenario_path, rule, None)
    records, traces = _load_cohort(records_path, traces_dir, scenario)
    grid_values = (
        DEFAULT_GAMMA_GRID
        if grid is None
        else tuple(float(g) for g in grid.split(","))
    )
    rounds_by_pid: dict[str, int] = {}
    for rec in records:
        rounds_by_pid[rec.participant_id] = max(
            rounds_by_pid.get(rec.participant_id, 0), rec.round
        )
    usable, skipped = {}, []
    for pid, trace in traces.items():
        available = min(trace.rounds, rounds_by_pid.get(pid, 0))
        try:
            variant_round_split(variant, available)
            usable[pid] = trace
        except InsufficientRoundsError as exc:
            skipped.append(f"{pid}: {exc}")
    for line in skipped:
        click.echo(f"skipped {line}", err=True)
    if not usable:
        raise InsufficientRoundsError("no participant has the rounds this variant needs")
    fits = fit_gamma(records, usable, variant=variant, grid=grid_values)
    click.echo(f"{'participant':<12}{'gamma':>7}{'fit_rho':>9}{'eval_rho':>9}  rounds")
    for f in fits:
        rounds = f"fit={list(f.fit_rounds)} eval={list(f.eval_rounds)}"
        click.echo(
            f"{f.participant_id:<12}{f.gamma:>7.1f}{f.fit_rho:>9.4f}{f.eval_rho:>9.4f}  {rounds}"
        )
    mean_eval = sum(f.eval_rho for f in fits) / len(fits)
    counts: dict[float, int] = {}
    for f in fits:
        counts[f.gamma] = counts.get(f.gamma, 0) + 1
    click.echo(f"participants: {len(fits)}  mean eval rho: {mean_eval:.4f}")
    click.echo(
        "fitted gammas: "
        + "  ".join(f"{g:.1f}:{n}" for g, n in sorted(counts.items()))
    )
    _write_out(
        out_path,
        {
            "variant": variant,
            "grid": list(grid_values),
            "fits": [
                {
                    "participant_id": f.participant_id,
                    "gamma": f.gamma,
                    "fit_rounds": list(f.fit_rounds),
                    "eval_rounds": list(f.eval_rounds),
                    "fit_rho": f.fit_rho,
                    "eval_rho": f.eval_rho,
                }
                for f in fits
            ],
            "mean_eval_rho": mean_eval,
            "skipped": skipped,
        },
    )


@cli.command("evaluate")
@click.option("--records", "records_path", required=True, help="Round-records CSV.")
@click.option("--traces", "traces_dir", required=True, help="Directory of trace JSON files.")
@click.option("--scenario", "scenario_path", default=None, help="Scenario JSON file (default: built-in demo).")
@click.option("--gamma", type=float, default=0.7, show_default=True, help="Gamma for the prospect-weighted methods.")
@click.option("--out", "out_path", default=None, help="Write a JSON report here.")
def cmd_evaluate(records_path, traces_dir, scenario_path, gamma, out_path):
    """Compare the four update methods on a recorded cohort."""
    scenario = _load_scenario(scenario_path, None, None)
    records, traces = _load_cohort(records_path, traces_dir, scenario)
    summary = evaluate_methods(records, traces, list(ALL_METHODS), gamma)
    click.echo(f"{'method':<11}{'rounds':>7}{'frac rho in [0.75,1]':>22}")
    for name in ("baseline1", "baseline2", "baseline3", "proposed"):
        row = summary[name]
        click.echo(f"{name:<11}{row['count']:>7}{row['fraction_high']:>22.4f}")
        if row["failed"]:
            click.echo(f"  failed traces: {row['failed']}", err=True)
    tests = {}
    max_round = max((r.round for r in records), default=0)
    for a, b in [(r, r + 1) for r in range(1, max_round)]:
        try:
            t2, p2, n = trust_round_comparison(records, a, b, "two_sided")
            t1, p1, _ = trust_round_comparison(records, a, b, "greater")
        except (LengthMismatchError, DegenerateInputError) as exc:
            click.echo(f"trust rounds {a}->{b}: not testable ({exc})")
            continue
        tests[f"{a}->{b}"] = {"t": t2, "p_two_sided": p2, "p_greater": p1, "n": n}
        click.echo(
            f"trust rounds {a}->{b}: t={t2:.4f} p(two-sided)={p2:.4g} "
            f"p(greater)={p1:.4g} n={n}"
        )
    _write_out(
        out_path,
        {
            "gamma": gamma,
            "methods": {
                name: {k: v for k, v in row.items() if k != "rhos"}
                for name, row in summary.items()
            },
            "trust_tests": tests,
        },
    )


@cli.command("simulate")
@click.option("--scenario", "scenario_path", default=None, help="Scenario JSON file (default: built-in synthetic).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--participants", type=int, default=20, show_default=True)
@click.option("--rounds", type=int, default=None, help="Rounds per dialogue (default: scenario max).")
@click.option("--gamma", type=float, default=0.7, show_default=True, help="True gamma of the simulated humans.")
@click.option("--rule", type=click.Choice(RULES), default=None, help="Override the scenario's update rule.")
@click.option("--out-dir", "out_dir", default=None, help="Write traces/ and records.csv here.")
def cmd_simulate(scenario_path, seed, participants, rounds, gamma, rule, out_dir):
    """Generate a reproducible synthetic cohort."""
    if scenario_path is None:
        scenario = synthetic_scenario()
        if rule is not None:
            scenario = replace(scenario, rule=UpdateRule.from_name(rule))
    else:
        scenario = _load_scenario(scenario_path, rule, None)
    records, traces = synthesize_cohort(
        scenario, gamma_true=gamma, participants=participants, seed=seed, rounds=rounds
    )
    click.echo(
        f"simulated {participants} participants x "
        f"{rounds if rounds is not None else scenario.max_rounds} rounds "
        f"(scenario {scenario.name}, rule {scenario.rule.name}, "
        f"true gamma {gamma}, seed {seed})"
    )
    by_pid: dict[str, list[float]] = {}
    for rec in records:
        by_pid.setdefault(rec.participant_id, []).append(rec.trust)
    for pid in sorted(by_pid)[:5]:
        trusts = " ".join(f"{t:.1f}" for t in by_pid[pid])
        click.echo(f"{pid}: trusts {trusts}")
    if len(by_pid) > 5:
        click.echo(f"... {len(by_pid) - 5} more")
    if out_dir:
        base = Path(out_dir)
        trace_dir = base / "traces"
        trace_dir.mkdir(parents=True, exist_ok=True)
        for pid, trace in traces.items():
            (trace_dir / f"{pid}.json").write_text(canonical_json(trace.to_payload()))
        save_records_csv(records, base / "records.csv")
        (base / "scenario.json").write_text(canonical_json(scenario.to_payload()))
        click.echo(f"wrote {len(traces)} traces, records.csv, scenario.json to {out_dir}")


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-dir", default=None, help="Session persistence directory (default: $ARGUS_DATA_DIR).")
@click.option("--scenario", "scenario_path", default=None, help="Default scenario for new sessions (default: built-in demo).")
def cmd_serve(host, port, data_dir, scenario_path):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    scenario = _load_scenario(scenario_path, None, None)
    app = create_app(data_dir=data_dir, default_scenario=scenario)
    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except DegenerateUpdateError as exc:
        where = f" at timestep {exc.timestep}" if exc.timestep is not None else ""
        click.echo(f"error: degenerate update{where}: {exc}", err=True)
        sys.exit(2)
    except ArgusError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
