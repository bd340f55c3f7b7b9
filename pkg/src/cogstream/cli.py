"""Command-line front door: every analysis op plus the pacing server.

All subcommands print a human summary by default and the canonical form
with --json: `json.dumps(payload, indent=2, sort_keys=True)` of exactly the
dictionary the underlying library call produced.  Exit codes: 0 on success,
2 for usage problems (argparse), 1 for domain errors with the error class
name on standard error.
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import json
import sys

from . import allocator, cogload, pest, readmodel, savings, simulator
from .errors import CogstreamError


def canonical_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(args, payload, lines) -> None:
    if args.json:
        print(canonical_json(payload))
    else:
        for line in lines:
            print(line)


def _parse_floats(raw: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {raw!r}")


def _parse_ints(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {raw!r}")


# --- subcommand bodies ----------------------------------------------------


def cmd_fog(args) -> None:
    breakdown = cogload.gunning_fog(_read_text(args.path))
    payload = dataclasses.asdict(breakdown)
    payload["score"] = cogload.fog_to_score(breakdown.index)
    _emit(args, payload, [
        f"words {breakdown.words}, sentences {breakdown.sentences}, "
        f"complex {breakdown.complex_words}",
        f"fog index {breakdown.index:.2f} -> load score {payload['score']}",
    ])


def cmd_fk(args) -> None:
    grade = cogload.flesch_kincaid_grade(_read_text(args.path))
    payload = {"grade": grade}
    _emit(args, payload, [f"flesch-kincaid grade {grade:.2f}"])


def cmd_fit(args) -> None:
    samples = readmodel.load_samples_csv(args.csv)
    speeds = readmodel.speeds_of(samples, args.passage)
    report = readmodel.evaluate_fit(speeds)
    payload = {
        "mu": report.model.mu,
        "sigma": report.model.sigma,
        "median_wps": report.model.median,
        "n": report.n,
        "ks_statistic": report.ks_statistic,
        "ks_p_value": report.ks_p_value,
    }
    _emit(args, payload, [
        f"fit over {report.n} samples: mu {report.model.mu:.4f} "
        f"sigma {report.model.sigma:.4f} (median {report.model.median:.2f} WPS)",
        f"K-S D {report.ks_statistic:.4f}, p {report.ks_p_value:.4f}",
    ])


def cmd_quantile(args) -> None:
    model = readmodel.LogNormalModel(mu=args.mu, sigma=args.sigma)
    speed = model.quantile(args.alpha)
    payload = {"mu": args.mu, "sigma": args.sigma, "alpha": args.alpha,
               "speed_wps": speed}
    _emit(args, payload, [f"{speed:.6g}"])


def cmd_savings(args) -> None:
    groups = savings.load_groups(args.groups)
    report = savings.savings_at(groups, args.srar, args.smax)
    payload = {
        "target_srar": report.target_srar,
        "s_max": report.s_max,
        "group_speeds": report.group_speeds,
        "saving_fraction": report.saving_fraction,
    }
    lines = [f"group {name}: quantile speed {wps:.4f} WPS"
             for name, wps in report.group_speeds.items()]
    lines.append(f"saving {report.saving_fraction:.4f} "
                 f"({100.0 * report.saving_fraction:.2f}% of s_max {report.s_max:g})")
    _emit(args, payload, lines)


def cmd_intersect(args) -> None:
    a = readmodel.LogNormalModel(mu=args.mu_a, sigma=args.sigma_a)
    b = readmodel.LogNormalModel(mu=args.mu_b, sigma=args.sigma_b)
    roots = readmodel.density_intersection(a, b)
    payload = {"roots_wps": roots}
    _emit(args, payload, [" ".join(f"{r:.6g}" for r in roots)])


def cmd_alloc(args) -> None:
    pairs = [(f"s{i + 1}", score) for i, score in enumerate(args.scores)]
    plan = allocator.allocate(pairs, args.alpha, args.budget,
                              min_wps=args.min_wps)
    payload = {
        "alpha": plan.alpha,
        "budget_k": plan.budget_k,
        "entries": [dataclasses.asdict(e) for e in plan.entries],
    }
    lines = [f"{e.session_id}: score {e.score} weight {e.weight:.4f} "
             f"speed {e.speed_wps:.4f} WPS" for e in plan.entries]
    _emit(args, payload, lines)


def cmd_simulate(args) -> None:
    passages = simulator.load_passages(args.passages, args.speeds)
    points = simulator.savings_table(passages, args.targets, args.alpha)
    payload = simulator.table_rows(points)
    if args.out:
        simulator.write_table_json(points, args.out)
    if args.csv_out:
        simulator.write_table_csv(points, args.csv_out)
    lines = [
        f"srar {row['target_srar']:.2f} {row['method']:>10}: "
        f"avg {row['avg_wps']:.4f} WPS, saving {row['saving_pct']:.2f}%"
        for row in payload
    ]
    _emit(args, payload, lines)


def cmd_pest_sim(args) -> None:
    config = pest.PestConfig(rng_seed=args.seed)
    transcript = pest.simulate_reader(args.true_speed, config)
    payload = {"true_speed": args.true_speed, "seed": args.seed,
               "steps": transcript,
               "final_wps": transcript[-1]["speed"]}
    lines = [
        f"step {row['step']:>2}: speed {row['speed']:.3f} "
        f"dv {row['delta_v']:.2f} -> {row['choice']}"
        for row in transcript
    ]
    lines.append(f"final {transcript[-1]['speed']:.3f} WPS "
                 f"(true {args.true_speed:g})")
    _emit(args, payload, lines)


def cmd_synth(args) -> None:
    passages = simulator.synthetic_passages(
        n=args.n, median_range=(args.median_lo, args.median_hi),
        sigma=args.sigma, score_noise=args.noise, seed=args.seed)
    simulator.save_passages(passages, args.out)
    payload = {
        "out": args.out,
        "passages": [
            {"id": p.id, "median_wps": p.model.median,
             "oracle_score": p.oracle_score}
            for p in passages
        ],
    }
    lines = [f"wrote {len(passages)} passages to {args.out}"]
    _emit(args, payload, lines)


def cmd_report(args) -> None:
    from . import report  # matplotlib import deferred to the one user

    passages = simulator.load_passages(args.passages, args.speeds)
    written = report.render_report(passages, args.targets, args.alpha,
                                   args.out_dir, seed=args.seed)
    payload = {"written": written}
    _emit(args, payload, [f"wrote {path}" for path in written])


def cmd_serve(args) -> None:
    from .server import CogstreamServer, ServerConfig

    config = ServerConfig(
        budget_wps=args.budget, alpha=args.alpha, estimator=args.estimator,
        pause_interval_words=args.pause_interval, port=args.port,
        host=args.host, seed=args.seed, max_sessions=args.max_sessions,
        debug_scores=args.debug_scores, transcript_path=args.transcript)
    passages = (simulator.load_passages(args.passages, args.speeds)
                if args.passages else ())
    server = CogstreamServer(config, passages)

    async def run() -> None:
        await server.start()
        print(f"listening on {config.host}:{server.port} "
              f"(budget {config.budget_wps} WPS, alpha {config.alpha}, "
              f"estimator {config.estimator})", flush=True)
        await server.serve_forever()

    try:
        asyncio.run(run())
    except KeyboardInterrupt:
        pass


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogstream",
        description="Cognitive-load-aware adaptive text streaming toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true",
                       help="print the canonical JSON payload")
        return p

    p = add("fog", cmd_fog, "Gunning-Fog breakdown of a text file (- = stdin)")
    p.add_argument("path")

    p = add("fk", cmd_fk, "Flesch-Kincaid grade of a text file (- = stdin)")
    p.add_argument("path")

    p = add("fit", cmd_fit, "fit a log-normal reading-speed model from a CSV")
    p.add_argument("--csv", required=True,
                   help="CSV with header passage_id,user_id,speed_wps")
    p.add_argument("--passage", default=None,
                   help="restrict to one passage id")

    p = add("quantile", cmd_quantile, "speed at a target alignment rate")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)

    p = add("savings", cmd_savings,
            "compute saving of per-group quantile speeds vs a max speed")
    p.add_argument("--groups", required=True,
                   help="JSON array of {name, proportion, mu, sigma}")
    p.add_argument("--srar", type=float, required=True)
    p.add_argument("--smax", type=float, required=True)

    p = add("intersect", cmd_intersect,
            "speeds where two reading-speed densities cross")
    p.add_argument("--mu-a", type=float, required=True)
    p.add_argument("--sigma-a", type=float, required=True)
    p.add_argument("--mu-b", type=float, required=True)
    p.add_argument("--sigma-b", type=float, required=True)

    p = add("alloc", cmd_alloc, "split a word-rate budget across scores")
    p.add_argument("--scores", type=_parse_ints, required=True,
                   help="comma-separated 1..10 scores")
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--min-wps", type=float, default=None)

    p = add("simulate", cmd_simulate, "savings table over a passage corpus")
    p.add_argument("--passages", required=True)
    p.add_argument("--speeds", default=None,
                   help="per-passage speed samples CSV (to fit models)")
    p.add_argument("--targets", type=_parse_floats, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--out", default=None, help="also write table.json here")
    p.add_argument("--csv-out", default=None, help="also write table.csv here")

    p = add("pest-sim", cmd_pest_sim,
            "headless staircase run against a known true speed")
    p.add_argument("--true-speed", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("synth", cmd_synth, "write a synthetic correlated passage corpus")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--median-lo", type=float, default=4.0)
    p.add_argument("--median-hi", type=float, default=9.0)
    p.add_argument("--sigma", type=float, default=0.25)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = add("report", cmd_report,
            "render savings tables plus figures into a directory")
    p.add_argument("--passages", required=True)
    p.add_argument("--speeds", default=None)
    p.add_argument("--targets", type=_parse_floats,
                   default=[0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95])
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("serve", cmd_serve, "run the pacing server")
    p.add_argument("--port", type=int, default=8772)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--budget", type=float, default=10.0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--estimator", choices=["fog", "tag", "oracle"],
                   default="fog")
    p.add_argument("--pause-interval", type=int, default=30)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--passages", default=None)
    p.add_argument("--speeds", default=None)
    p.add_argument("--max-sessions", type=int, default=64)
    p.add_argument("--debug-scores", action="store_true")
    p.add_argument("--transcript", default=None,
                   help="append a JSON-lines audit of all events here")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CogstreamError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"FileNotFoundError: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
