"""Command-line front door.

JSON in, JSON out, with optional CSV sweep tables and rendered figures
next to them.  Every result embeds the effective tolerance table and a
hash of the canonical config, and repeated runs with the same config and
seed are byte-identical for any worker-pool size.

Exit codes: 0 success, 2 precondition or input errors, 3 when --strict
promotes a numerical non-convergence flag.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, constructions, dynamics, torus
from .config import merged_tolerances
from .fourier import FourierSeries
from .parallel import default_workers

COMMANDS = ("census", "probe", "certify", "construct", "sample",
            "prevalence", "torus-check", "lemma-check")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, tol_overrides = _extract_tolerance_flags(argv)
        args = _build_parser().parse_args(argv)
        tolerances = merged_tolerances(tol_overrides)
        return run(args, tolerances)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run(args, tolerances: dict[str, float]) -> int:
    handler = _HANDLERS[args.command]
    result, flags, csv_rows, plot_fn = handler(args)
    config = _canonical_config(args)
    config["tolerances"] = tolerances
    envelope = {
        "command": args.command,
        "config": config,
        "config_hash": _config_hash(config),
        "flags": flags,
        "result": result,
    }
    payload = json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    if csv_rows is not None and args.csv:
        _write_csv(args.csv, csv_rows)
    if getattr(args, "plot", False):
        if not args.out:
            raise ValueError("--plot needs --out to name the figure file")
        plot_path = str(Path(args.out).with_suffix(".png"))
        if plot_fn is None:
            raise ValueError(f"command {args.command} has no figure renderer")
        plot_fn(plot_path)
    if args.strict and flags:
        print("strict: " + "; ".join(flags), file=sys.stderr)
        return 3
    return 0


# -- argument plumbing ---------------------------------------------------------


def _extract_tolerance_flags(argv: list[str]) -> tuple[list[str], dict[str, float]]:
    """Pull --tol-<name> [value] / --tol-<name>=value out of the argv."""
    rest: list[str] = []
    overrides: dict[str, float] = {}
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--tol-"):
            body = tok[len("--tol-"):]
            if "=" in body:
                name, value = body.split("=", 1)
            else:
                name = body
                i += 1
                if i >= len(argv):
                    raise ValueError(f"--tol-{name} needs a value")
                value = argv[i]
            overrides[name] = float(value)
        else:
            rest.append(tok)
        i += 1
    return rest, overrides


def _add_common(p: argparse.ArgumentParser, needs_input: bool = True):
    if needs_input:
        p.add_argument("--input", required=True, help="input spec (JSON file)")
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.add_argument("--csv", help="side table CSV path")
    p.add_argument("--plot", action="store_true",
                   help="render a PNG figure next to --out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true",
                   help="exit 3 on undecided / not-stabilized flags")
    p.add_argument("--workers", type=int, default=default_workers())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circlelab",
        description="Perturbed rigid rotations: censuses, probes, certificates, "
                    "constructions, prevalence experiments, torus reduction checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="periodic-orbit census of one family")
    _add_common(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--q-max", type=int, default=4)

    p = sub.add_parser("probe", help="small-amplitude cyclicity probe at p/q")
    _add_common(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a-schedule", required=True, help="comma-separated decreasing amplitudes")
    p.add_argument("--r-grid", type=int, default=257)

    p = sub.add_parser("certify", help="sign-change certificate report")
    _add_common(p)

    p = sub.add_parser("construct", help="deterministic function constructions")
    _add_common(p)
    p.add_argument("--kind", choices=("force-attractors", "porous-center"), required=True)
    p.add_argument("--d", type=int, help="attractor count (force-attractors)")
    p.add_argument("--c", type=float, help="forcing amplitude (force-attractors)")
    p.add_argument("--N", type=int, help="degree / target count parameter")
    p.add_argument("--k", type=int, default=2, help="smoothness order (porous-center)")
    p.add_argument("--delta", type=float, help="recentering budget (porous-center)")

    p = sub.add_parser("sample", help="draw one function from a sampler")
    _add_common(p, needs_input=False)
    p.add_argument("--kind", choices=constructions.KINDS, required=True)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--m-trunc", type=int)
    p.add_argument("--stream", type=int, default=0)

    p = sub.add_parser("prevalence", help="Monte Carlo escape-fraction experiment")
    _add_common(p, needs_input=False)
    p.add_argument("--kind", choices=constructions.KINDS, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--m-trunc", type=int)
    p.add_argument("--shift", help="optional function JSON to translate by")

    p = sub.add_parser("torus-check", help="reduction cross-checks for a torus field")
    _add_common(p)
    p.add_argument("--a-schedule", help="amplitudes for the first-order slope fit")
    p.add_argument("--q-max", type=int, help="run the limit-cycle census up to q_max")
    p.add_argument("--steps", type=int, default=2048)

    p = sub.add_parser("lemma-check", help="root-count bound sweep for r + cos(nx+phase) + g")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--r-range", default="-2:2:101", help="lo:hi:count sweep")
    p.add_argument("--phase", type=float, default=0.0,
                   help="phase angle theta; (a, b) = (cos theta, sin theta)")
    return parser


def _canonical_config(args) -> dict:
    skip = {"out", "csv", "plot", "workers", "strict", "command"}
    config: dict = {"command": args.command, "inputs": {}}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if key in ("input", "shift") and value:
            config["inputs"][key] = _sha256_file(value)
            continue
        config[key.replace("_", "-")] = value
    return config


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _sha256_file(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _write_csv(path: str, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow(row)


def load_function(path: str) -> FourierSeries:
    """Read a function spec; envelopes from construct/sample are accepted."""
    data = json.loads(Path(path).read_text())
    if "harmonics" in data:
        return FourierSeries.from_json_dict(data)
    if "result" in data and isinstance(data["result"], dict) and "function" in data["result"]:
        return FourierSeries.from_json_dict(data["result"]["function"])
    raise ValueError(f"{path}: not a function spec (no 'harmonics')")


def load_field(path: str) -> torus.TorusField:
    data = json.loads(Path(path).read_text())
    if "result" in data and isinstance(data["result"], dict) and "field" in data["result"]:
        data = data["result"]["field"]
    return torus.TorusField.from_json_dict(data)


def _parse_schedule(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


# -- handlers -------------------------------------------------------------------


def _cmd_census(args):
    f = load_function(args.input)
    family = dynamics.CircleMapFamily(f, args.r, args.a)
    census = dynamics.attractor_census(family, args.q_max, workers=args.workers)
    result = census.to_json_dict()
    rows = [["r", "a", "count"], [args.r, args.a, census.total_attracting]]
    plot_fn = _census_plotter(result)
    return result, census.flags, rows, plot_fn


def _census_plotter(result):
    def render(path):
        from . import plots
        plots.save_census_figure(result, path)
    return render


def _cmd_probe(args):
    f = load_function(args.input)
    schedule = _parse_schedule(args.a_schedule)
    report = dynamics.cyclicity_probe(f, args.p, args.q, schedule,
                                      r_points=args.r_grid, workers=args.workers)
    flags = [] if report.stabilized else ["not stabilized"]
    rows = [["r", "a", "count"]] + [list(row) for row in report.rows()]

    def render(path):
        from . import plots
        plots.save_probe_figure(report, path)

    return report.to_json_dict(), flags, rows, render


def _cmd_certify(args):
    from . import sturm
    phi = load_function(args.input)
    flags = []
    try:
        observed = sturm.sign_changes(phi)
    except sturm.IndeterminateSignError:
        observed = None
        flags.append("indeterminate")
    certified = sturm.certified_lower_bound(phi)
    result = {"n": certified // 2, "certified": certified, "observed": observed}
    return result, flags, None, None


def _cmd_construct(args):
    f = load_function(args.input)
    if args.kind == "force-attractors":
        if args.d is None or args.c is None:
            raise ValueError("force-attractors needs --d and --c")
        out = constructions.force_attractors(f, args.d, args.c, N=args.N)
        n_used = args.N if args.N is not None else f.degree
        predicted = dynamics.predicted_attractors(out, n_used + 1)
        result = {"function": out.to_json_dict(), "kind": args.kind,
                  "predicted_attractors": predicted.count,
                  "period": n_used + 1}
    else:
        if args.N is None or args.delta is None:
            raise ValueError("porous-center needs --N and --delta")
        fhat, c, d = constructions.porous_center(f, args.N, args.k, args.delta)
        result = {"function": fhat.to_json_dict(), "kind": args.kind,
                  "c": c, "d": d}
    return result, [], None, None


def _sampler_config(args) -> constructions.SamplerConfig:
    return constructions.SamplerConfig(kind=args.kind, N=args.N, k=args.k,
                                       delta=args.delta, m_trunc=args.m_trunc,
                                       seed=args.seed)


def _cmd_sample(args):
    config = _sampler_config(args)
    sample = config.sample(stream=args.stream)
    result = {"function": sample.to_json_dict(), "kind": config.kind,
              "band_limit": sample.band_limit, "tail_ratio": config.tail_ratio}
    return result, [], None, None


def _cmd_prevalence(args):
    config = _sampler_config(args)
    shift = load_function(args.shift) if args.shift else FourierSeries.zero()
    summary = constructions.prevalence_monte_carlo(config, shift, args.trials,
                                                   workers=args.workers)
    result = {
        "kind": summary.kind,
        "trials": summary.trials,
        "escaped": summary.escaped,
        "fraction": summary.fraction,
        "ci95": [summary.ci_low, summary.ci_high],
        "predicted": summary.predicted,
    }
    rows = [["seed", "inequality_value", "escaped"]]
    rows += [[row.stream, row.inequality_value, int(row.escaped)] for row in summary.rows]

    def render(path):
        from . import plots
        plots.save_prevalence_figure(summary, path)

    return result, [], rows, render


def _cmd_torus_check(args):
    V = load_field(args.input)
    reduced = torus.reduced_series(V)
    quad = torus.reduced_series_quadrature(V)
    err = max(abs(reduced.coeff(n) - quad.coeff(n))
              for n in range(-max(reduced.band_limit, quad.band_limit),
                             max(reduced.band_limit, quad.band_limit) + 1))
    result = {"reduced": reduced.to_json_dict(), "crosscheck_error": float(err),
              "alpha": V.alpha, "a": V.a}
    flags = []
    slope_report = None
    if args.a_schedule:
        slope_report = torus.poincare_first_order_check(
            V, _parse_schedule(args.a_schedule), steps_per_crossing=args.steps)
        result["slope"] = slope_report.to_json_dict()
        if slope_report.degenerate:
            flags.append("degenerate (zero field)")
    if args.q_max:
        census = torus.limit_cycle_census(V, args.q_max, steps_per_crossing=args.steps)
        result["census"] = census.to_json_dict(include_orbits=False)
        flags.extend(census.flags)

    def render(path):
        from . import plots
        if slope_report is not None:
            plots.save_slope_figure(slope_report, path)
        else:
            plots.save_census_figure(result.get("census", {"keys": [], "r": 0, "a": 0,
                                                           "total_attracting": 0}), path)

    return result, flags, None, render


def _cmd_lemma_check(args):
    g = load_function(args.input)
    lo, hi, count = args.r_range.split(":")
    r_values = np.linspace(float(lo), float(hi), int(count))
    phase = (float(np.cos(args.phase)), float(np.sin(args.phase)))
    report = bounds.cos_lemma_check(args.n, args.delta, g, r_values, phase=phase)
    flags = ["margin exceeded"] if report.margin_exceeded else []
    if report.violations:
        flags.append("bound violated")
    rows = [["r", "count"]] + [[r, c] for r, c in zip(report.r_values, report.counts)]

    def render(path):
        from . import plots
        plots.save_lemma_figure(report, report.r_values, report.counts, path)

    return report.to_json_dict(), flags, rows, render


_HANDLERS = {
    "census": _cmd_census,
    "probe": _cmd_probe,
    "certify": _cmd_certify,
    "construct": _cmd_construct,
    "sample": _cmd_sample,
    "prevalence": _cmd_prevalence,
    "torus-check": _cmd_torus_check,
    "lemma-check": _cmd_lemma_check,
}


if __name__ == "__main__":
    raise SystemExit(main())
