"""Command line: ``resetmon run | validate | bench-family``."""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

from .core import build_product, p_min
from .errors import ConfigurationError, GenerationError, ParseError, PreconditionError
from .graph import (satisfaction_probability, scc_decompose, structural_params,
                    theoretical_bounds)
from .harness import DEFAULT_MAX_STEPS, ExperimentConfig, log2_slope, run_trials
from .models import resolve_model, resolve_property
from .monitors import MonitorConfig, MonitorKind, Schedule, alpha0
from .report import emit_report

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_DEGENERATE = 0, 2, 3, 4


def _monitor_config(args, pmin: float) -> MonitorConfig:
    kind = MonitorKind(args.monitor)
    if kind is MonitorKind.CAUTIOUS:
        return MonitorConfig(kind)
    if kind is MonitorKind.BOLD_FIXED:
        alpha = args.alpha if args.alpha is not None else alpha0(pmin)
        return MonitorConfig(kind, alpha=alpha, epsilon=args.epsilon, p_min=pmin)
    return MonitorConfig(kind, epsilon=args.epsilon, schedule=Schedule(args.schedule), p_min=pmin)


def _write(data: bytes, out: str):
    if out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)


def cmd_run(args) -> int:
    chain = resolve_model(args.model)
    product = build_product(chain, resolve_property(args.prop))
    config = ExperimentConfig(args.model, args.prop, _monitor_config(args, p_min(chain)),
                              args.trials, args.seed, args.max_steps)
    report = run_trials(product, config, workers=args.workers)
    _write(emit_report(report, args.format), args.out)
    if report.degenerate:
        print(f"warning: {report.aggregates['cutoff_fraction']:.0%} of trials hit the step cutoff",
              file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_validate(args) -> int:
    chain = resolve_model(args.model)
    product = build_product(chain, resolve_property(args.prop))
    dec = scc_decompose(product)
    params = structural_params(product, dec)
    p_phi = satisfaction_probability(product, dec)
    bottoms = []
    for c in dec.bottoms():
        members = dec.components[c]
        bottoms.append({"states": [product.name(i) for i in members],
                        "verdict": product.classify(members).value})
    info = {
        "product_states": params.n,
        "p_phi": p_phi,
        "p_min": params.p_min,
        "mxsc": params.mxsc,
        "alpha0": alpha0(params.p_min),
        "bsccs": bottoms,
    }
    if p_phi > 0:
        alpha = args.alpha if args.alpha is not None else alpha0(params.p_min)
        info["bounds"] = theoretical_bounds(params, p_phi, alpha, args.epsilon)._asdict()
        info["bounds"]["alpha"] = alpha
        info["bounds"]["epsilon"] = args.epsilon
    else:
        info["bounds"] = None
    print(json.dumps(info, indent=2))
    return EXIT_OK


def _n_range(text: str) -> range:
    try:
        lo, hi = text.split("..")
        r = range(int(lo), int(hi) + 1)
    except ValueError:
        raise ConfigurationError(f"--n-range expects a..b, got {text!r}") from None
    if not r:
        raise ConfigurationError(f"empty range {text!r}")
    return r


def cmd_bench(args) -> int:
    rows = []
    degenerate = False
    prop = args.prop
    for n in _n_range(args.n_range):
        model = f"builtin:{args.family}:{n}"
        chain = resolve_model(model)
        product = build_product(chain, resolve_property(prop))
        config = ExperimentConfig(model, prop, _monitor_config(args, p_min(chain)),
                                  args.trials, args.seed, args.max_steps)
        report = run_trials(product, config, workers=args.workers)
        agg = report.aggregates
        se = math.sqrt(agg["var_T"] / agg["n_trials"]) if agg["var_T"] is not None else None
        bound = None
        if report.bounds:
            bound = report.bounds["expected_steps_fixed"] or report.bounds["expected_steps_general"]
        degenerate |= report.degenerate
        rows.append({"family": args.family, "n": n, "monitor": args.monitor, "trials": args.trials,
                     "mean_R": agg["mean_R"], "mean_T": agg["mean_T"], "se_T": se,
                     "T_per_R": agg["T_per_R"], "bound_T": bound, "degenerate": report.degenerate})
    means = [r["mean_T"] for r in rows]
    slope = log2_slope([r["n"] for r in rows], means) if len(rows) > 1 and all(m and m > 0 for m in means) else None
    if args.format == "json":
        data = json.dumps({"schema": 1, "rows": rows, "log2_slope_T": slope}, indent=2) + "\n"
    else:
        cols = list(rows[0])
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join("-" if r[c] is None else repr(r[c]) if isinstance(r[c], float) else str(r[c])
                                  for c in cols))
        lines.append(f"#log2_slope_T,{'-' if slope is None else repr(slope)}")
        data = "\n".join(lines) + "\n"
    _write(data.encode("utf-8"), args.out)
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def _add_monitor_args(p):
    p.add_argument("--monitor", choices=[k.value for k in MonitorKind], default="bold")
    p.add_argument("--alpha", type=float, help="boldness (default: alpha0 of the model's p_min)")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--schedule", choices=[s.value for s in Schedule], default="linear")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resetmon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run monitored trials and emit a report")
    run.add_argument("--model", required=True)
    run.add_argument("--prop", required=True)
    _add_monitor_args(run)
    run.add_argument("--trials", type=int, required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", default="-")
    run.add_argument("--format", choices=["json", "csv"], default="json")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="print oracle quantities and theoretical bounds")
    val.add_argument("--model", required=True)
    val.add_argument("--prop", required=True)
    val.add_argument("--alpha", type=float)
    val.add_argument("--epsilon", type=float, default=0.5)
    val.set_defaults(func=cmd_validate)

    bench = sub.add_parser("bench-family", help="scaling table over a builtin family")
    bench.add_argument("family", choices=["fig1", "fig2"])
    bench.add_argument("--n-range", required=True, help="inclusive range a..b")
    bench.add_argument("--prop", default="prop:Fp")
    _add_monitor_args(bench)
    bench.add_argument("--trials", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--out", default="-")
    bench.add_argument("--format", choices=["json", "csv"], default="csv")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigurationError, GenerationError, PreconditionError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
