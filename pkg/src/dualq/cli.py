"""Command-line interface.

Subcommands:

* emulate: one seeded run written to a run directory.
* batch: a corpus of seeded runs with a hash manifest.
* validate: equivalence test between two corpora.
* bootstrap: confidence intervals for the exceedance proportion.
* sweep: one AQM parameter across values, a corpus per value.
* presets: list operating points and parameter sets.

Exit codes: 0 success, 1 configuration error, 2 runtime error,
3 statistical check undefined (corpus too small for within-group
distances).
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import (
    PARAM_SETS,
    PRESETS,
    ConfigError,
    ScenarioConfig,
    apply_overrides,
    build_scenario,
    parse_flow_shorthand,
    preset_sections,
    sections_from_ini,
)
from .metrics import write_run_dir
from .runner import (
    RunnerError,
    load_corpus,
    prepare_out_dir,
    resolve_out,
    run_batch,
    run_one,
)
from .stats.report import write_bootstrap_results, write_ci_width, write_test_results
from .stats.testing import (
    DegenerateGroupsError,
    METRICS,
    bootstrap_exceedance,
    build_distances,
    ci_width_curve,
    exceedance_test,
    extract_observations,
    quantile,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_UNDEFINED = 3

SWEEP_PARAMS = {
    "step_thresh_ms": ("aqm", "step_thresh_ms"),
    "target_ms": ("aqm", "target_ms"),
    "tupdate_ms": ("aqm", "tupdate_ms"),
    "alpha": ("aqm", "alpha"),
    "beta": ("aqm", "beta"),
    "coupling_k": ("aqm", "coupling_k"),
    "classic_protection": ("aqm", "classic_protection"),
}


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario INI file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="operating point")
    p.add_argument(
        "--params",
        choices=PARAM_SETS,
        default="default",
        help="AQM parameter set for presets",
    )
    p.add_argument(
        "--flows",
        default="scalable",
        help="flow kinds for presets, e.g. scalable or scalable+cubic",
    )
    p.add_argument(
        "--mode", choices=["bursty", "smooth"], default="bursty",
        help="link service discipline for presets",
    )
    p.add_argument(
        "--duration", type=float, default=30.0, help="run length in seconds"
    )
    p.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        dest="overrides",
        help="override any config value",
    )


def _scenario_from_args(args) -> ScenarioConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        sections = sections_from_ini(args.config)
        sections.setdefault("run", {}).setdefault("duration_s", repr(args.duration))
    elif args.preset:
        sections = preset_sections(
            args.preset,
            params=args.params,
            flows=parse_flow_shorthand(args.flows),
            mode=args.mode,
            duration_s=args.duration,
        )
    else:
        raise ConfigError("choose a scenario with --preset or --config")
    apply_overrides(sections, args.overrides)
    return build_scenario(sections)


def _parse_metrics(raw: str) -> list[str]:
    names = [m.strip() for m in raw.split(",") if m.strip()]
    if not names:
        raise ConfigError("empty metric list")
    for name in names:
        if name not in METRICS:
            raise ConfigError(
                f"unknown metric {name!r}, expected one of {sorted(METRICS)}"
            )
    return names


def _load_two_corpora(args):
    records_m = load_corpus(args.corpus_m)
    records_k = load_corpus(args.corpus_k)
    return records_m, records_k


def cmd_emulate(args) -> int:
    cfg = _scenario_from_args(args)
    out_dir = prepare_out_dir(args.out, args.force)
    record = run_one(cfg, args.seed, run_id=os.path.basename(out_dir.rstrip("/")))
    write_run_dir(record, out_dir)
    print(f"run written to {out_dir}")
    print(f"  seed {args.seed}  fingerprint {record.fingerprint[:16]}")
    print(f"  avg throughput {record.avg_throughput_mbps:.3f} Mbps")
    for f in record.flows:
        print(f"  flow {f.flow} ({f.kind}): {f.mbps:.3f} Mbps")
    return EXIT_OK


def cmd_batch(args) -> int:
    cfg = _scenario_from_args(args)
    corpus_dir = run_batch(
        cfg,
        runs=args.runs,
        seed_base=args.seed_base,
        out_dir=args.out,
        parallel=args.parallel,
        force=args.force,
    )
    print(f"corpus of {args.runs} runs written to {corpus_dir}")
    print(f"  seeds {args.seed_base}..{args.seed_base + args.runs - 1}")
    print(f"  fingerprint {cfg.fingerprint()[:16]}")
    return EXIT_OK


def cmd_validate(args) -> int:
    records_m, records_k = _load_two_corpora(args)
    metrics = _parse_metrics(args.metrics)
    out_dir = prepare_out_dir(args.out, args.force)
    results = []
    distances = {}
    for name in metrics:
        obs_m = extract_observations(records_m, name)
        obs_k = extract_observations(records_k, name)
        kind = METRICS[name].kind
        ds = build_distances(obs_m, obs_k, kind, band=args.band)
        res = exceedance_test(ds, metric=name, kind=kind)
        results.append(res)
        distances[name] = ds
        verdict = "equivalent" if res.reject_h0 else "not equivalent"
        print(
            f"{name}: eps_max={res.eps_max:.6g} p_hat={res.p_hat_max:.6g} "
            f"-> {verdict}"
        )
    write_test_results(
        out_dir,
        results,
        distances,
        corpora={"m": resolve_out(args.corpus_m), "k": resolve_out(args.corpus_k)},
    )
    print(f"report written to {out_dir}")
    return EXIT_OK


def cmd_bootstrap(args) -> int:
    records_m, records_k = _load_two_corpora(args)
    metrics = _parse_metrics(args.metrics)
    out_dir = prepare_out_dir(args.out, args.force)
    results = []
    width_rows = []
    sizes = None
    if args.ci_width:
        sizes = [int(s) for s in args.ci_width.split(",") if s.strip()]
    for name in metrics:
        obs_m = extract_observations(records_m, name)
        obs_k = extract_observations(records_k, name)
        kind = METRICS[name].kind
        ds = build_distances(obs_m, obs_k, kind, band=args.band)
        res = bootstrap_exceedance(
            ds, B=args.replicates, seed=args.resample_seed, metric=name
        )
        results.append(res)
        print(
            f"{name}: p_hat={res.p_hat_point:.6g} "
            f"ci=[{res.ci_lo:.6g}, {res.ci_hi:.6g}] "
            f"significant={'yes' if res.significant else 'no'}"
        )
        if sizes:
            width_rows.extend(
                ci_width_curve(
                    ds, sizes, B=args.replicates, seed=args.resample_seed,
                    metric=name,
                )
            )
    files = write_bootstrap_results(
        out_dir,
        results,
        corpora={"m": resolve_out(args.corpus_m), "k": resolve_out(args.corpus_k)},
    )
    if width_rows:
        files += write_ci_width(out_dir, width_rows)
    print(f"report written to {out_dir} ({', '.join(files)})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.param not in SWEEP_PARAMS:
        raise ConfigError(
            f"unknown sweep parameter {args.param!r}, "
            f"expected one of {sorted(SWEEP_PARAMS)}"
        )
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("empty sweep value list")
    for v in values:
        try:
            float(v)
        except ValueError:
            raise ConfigError(f"sweep value {v!r} is not a number") from None
    out_dir = prepare_out_dir(args.out, args.force)
    section, key = SWEEP_PARAMS[args.param]
    summary = ["param,value,runs,mean_mbps,p2_5_mbps,p97_5_mbps"]
    for v in values:
        sweep_args = argparse.Namespace(**vars(args))
        sweep_args.overrides = list(args.overrides) + [f"{section}.{key}={v}"]
        cfg = _scenario_from_args(sweep_args)
        sub = os.path.join(out_dir, f"{args.param}-{v}")
        run_batch(
            cfg,
            runs=args.runs,
            seed_base=args.seed_base,
            out_dir=sub,
            parallel=args.parallel,
            force=True,
        )
        records = load_corpus(sub)
        rates = [r.avg_throughput_mbps for r in records]
        mean = sum(rates) / len(rates)
        lo = quantile(rates, 0.025) if len(rates) > 1 else rates[0]
        hi = quantile(rates, 0.975) if len(rates) > 1 else rates[0]
        summary.append(f"{args.param},{v},{len(rates)},{mean!r},{lo!r},{hi!r}")
        print(f"{args.param}={v}: mean {mean:.3f} Mbps  [{lo:.3f}, {hi:.3f}]")
    with open(os.path.join(out_dir, "sweep_summary.csv"), "w", encoding="ascii") as fh:
        fh.write("\n".join(summary) + "\n")
    print(f"sweep written to {out_dir}")
    return EXIT_OK


def cmd_presets(args) -> int:
    print("operating points:")
    for name in ("low", "medium", "high"):
        p = PRESETS[name]
        print(
            f"  {name:<8} {p.rate_bps / 1e6:6.0f} Mbps  base RTT {p.rtt_ms:5.1f} ms"
        )
    print("parameter sets:")
    print("  default  step threshold 1 ms, target 15 ms")
    print("  refined  step 5 ms / target 30 ms (low, medium); 10 ms / 45 ms (high)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualq",
        description="dual-queue AQM link emulator and equivalence statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emulate", help="run one seeded emulation")
    _add_scenario_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="run directory")
    p.add_argument("--force", action="store_true", help="replace existing output")
    p.set_defaults(func=cmd_emulate)

    p = sub.add_parser("batch", help="run a corpus of seeded emulations")
    _add_scenario_args(p)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out", required=True, help="corpus directory")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("validate", help="equivalence test between two corpora")
    p.add_argument("corpus_m", help="reference corpus directory")
    p.add_argument("corpus_k", help="candidate corpus directory")
    p.add_argument("--metrics", default="throughput")
    p.add_argument("--band", type=int, default=None,
                   help="optional Sakoe-Chiba band for time-series distances")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bootstrap", help="bootstrap CIs for the exceedance rate")
    p.add_argument("corpus_m")
    p.add_argument("corpus_k")
    p.add_argument("--metrics", default="throughput")
    p.add_argument("--replicates", "-B", type=int, default=2000)
    p.add_argument("--resample-seed", type=int, default=0)
    p.add_argument("--ci-width", default=None, metavar="N1,N2,...",
                   help="also compute CI width at these corpus sizes")
    p.add_argument("--band", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("sweep", help="sweep one AQM parameter")
    _add_scenario_args(p)
    p.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS))
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("presets", help="list operating points")
    p.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateGroupsError as exc:
        print(f"check undefined: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except RunnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
