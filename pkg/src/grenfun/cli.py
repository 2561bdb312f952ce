"""Command-line interface.

Subcommands: ``estimate`` (fit a data file and evaluate a functional,
optionally with a confidence interval), ``simulate`` (replication study
from a JSON config), ``limit-sample`` (draws of the limiting variable),
and ``uniform-clt`` (the uniform-truth standardized-statistic study).

Exit codes: 0 success, 2 configuration/input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .errors import InputError, NumericError
from .functionals import ScalarFunctional, by_name, mu_plugin, tau_plugin
from .grenander import fit
from .harness import StudyConfig, run_study, run_uniform_study
from .inference import ci_mu, normal_quantile, sigma_eff_tau
from .limitlaw import TrueModel, draw_y_samples, emit_y_csv
from .samples import ScenarioSpec, default_stream, read_observations


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grenfun",
        description="Grenander plug-in estimation of integrated functionals "
                    "of a nonincreasing density",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="override the seed of any config or scenario")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="directory for output files")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes for replication studies")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate a functional from a data file")
    est.add_argument("--data", required=True, type=Path,
                     help="file with one observation per line ('#' comments)")
    est.add_argument("--functional", required=True,
                     help="built-in functional name, e.g. power:2, xz2, identity")
    est.add_argument("--ci", type=float, default=None, metavar="LEVEL",
                     help="also report a confidence interval at this level")

    sim = sub.add_parser("simulate", help="run a replication study from JSON config")
    sim.add_argument("--config", required=True, type=Path)

    lim = sub.add_parser("limit-sample", help="sample the limiting variable")
    lim.add_argument("--config", required=True, type=Path,
                     help="JSON with scenario, functional, optional grid_size")
    lim.add_argument("--draws", required=True, type=int)

    uni = sub.add_parser("uniform-clt", help="uniform-truth CLT study")
    uni.add_argument("--h", required=True, dest="functional",
                     help="functional of the density alone, e.g. power:2")
    uni.add_argument("--n", required=True, type=int)
    uni.add_argument("--reps", required=True, type=int)
    return parser


def _cmd_estimate(args) -> int:
    sample = read_observations(args.data)
    fn = by_name(args.functional)
    density = fit(sample)
    result = {"functional": args.functional, "n": sample.n}
    if isinstance(fn, ScalarFunctional):
        result["estimate"] = mu_plugin(fn, density)
        if args.ci is not None:
            result["ci"] = ci_mu(fn, sample, args.ci).to_json()
    else:
        result["estimate"] = tau_plugin(fn, density)
        if args.ci is not None:
            sigma = math.sqrt(sigma_eff_tau(fn, sample, density))
            z = normal_quantile(0.5 + args.ci / 2.0)
            half = z * sigma / math.sqrt(sample.n)
            result["ci"] = {
                "estimate": result["estimate"],
                "lower": result["estimate"] - half,
                "upper": result["estimate"] + half,
                "level": args.ci, "sigma_hat": sigma, "n": sample.n,
                "degenerate": sigma == 0.0, "validity": "pointwise",
            }
    print(json.dumps(result, sort_keys=True))
    if args.out != Path("."):
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "estimate.json").write_text(json.dumps(result, sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_simulate(args) -> int:
    config = StudyConfig.from_json(args.config)
    if args.seed is not None:
        config = StudyConfig(config.scenario, config.functional, config.n_values,
                             config.replications, args.seed, config.grid_size,
                             config.reference_draws)
    reports = run_study(config, threads=args.threads, out_dir=args.out)
    for report in reports:
        print(json.dumps(report.to_json(), sort_keys=True))
    return 0


def _cmd_limit_sample(args) -> int:
    try:
        obj = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.config}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "scenario" not in obj or "functional" not in obj:
        raise InputError("limit-sample config needs 'scenario' and 'functional'")
    spec = ScenarioSpec.from_json(obj["scenario"])
    fn = by_name(obj["functional"])
    if isinstance(fn, ScalarFunctional):
        fn = fn.as_smooth()
    grid_size = int(obj.get("grid_size", 1000))
    seed = args.seed if args.seed is not None else obj.get("seed", spec.seed or 0)
    model = TrueModel.from_scenario(spec)
    ys, info = draw_y_samples(fn, model, grid_size, args.draws, default_stream(seed))
    info["seed"] = int(seed)
    args.out.mkdir(parents=True, exist_ok=True)
    slug = obj["functional"].replace(":", "")
    path = args.out / f"{spec.kind}_{slug}_y.csv"
    emit_y_csv(path, ys, info)
    print(json.dumps({"file": str(path), "draws": len(ys),
                      "mean": float(ys.mean()), "variance": float(ys.var(ddof=1)),
                      "tail_bound": info["tail_bound"]}, sort_keys=True))
    return 0


def _cmd_uniform_clt(args) -> int:
    seed = args.seed if args.seed is not None else 0
    reports = run_uniform_study(args.functional, [args.n], args.reps,
                                seed, threads=args.threads, out_dir=args.out)
    for report in reports:
        print(json.dumps(report.to_json(), sort_keys=True))
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "simulate": _cmd_simulate,
    "limit-sample": _cmd_limit_sample,
    "uniform-clt": _cmd_uniform_clt,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())
