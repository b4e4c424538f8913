"""Command-line front door.

Subcommands: gamma, moments, check, mc, study, estimate.  A JSON config file
(`--config`) may supply any study option; command-line flags override file
values.  The environment variable QVAR_OUT supplies the default output
directory.  Exit codes: 0 success, 2 configuration/usage error, 3 numerical
error (e.g. a covariance matrix that is not positive semidefinite).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__, estimators, kernels, limits, montecarlo, schemes, spectral
from .errors import NumericalError, QvarError
from .partitions import make_uniform, parse_partition

CONFIG_VERSION = 1

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _default_out():
    return os.environ.get("QVAR_OUT", ".")


def _add_common(parser):
    parser.add_argument("--kernel", help="bm | fbm:H | subfbm:H | bifbm:H:K | tab:<csv>")
    parser.add_argument(
        "--scheme",
        default="first:phi=one",
        help="first:phi=pow:<g> | first:phi=one | begyn2 | gen-a:<a0,..,ap>:<step>",
    )
    parser.add_argument("--partition", help="uniform:n | perturbed:n:cap:seed | file:<csv>")
    parser.add_argument("--horizon", type=float, default=1.0, help="time horizon T")
    parser.add_argument("--out", default=None, help="output directory (default: $QVAR_OUT or .)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qvar",
        description="Quadratic-variation condition reports and Monte Carlo studies "
        "for Gaussian processes.",
    )
    parser.add_argument("--version", action="version", version=f"qvar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", help="write the covariance matrix of Y as dense CSV")
    _add_common(p)

    p = sub.add_parser("moments", help="write norm/moment report JSON for one level")
    _add_common(p)

    p = sub.add_parser("check", help="condition report across a schedule of levels")
    _add_common(p)
    p.add_argument("--levels", help="comma-separated n values, e.g. 16,64,256")

    p = sub.add_parser("mc", help="Monte Carlo statistics of V_n for one level")
    _add_common(p)
    p.add_argument("--replicates", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-replicates", action="store_true", help="also write raw V values CSV")

    p = sub.add_parser("study", help="full study: conditions + moments + Monte Carlo per level")
    _add_common(p)
    p.add_argument("--config", help="JSON config file; flags override file values")
    p.add_argument("--levels", help="comma-separated n values")
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--figures", action="store_true", help="render PNG figures of the trends")

    p = sub.add_parser("estimate", help="realized statistics / Hurst estimate from a path CSV")
    p.add_argument("--input", required=True, help="path CSV with header time,value")
    p.add_argument("--scheme", default="first:phi=one")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--levels", help="dyadic levels for the Hurst fit, e.g. 256,512,1024")
    p.add_argument("--partition", help="partition for a single realized statistic")
    p.add_argument("--kernel", help="kernel for schemes that need a normalization")
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--out", default=None)
    return parser


def _parse_levels(text):
    levels = [int(x) for x in str(text).split(",") if x.strip()]
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
        raise QvarError("levels must be a strictly increasing comma-separated list")
    return levels


def _require(args, name):
    value = getattr(args, name, None)
    if value is None:
        raise QvarError(f"--{name} is required for this command")
    return value


def _setup(args):
    kernel = kernels.parse_kernel(_require(args, "kernel"), horizon=args.horizon)
    scheme = schemes.parse_scheme(args.scheme)
    return kernel, scheme


def _outdir(args):
    out = args.out if args.out is not None else _default_out()
    os.makedirs(out, exist_ok=True)
    return out


def cmd_gamma(args):
    kernel, scheme = _setup(args)
    p = parse_partition(_require(args, "partition"), horizon=args.horizon)
    g = schemes.build_gamma(scheme, p, kernel)
    out = _outdir(args)
    path = os.path.join(out, "gamma.csv")
    g.to_csv(path)
    print(path)
    return 0


def cmd_moments(args):
    kernel, scheme = _setup(args)
    p = parse_partition(_require(args, "partition"), horizon=args.horizon)
    g = schemes.build_gamma(scheme, p, kernel)
    out = _outdir(args)
    path = os.path.join(out, "moments.json")
    spectral.report_json(g, path)
    print(path)
    return 0


def _schedule_reports(kernel, scheme, levels, horizon):
    reports = []
    gammas = []
    for n in levels:
        p = make_uniform(n, horizon)
        try:
            g = schemes.build_gamma(scheme, p, kernel)
        except NumericalError as exc:
            raise NumericalError(f"level n={n}: {exc}") from exc
        reports.append(limits.condition_report(n, g))
        gammas.append((n, g))
    return reports, gammas


def cmd_check(args):
    kernel, scheme = _setup(args)
    levels = _parse_levels(_require(args, "levels"))
    reports, gammas = _schedule_reports(kernel, scheme, levels, args.horizon)
    _, verdict = limits.as_classify(gammas) if len(gammas) >= 2 else (None, "no_conclusion")
    out = _outdir(args)
    if args.format == "csv":
        path = os.path.join(out, "conditions.csv")
        limits.reports_to_csv(reports, path)
    else:
        path = os.path.join(out, "conditions.json")
        limits.reports_to_json(reports, path)
    print(f"{path}\nas_verdict: {verdict}")
    return 0


def cmd_mc(args):
    kernel, scheme = _setup(args)
    p = parse_partition(_require(args, "partition"), horizon=args.horizon)
    g = schemes.build_gamma(scheme, p, kernel)
    mr = spectral.qv_moments(g)
    cfg = montecarlo.McConfig(replicates=args.replicates, seed=args.seed)
    vs = montecarlo.sample_v_replicates(g, cfg)
    result = montecarlo.empirical_stats(vs, center=mr.mean_vn, scale=np.sqrt(mr.var_vn))
    out = _outdir(args)
    path = os.path.join(out, "mc.json")
    result.to_json(path)
    if args.dump_replicates:
        np.savetxt(os.path.join(out, "replicates.csv"), vs, delimiter=",")
    print(path)
    return 0


def _load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise QvarError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise QvarError("config must be a JSON object")
    version = doc.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise QvarError(f"unsupported config version {version}")
    return doc


_STUDY_DEFAULTS = {
    "scheme": "first:phi=one",
    "horizon": 1.0,
    "replicates": 10000,
    "seed": 0,
    "format": "csv",
    "figures": False,
}


def _merge_study_options(args):
    cfg = _load_config(args.config) if args.config else {}
    merged = dict(_STUDY_DEFAULTS)
    merged.update({k: v for k, v in cfg.items() if k != "version"})
    overrides = {
        "kernel": args.kernel,
        "scheme": args.scheme if args.scheme != "first:phi=one" else None,
        "levels": args.levels,
        "horizon": args.horizon if args.horizon != 1.0 else None,
        "replicates": args.replicates,
        "seed": args.seed,
        "out": args.out,
        "format": args.format if args.format != "csv" else None,
        "figures": args.figures or None,
    }
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if "kernel" not in merged:
        raise QvarError("study needs a kernel (config key 'kernel' or --kernel)")
    if "levels" not in merged:
        raise QvarError("study needs levels (config key 'levels' or --levels)")
    if isinstance(merged["levels"], str):
        merged["levels"] = _parse_levels(merged["levels"])
    levels = [int(n) for n in merged["levels"]]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise QvarError("levels must be strictly increasing")
    merged["levels"] = levels
    return merged


def cmd_study(args):
    opts = _merge_study_options(args)
    kernel = kernels.parse_kernel(opts["kernel"], horizon=float(opts["horizon"]))
    scheme = schemes.parse_scheme(opts["scheme"])
    levels = opts["levels"]
    reports, gammas = _schedule_reports(kernel, scheme, levels, float(opts["horizon"]))
    _, verdict = limits.as_classify(gammas) if len(gammas) >= 2 else (None, "no_conclusion")

    moments_doc = {}
    mc_doc = {}
    for n, g in gammas:
        moments_doc[str(n)] = spectral.report_json(g)
        mr = spectral.qv_moments(g)
        cfg = montecarlo.McConfig(replicates=int(opts["replicates"]), seed=int(opts["seed"]))
        vs = montecarlo.sample_v_replicates(g, cfg)
        mc_doc[str(n)] = montecarlo.empirical_stats(
            vs, center=mr.mean_vn, scale=float(np.sqrt(mr.var_vn))
        ).to_json()

    out = opts.get("out") or _default_out()
    os.makedirs(out, exist_ok=True)
    written = []

    cond_path = os.path.join(out, "conditions.csv")
    limits.reports_to_csv(reports, cond_path)
    written.append(cond_path)
    if opts["format"] == "json":
        jpath = os.path.join(out, "conditions.json")
        limits.reports_to_json(reports, jpath)
        written.append(jpath)

    mpath = os.path.join(out, "moments.json")
    with open(mpath, "w") as fh:
        json.dump(moments_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(mpath)

    mcpath = os.path.join(out, "mc.json")
    with open(mcpath, "w") as fh:
        json.dump(mc_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(mcpath)

    if opts.get("figures"):
        from . import report

        written.extend(report.render_study_figures(reports, out))

    canonical = {k: opts[k] for k in sorted(opts) if k != "out"}
    config_hash = hashlib.sha256(json.dumps(canonical, sort_keys=True).encode()).hexdigest()
    manifest = {
        "config": canonical,
        "config_sha256": config_hash,
        "seed": int(opts["seed"]),
        "as_verdict": verdict,
        "tool_version": __version__,
    }
    man_path = os.path.join(out, "manifest.json")
    with open(man_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(man_path)

    for path in written:
        print(path)
    print(f"as_verdict: {verdict}")
    return 0


def cmd_estimate(args):
    path_sample = estimators.path_from_csv(args.input)
    scheme = schemes.parse_scheme(args.scheme)
    out = args.out if args.out is not None else _default_out()
    os.makedirs(out, exist_ok=True)
    doc = {}
    horizon = args.horizon if args.horizon is not None else float(path_sample.times[-1])
    if args.partition:
        kernel = (
            kernels.parse_kernel(args.kernel, horizon=horizon) if args.kernel else None
        )
        p = parse_partition(args.partition, horizon=horizon)
        doc["realized_stat"] = estimators.realized_stat(
            path_sample, scheme, p, alpha=args.alpha, kernel_for_normalization=kernel
        )
        doc["alpha"] = args.alpha
    if args.levels:
        report = estimators.hurst_estimate(path_sample, _parse_levels(args.levels), scheme)
        doc["hurst"] = report.to_json()
    if not doc:
        raise QvarError("estimate needs --partition and/or --levels")
    out_path = os.path.join(out, "estimate.json")
    with open(out_path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(out_path)
    return 0


_COMMANDS = {
    "gamma": cmd_gamma,
    "moments": cmd_moments,
    "check": cmd_check,
    "mc": cmd_mc,
    "study": cmd_study,
    "estimate": cmd_estimate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QvarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
