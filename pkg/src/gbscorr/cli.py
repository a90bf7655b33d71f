"""Command-line entry point: ``gbscorr <subcommand> [flags]``.

Exit codes: 0 success, 2 parameter error, 3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import bench
from ._version import __version__
from .correlator import SignatureSummary
from .errors import NumericalDomainError, ParameterError, UnsupportedFeatureError

DEFAULT_PARAMS = {
    "squeezed": [bench.squeezing_for_mean_photon(1.0)],
    "thermal": [1.0],
    "coherent": [1.0],
    "classical": [3.0, 1.0],
    "vacuum": [],
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _csv(header: List[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _summary_rows(summary: SignatureSummary, label: str):
    return [
        (label, name, summary.value(name), summary.stderr(name))
        for name in ("m1", "m2", "m3", "nm", "cv", "sk")
    ]


def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--modes", type=int, help="number of modes M")
    p.add_argument("--occupied", type=int, help="number of occupied inputs N")
    p.add_argument("--family", choices=["squeezed", "thermal", "coherent", "classical", "vacuum"])
    p.add_argument(
        "--param", type=float, nargs="+",
        help="family parameter: r | nbar | alpha (re [im]) | v_q v_p",
    )
    p.add_argument("--eta", type=float, help="quantum efficiency in [0, 1]")
    p.add_argument("--nu", type=float, help="additive noise on occupied inputs")
    p.add_argument("--trials", type=int, help="number of Haar trials")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--nmax", type=int, help="photon-number cutoff")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], help="output format")
    p.add_argument("--config", help="JSON config file; flags override its values")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="gbscorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("sweep", parents=[common], help="correlator samples C_{0,1} over Haar trials")

    p = sub.add_parser("signatures", parents=[common], help="NM, CV, Sk estimates with analytic references")
    p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap rounds")
    p.add_argument("--error-method", choices=["bootstrap", "delta"], default="bootstrap")
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("analytic", parents=[common], help="closed-form moments and signatures")

    p = sub.add_parser("discriminate", parents=[common], help="3-sigma test between two families")
    p.add_argument("--family-b", choices=["squeezed", "thermal"], default="thermal")
    p.add_argument("--mean-photon", type=float, default=1.0, help="matched mean photon number per input")
    p.add_argument("--statistic", choices=["nm", "cv", "sk"], default="nm")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--bootstrap", type=int, default=1000)
    p.add_argument("--paired", action="store_true", help="use the same unitaries for both families")

    p = sub.add_parser("dilution", parents=[common], help="NM at fixed total photon number versus N")
    p.add_argument("--n-total", type=_floats, default=[1.0, 2.0, 3.0, 4.0])
    p.add_argument("--occupied-list", type=_ints, default=[1, 2, 4])

    p = sub.add_parser("heatmap", parents=[common], help="analytic signatures over (r, eta) or (r, nu)")
    p.add_argument("--r-values", type=_floats, default=list(np.linspace(0.0, 1.5, 16)))
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--eta-values", type=_floats)
    grid.add_argument("--nu-values", type=_floats)

    sub.add_parser("truncation", parents=[common], help="cutoff needed for 1e-3 agreement per trial")
    sub.add_parser("allpairs", parents=[common], help="all output pairs of one fixed network")
    return parser


def config_from_args(args: argparse.Namespace) -> bench.ExperimentConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParameterError("config file must hold a JSON object")
        for key in ("out", "format"):
            if key in data and getattr(args, key) is None:
                setattr(args, key, data[key])
            data.pop(key, None)
    overrides = {
        "modes": args.modes, "occupied": args.occupied, "family": args.family,
        "param": args.param, "eta": args.eta, "nu": args.nu, "trials": args.trials,
        "master_seed": args.seed, "n_max": args.nmax,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    data["kind"] = args.command
    if "param" not in data:
        data["param"] = DEFAULT_PARAMS[data.get("family", "squeezed")]
    return bench.ExperimentConfig.from_dict(data)


def _run(args: argparse.Namespace) -> str:
    cfg = config_from_args(args)
    fmt = args.format or ("csv" if args.command == "sweep" else "json")
    cmd = args.command

    if cmd == "sweep":
        samples = bench.run_correlator_sweep(cfg)
        if fmt == "csv":
            return _csv(["trial", "C12"], zip(samples.trial_indices.tolist(), samples.values.tolist()))
        return _dump_json({
            "software_version": __version__, "config": cfg.to_dict(),
            "trials": samples.trial_indices, "C12": samples.values,
        })

    if cmd == "signatures":
        exp = bench.run_signature_experiment(cfg, args.bootstrap, method=args.error_method, workers=args.workers)
        if fmt == "csv":
            rows = _summary_rows(exp.estimate, "estimate") + _summary_rows(exp.analytic, "analytic")
            return _csv(["source", "quantity", "value", "stderr"], rows)
        return _dump_json(exp.to_json())

    if cmd == "analytic":
        summary = bench.analytic_reference(cfg)
        if fmt == "csv":
            return _csv(["source", "quantity", "value", "stderr"], _summary_rows(summary, "analytic"))
        return _dump_json({
            "software_version": __version__, "config": cfg.to_dict(),
            "analytic": bench._signature_block(summary),
        })

    if cmd == "discriminate":
        common = dict(modes=cfg.modes, occupied=cfg.occupied, eta=cfg.eta, nu=cfg.nu,
                      trials=cfg.trials, master_seed=cfg.master_seed, kind="discriminate")
        family_a = args.family or "squeezed"
        a = bench.ExperimentConfig.matched(family_a, args.mean_photon, **common)
        b = bench.ExperimentConfig.matched(args.family_b, args.mean_photon, **common)
        reports = bench.repeated_discrimination(a, b, cfg.trials, args.repeats, args.statistic, args.bootstrap) \
            if args.repeats > 1 else [bench.run_discrimination(
                a, b, cfg.trials, args.statistic, args.bootstrap, paired=args.paired)]
        if fmt == "csv":
            rows = [(i, r.delta, r.sigma_delta, r.significance, int(r.distinguishable))
                    for i, r in enumerate(reports)]
            return _csv(["run", "delta", "sigma_delta", "significance", "distinguishable"], rows)
        return _dump_json({
            "runs": [r.to_json() for r in reports],
            "significant_runs": sum(r.distinguishable for r in reports),
        })

    if cmd == "dilution":
        family = cfg.family if cfg.family in ("squeezed", "thermal") else "squeezed"
        trials = cfg.trials if args.trials is not None else 0
        rep = bench.run_dilution_study(
            cfg.modes, family, args.n_total, args.occupied_list, cfg.eta, cfg.nu, trials, cfg.master_seed
        )
        if fmt == "csv":
            rows = [(nt, N, float(rep.nm[a, b]))
                    for a, nt in enumerate(rep.n_totals) for b, N in enumerate(rep.occupied)]
            return _csv(["n_total", "occupied", "nm"], rows)
        return _dump_json(rep.to_json())

    if cmd == "heatmap":
        eta_values = args.eta_values
        if eta_values is None and args.nu_values is None:
            eta_values = list(np.linspace(0.05, 1.0, 20))
        hm = bench.run_heatmap(cfg.modes, cfg.occupied, args.r_values, eta_values, args.nu_values)
        if fmt == "csv":
            rows = [(float(r), float(x), float(hm.nm[a, b]), float(hm.cv[a, b]), float(hm.sk[a, b]))
                    for a, r in enumerate(hm.r_values) for b, x in enumerate(hm.channel_values)]
            return _csv(["r", hm.axis, "nm", "cv", "sk"], rows)
        return _dump_json(hm.to_json())

    if cmd == "truncation":
        rep = bench.run_truncation_study(cfg)
        if fmt == "csv":
            return _csv(["index", "threshold_n_max"], enumerate(rep.thresholds.tolist()))
        return _dump_json(rep.to_json())

    if cmd == "allpairs":
        res = bench.run_all_pairs(cfg)
        if fmt == "csv":
            rows = [(int(j), int(k), float(c)) for (j, k), c in zip(res.pairs, res.values)]
            return _csv(["j", "k", "C"], rows)
        return _dump_json({
            "software_version": __version__, "config": cfg.to_dict(), "trial": res.trial,
            "pairs": res.pairs, "C": res.values,
        })

    raise ParameterError(f"unknown command {cmd!r}")  # pragma: no cover


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = _run(args)
    except (ParameterError, UnsupportedFeatureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalDomainError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0
