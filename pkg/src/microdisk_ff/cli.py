"""Command-line interface.

Exit status is 0 on success, 2 for configuration or argument errors and 3
for runtime or numerical failures.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from ._validation import InvalidParameterError, MicrodiskError, NearFieldFormatError
from .config import ConfigError, RunConfig, load_config
from .efficiency import EfficiencyReport
from .estimator import MicrodiskEmitter
from .lattice import hex_trace
from .nearfield import analytic_mode, import_nearfield, overlap_report
from .optimizer import RobustnessSpec, SweepSpec, refine_argmax, robustness, sweep
from .radiation import read_farfield, write_farfield

logger = logging.getLogger("microdisk_ff")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class UsageError(ConfigError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _na_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("NA list is empty")
    return vals


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    ff = {}
    if getattr(args, "na", None) is not None:
        ff["na"] = args.na
        if cfg.farfield["target_na"] not in args.na:
            ff["target_na"] = args.na[0]
    if getattr(args, "include_z", None) is not None:
        ff["include_z"] = args.include_z
    ref = {}
    if getattr(args, "reference", None) is not None:
        ref["path"] = str(Path(args.reference).resolve())
    sections = {}
    if ff:
        sections["farfield"] = ff
    if ref:
        sections["reference"] = ref
    if getattr(args, "seed", None) is not None:
        sections["robustness"] = {**(cfg.raw.get("robustness") or {}), "seed": args.seed}
    return cfg.with_overrides(**sections) if sections else cfg


def _load(args) -> RunConfig:
    return _apply_overrides(load_config(args.config), args)


def _estimator(cfg: RunConfig, threads: int) -> MicrodiskEmitter:
    params = cfg.estimator_params()
    if params["nearfield"] is not None:
        params["nearfield"] = import_nearfield(params["nearfield"])
    return MicrodiskEmitter(**params, threads=threads)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    start = time.perf_counter()
    cfg = _load(args)
    est = _estimator(cfg, args.threads)
    ref = cfg.reference
    reference = None
    if ref["path"] is not None:
        reference = read_farfield(cfg.resolve(ref["path"]))
    est.fit(reference=reference, theta_max=math.radians(ref["theta_max_deg"]), normalize=ref["normalize"])
    out = _out_dir(args)
    write_farfield(out / "farfield.txt", est.far_field_)
    em = cfg.emitter
    curve = est.collection_curve(cfg.farfield["na"])
    target = est.score()
    alpha = est.alpha_
    reports = [EfficiencyReport.build(em["purcell"], em["color_center"], c, na, alpha).to_dict() for na, c in curve]
    headline = EfficiencyReport.build(em["purcell"], em["color_center"], target, est.na, alpha)
    payload = {
        "config_hash": cfg.config_hash(),
        "dipole_count": len(est.dipoles_),
        "n_collect": est.n_collect,
        "nearfield": "analytic" if cfg.nearfield_path is None else "imported",
        "include_z": est.include_z,
        "purcell": em["purcell"],
        "color_center": em["color_center"],
        "eta_zpl": headline.eta_zpl,
        "eta_col": target,
        "eta": headline.eta,
        "na": est.na,
        "alpha": None if est.alpha_fit_ is None else est.alpha_fit_.to_dict(),
        "curve": reports,
    }
    if args.timing:
        payload["timing_s"] = time.perf_counter() - start
    _write_json(out / "report.json", payload)
    print(f"eta_col(NA={est.na:g}) = {target:.4f}   eta_ZPL = {headline.eta_zpl:.4f}   eta = {headline.eta:.4f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    sw = cfg.sweep
    spec = SweepSpec(sw["param"], sw["lo"], sw["hi"], sw["count"], sw["metric"])
    est = _estimator(cfg, 1)
    em = cfg.emitter
    result = sweep(spec, est, em["purcell"], em["color_center"], threads=args.threads)
    if sw["refine"]:
        try:
            refine_argmax(result, sw["rtol"])
        except MicrodiskError as exc:
            logger.warning("refinement skipped: %s", exc)
    out = _out_dir(args)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "value", "metric"])
        for p, x, y in result.rows():
            w.writerow([p, repr(x), repr(y)])
    summary = result.summary()
    summary["config_hash"] = cfg.config_hash()
    _write_json(out / "sweep_summary.json", summary)
    x, y = result.argmax
    print(f"argmax {spec.param} = {x:.6g} ({spec.metric} = {y:.4f})")
    if result.refined is not None:
        print(f"refined {spec.param} = {result.refined.value:.6g} ({spec.metric} = {result.refined.metric:.4f})")
    return EXIT_OK


def cmd_robustness(args) -> int:
    cfg = _load(args)
    rb = cfg.robustness
    if rb["seed"] is None:
        raise UsageError("a robustness run needs a seed (--seed or robustness.seed)")
    th = rb["thresholds"]
    thresholds = tuple(np.linspace(th["lo"], th["hi"], int(th["count"])))
    spec = RobustnessSpec(int(rb["seed"]), int(rb["count"]), rb["distributions"], thresholds)
    est = _estimator(cfg, 1)
    result = robustness(spec, est, threads=args.threads)
    out = _out_dir(args)
    cols = ["a", "r_h", "t", "u", "v", "u_reduced", "v_reduced", "u_canonical", "v_canonical"]
    with open(out / "robustness_samples.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", *cols, "eta_col", "error"])
        for i, (s, m) in enumerate(zip(result.samples, result.metrics)):
            w.writerow([i, *[repr(s[c]) if c in s else "" for c in cols], repr(float(m)), result.failures.get(i, "")])
    with open(out / "robustness_cumulative.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold", "fraction_above"])
        for t, f in zip(result.thresholds, result.fraction_above):
            w.writerow([repr(float(t)), repr(float(f))])
    summary = result.summary()
    summary["config_hash"] = cfg.config_hash()
    _write_json(out / "robustness_summary.json", summary)
    print(f"{summary['evaluated']} samples evaluated, {summary['failed']} failed, seed {result.seed}")
    return EXIT_OK


def cmd_fit_alpha(args) -> int:
    cfg = _load(args)
    ref = cfg.reference
    if ref["path"] is None:
        raise UsageError("fit-alpha needs a reference far field (--reference or reference.path)")
    reference = read_farfield(cfg.resolve(ref["path"]))
    est = _estimator(cfg, args.threads)
    theta_max = math.radians(args.theta_max if args.theta_max is not None else ref["theta_max_deg"])
    est.fit(reference=reference, theta_max=theta_max, normalize=ref["normalize"], grid=reference.grid)
    payload = est.alpha_fit_.to_dict()
    payload["config_hash"] = cfg.config_hash()
    _write_json(_out_dir(args) / "alpha_fit.json", payload)
    print(f"alpha = {payload['alpha']:.6g}   rmse = {payload['rmse']:.3g}   (theta <= {payload['theta_max_deg']:g} deg)")
    return EXIT_OK


def cmd_trace_info(args) -> int:
    cfg = load_config(args.config) if args.config else None
    a = args.a if args.a is not None else (cfg.lattice.a if cfg else 1.0)
    pts = hex_trace(args.n, a)
    dists = sorted({round(p.distance, 9) for p in pts})
    groups = [{"distance": d, "count": sum(1 for p in pts if abs(p.distance - d) < 1e-9)} for d in dists]
    payload = {
        "n": args.n,
        "a": a,
        "count": len(pts),
        "distance_groups": groups,
        "points": [{"x": p.x, "y": p.y, "distance": p.distance} for p in pts],
    }
    if cfg is not None:
        field = analytic_mode(cfg.disk, cfg.mode) if cfg.nearfield_path is None else import_nearfield(cfg.nearfield_path)
        mags = overlap_report(field, pts)
        for rec, mag in zip(payload["points"], mags):
            rec["overlap"] = float(mag)
        payload["config_hash"] = cfg.config_hash()
    lines = [f"hexagonal trace {args.n} (a = {a:g}): {len(pts)} points"]
    for g in groups:
        lines.append(f"  {g['count']:3d} at distance {g['distance']:.6f}")
    if cfg is not None:
        lines.append("  overlap |E| (normalized): " + ", ".join(f"{r['overlap']:.3f}" for r in payload["points"]))
    print("\n".join(lines))
    if args.out:
        _write_json(_out_dir(args) / f"trace_{args.n}.json", payload)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="microdisk-ff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, reference=True):
        p.add_argument("--config", default="optimized", help="JSON config path or bundled name (default: optimized)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--na", type=_na_list, default=None, help="comma-separated numerical apertures")
        p.add_argument("--include-z", type=_bool, default=None, dest="include_z")
        if reference:
            p.add_argument("--reference", default=None, help="reference far-field file")
        p.add_argument("--error-json", action="store_true", help="print errors as JSON on stdout")

    p = sub.add_parser("simulate", help="far field and efficiency report for one device")
    common(p)
    p.add_argument("--timing", action="store_true", help="add wall time to the report (breaks byte-reproducibility)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="one-parameter sweep with optional argmax refinement")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("robustness", help="Monte Carlo study over fabrication variations")
    common(p)
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("fit-alpha", help="fit the substrate scale factor to a reference pattern")
    common(p)
    p.add_argument("--theta-max", type=float, default=None, dest="theta_max", help="fit cutoff in degrees (default 70)")
    p.set_defaults(func=cmd_fit_alpha)

    p = sub.add_parser("trace-info", help="describe a hexagonal trace of the lattice")
    p.add_argument("n", type=int)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--config", default=None, help="include mode overlap from this config")
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--error-json", action="store_true")
    p.set_defaults(func=cmd_trace_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError, NearFieldFormatError, FileNotFoundError) as exc:
        status = EXIT_CONFIG
        err = exc
    except (MicrodiskError, ArithmeticError, ValueError) as exc:
        status = EXIT_RUNTIME
        err = exc
    if args.error_json:
        print(json.dumps({"error": type(err).__name__, "message": str(err), "exit_status": status}, sort_keys=True))
    else:
        print(f"error: {err}", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
