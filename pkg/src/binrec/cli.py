"""Command line interface.

Subcommands: generate | measure | blur | noise | reconstruct | certify |
complexity | prob | montecarlo | scenario.  Exit codes: 0 success, 2 bad
input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import (
    Certificate,
    LPFailure,
    certify_nonneg,
    certify_unique,
    robustness_margin,
)
from .complexity import complexity_report
from .fourier import gaussian_filter, blur_signal, measure, parse_mask_spec
from .generators import add_noise, gen_barcode, gen_disk, gen_random_intervals
from .grids import BinarySignal
from .probability import (
    binomial_cdf_half,
    binomial_cdf_normal_approx,
    hoeffding_tail,
    montecarlo_recovery,
    orthant_count_formula,
)
from .scenarios import ScenarioError, parse_config_file, run_scenario
from .sigio import (
    as_binary_signal,
    read_measurements,
    read_signal_any,
    write_measurements,
    write_report_json,
    write_signal_any,
)
from .solver import SolverConfig, reconstruct, reconstruct_filtered


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binrec",
        description="Binary signal and shape reconstruction from partial Fourier data",
    )
    parser.add_argument("--version", action="version", version=f"binrec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a test signal")
    p.add_argument("--kind", required=True, choices=["intervals", "disk", "barcode"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=5, help="half the run count (intervals)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--center", default="0.5,0.5")
    p.add_argument("--radius", type=float, default=0.2)
    p.add_argument("--pattern", default="10")
    p.add_argument("--out", required=True)

    p = sub.add_parser("measure", help="partial Fourier measurements of a signal")
    p.add_argument("--signal", required=True)
    p.add_argument("--mask", required=True, help="low:d | disk:d | list:path | rand:r:seed")
    p.add_argument("--out", required=True)

    p = sub.add_parser("blur", help="Gaussian low-pass filter a signal")
    p.add_argument("--signal", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--hsize", type=int, default=0, help="odd window (default 2*ceil(3 sigma)+1)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("noise", help="add Gaussian noise to a signal or measurements")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--std", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("reconstruct", help="recover a binary signal")
    p.add_argument("--meas", help="measurement CSV")
    p.add_argument("--blurred", help="blurred signal file (filter variant)")
    p.add_argument("--sigma", type=float, help="blur sigma (with --blurred)")
    p.add_argument("--hsize", type=int, default=0)
    p.add_argument("--mask", help="optional mask spec")
    p.add_argument("--lambda", dest="lam", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=-1.0, help="<0: default 1e-10*max(1,|b|^2)")
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--constraint", choices=["box", "nonneg"], default="box")
    p.add_argument("--precond", choices=["none", "auto"], default="none",
                   help="auto: damp low-SNR frequencies by |K|^2 (filter variant)")
    p.add_argument("--out", required=True, help="sig.csv | img.pgm")
    p.add_argument("--report", help="report JSON path")
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("certify", help="decide unique recoverability via the dual LP")
    p.add_argument("--signal", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--nonneg", action="store_true")
    p.add_argument("--support", help="support index CSV (with --nonneg)")
    p.add_argument("--out", help="JSON path (default stdout)")

    p = sub.add_parser("complexity", help="directional crossing complexity of an image")
    p.add_argument("--image", required=True)
    p.add_argument("--angles", type=int, default=32)
    p.add_argument("--qmax", type=int, default=8)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("prob", help="recovery probability numbers")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", help="JSON path (default stdout)")

    p = sub.add_parser("montecarlo", help="Monte Carlo recovery experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", required=True, help="rank, or comma list of ranks")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=["gaussian", "partial-fourier-random"], default="gaussian")
    p.add_argument("--out", required=True, help="rates CSV")
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("scenario", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    return parser


def _cmd_generate(args) -> int:
    if args.kind == "intervals":
        sig = gen_random_intervals(args.n, args.d, args.seed)
    elif args.kind == "disk":
        cx, cy = (float(c) for c in args.center.split(","))
        sig = gen_disk(args.n, (cx, cy), args.radius)
    else:
        sig = gen_barcode(args.pattern, args.n)
    write_signal_any(args.out, sig)
    return 0


def _cmd_measure(args) -> int:
    sig = read_signal_any(args.signal)
    mask = parse_mask_spec(args.mask, sig.geometry)
    write_measurements(args.out, measure(sig, mask))
    return 0


def _cmd_blur(args) -> int:
    sig = read_signal_any(args.signal)
    hsize = args.hsize or 2 * int(np.ceil(3 * args.sigma)) + 1
    filt = gaussian_filter(args.sigma, hsize, sig.geometry)
    blurred = blur_signal(sig, filt)
    out = Path(args.out)
    if out.suffix.lower() == ".pgm":
        raise ValueError("blurred signals are real-valued; use .csv or .txt output")
    write_signal_any(args.out, blurred)
    return 0


def _cmd_noise(args) -> int:
    path = Path(args.input)
    if path.suffix.lower() == ".csv" and _looks_like_measurements(path):
        obj = read_measurements(path)
        noisy = add_noise(obj, args.std, args.seed)
        write_measurements(args.out, noisy)
    else:
        sig = read_signal_any(path)
        noisy = add_noise(sig, args.std, args.seed)
        write_signal_any(args.out, noisy)
    return 0


def _looks_like_measurements(path: Path) -> bool:
    with open(path) as fh:
        first = fh.readline()
    return first.startswith("# geometry")


def _cmd_reconstruct(args) -> int:
    config = SolverConfig(
        lam=args.lam,
        tol=None if args.tol < 0 else args.tol,
        max_iters=args.max_iters,
        constraint=args.constraint,
        record_trace=True,
    )
    if (args.meas is None) == (args.blurred is None):
        raise ValueError("give exactly one of --meas or --blurred")
    if args.meas:
        meas = read_measurements(args.meas)
        mask = meas.mask
        if args.mask:
            mask = parse_mask_spec(args.mask, meas.geometry)
            values = np.where(mask.selector, meas.values, 0.0)
            from .fourier import MeasurementSet

            meas = MeasurementSet(mask, values)
        recon, raw, report = reconstruct(meas, config)
    else:
        if args.sigma is None:
            raise ValueError("--blurred requires --sigma")
        blurred = read_signal_any(args.blurred)
        if isinstance(blurred, BinarySignal):
            blurred = blurred.to_real()
        hsize = args.hsize or 2 * int(np.ceil(3 * args.sigma)) + 1
        filt = gaussian_filter(args.sigma, hsize, blurred.geometry)
        if args.precond == "auto":
            from .fourier import FilterSpectrum

            config.preconditioner = FilterSpectrum(filt.geometry, np.abs(filt.gains) ** 2)
        mask = parse_mask_spec(args.mask, blurred.geometry) if args.mask else None
        recon, raw, report = reconstruct_filtered(blurred, filt, config, mask)
    write_signal_any(args.out, recon)
    payload = {
        "iterations": report.iterations,
        "residual": report.residual,
        "seconds": report.seconds,
        "converged": report.converged,
    }
    if args.report:
        write_report_json(args.report, payload)
        if not args.no_plots and report.trace:
            from . import plots

            plots.save_residual_trace(Path(args.report).with_suffix(".png"), report.trace)
    print(json.dumps(payload))
    return 0


def _read_support(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coords = tuple(int(c) for c in line.split(","))
            out.append(coords[0] if len(coords) == 1 else coords)
    return out


def _cmd_certify(args) -> int:
    sig = read_signal_any(args.signal)
    mask = parse_mask_spec(args.mask, sig.geometry)
    if args.nonneg:
        support = _read_support(args.support) if args.support else [
            x + 1 for x in np.nonzero(np.asarray(sig.values).ravel())[0]
        ]
        outcome = certify_nonneg(support, mask)
        h = None
    else:
        u0 = as_binary_signal(sig) if not isinstance(sig, BinarySignal) else sig
        outcome = certify_unique(u0, mask)
        h = robustness_margin(outcome) if isinstance(outcome, Certificate) else None
    payload = {
        "certifiable": isinstance(outcome, Certificate),
        "margin": outcome.margin,
        "h": h,
        "lp_iterations": outcome.lp_iterations,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_complexity(args) -> int:
    image = read_signal_any(args.image)
    report = complexity_report(image, theta_samples=args.angles, q_max=args.qmax)
    payload = report.as_json_dict()
    write_report_json(args.out, payload)
    if not args.no_plots:
        from . import plots

        thetas = [entry["theta"] for entry in payload["k_theta"]]
        values = [entry["value"] for entry in payload["k_theta"]]
        plots.save_curve(Path(args.out).with_suffix(".png"), thetas, values,
                         "angle (rad)", "avg crossings")
    print(json.dumps({k: payload[k] for k in ("max", "perimeter", "d_lower_bound")}))
    return 0


def _cmd_prob(args) -> int:
    lo, hi = hoeffding_tail(args.r, args.n)
    payload = {
        "r": args.r,
        "n": args.n,
        "p_exact": binomial_cdf_half(args.r, args.n),
        "p_normal_approx": binomial_cdf_normal_approx(args.r, args.n),
        "hoeffding_lower": lo,
        "hoeffding_upper": hi,
        "orthant_count": orthant_count_formula(max(args.r, 1), args.n),
        "predicted_recovery": binomial_cdf_half(max(args.r - 1, 0), args.n - 1),
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_montecarlo(args) -> int:
    ranks = [int(r) for r in str(args.r).split(",")]
    rows = ["N,r,trials,empirical,predicted,ci_low,ci_high"]
    results = []
    for r in ranks:
        exp = montecarlo_recovery(args.n, r, args.trials, args.seed, args.kind)
        results.append(exp)
        rows.append(
            f"{exp.n},{exp.r},{exp.trials},{exp.empirical:.6f},"
            f"{exp.predicted:.6f},{exp.ci_low:.6f},{exp.ci_high:.6f}"
        )
    Path(args.out).write_text("\n".join(rows) + "\n")
    if not args.no_plots and len(results) > 1:
        from . import plots

        plots.save_curve(
            Path(args.out).with_suffix(".png"),
            [e.r for e in results],
            [e.empirical for e in results],
            "rank r",
            "empirical recovery rate",
        )
    print("\n".join(rows))
    return 0


def _cmd_scenario(args) -> int:
    cfg = parse_config_file(args.config)
    result = run_scenario(cfg, args.out_dir)
    keys = [k for k in ("misidentified", "spearman_noise", "spearman_measurements") if k in result]
    print(json.dumps({k: result[k] for k in keys}))
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "measure": _cmd_measure,
    "blur": _cmd_blur,
    "noise": _cmd_noise,
    "reconstruct": _cmd_reconstruct,
    "certify": _cmd_certify,
    "complexity": _cmd_complexity,
    "prob": _cmd_prob,
    "montecarlo": _cmd_montecarlo,
    "scenario": _cmd_scenario,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except LPFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if "numerical" in str(exc) else 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
