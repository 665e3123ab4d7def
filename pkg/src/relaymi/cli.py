"""Command-line entry point.

Subcommands:
    convergence  per-iteration MI traces for the two-step method and the
                 direct-gradient baseline at one SNR (CSV + JSON report)
    sweep        MI vs SNR for the two-step method and selected baselines
    mi           reporting-grade MI of a stored precoder matrix (JSON)
    project      nearest unitary matrix to a stored matrix

Flags override config-file keys; the built-in defaults reproduce the
reference BPSK single-relay network.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .experiments import (
    BASELINE_CHOICES,
    build_config,
    mi_eval,
    run_convergence,
    run_sweep,
)
from .fileio import (
    PrecoderFormatError,
    format_precoder_matrix,
    parse_config_file,
    read_precoder_matrix,
    write_precoder_matrix,
)
from .manifold import project_to_stiefel


def _add_common(parser: argparse.ArgumentParser, report_help: str) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key = value config file")
    parser.add_argument("--seed", type=int, default=None, help="root RNG seed")
    parser.add_argument("--samples", type=int, default=None, help=report_help)
    parser.add_argument(
        "--constellation", default=None, help="constellation name, e.g. bpsk, qpsk, 16qam"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaymi",
        description="Finite-alphabet MI precoder optimization for AF relay channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convergence", help="two-step vs direct gradient at one SNR")
    _add_common(conv, "Monte Carlo samples per optimization-loop MI estimate")
    conv.add_argument("--report-samples", type=int, default=None, help="samples for final MI")
    conv.add_argument("--snr-db", type=float, default=None, help="operating SNR in dB")
    conv.add_argument(
        "--rotation-start",
        choices=("haar", "identity"),
        default=None,
        help="initial rotation V: seeded Haar draw (default) or identity",
    )
    conv.add_argument("--out", type=Path, default=Path("convergence.csv"), help="CSV path")

    swp = sub.add_parser("sweep", help="MI vs SNR for two-step and baselines")
    _add_common(swp, "Monte Carlo samples per optimization-loop MI estimate")
    swp.add_argument("--report-samples", type=int, default=None, help="samples per reported MI")
    swp.add_argument(
        "--snr-db", default=None, help="comma-separated SNR grid in dB, e.g. -4,0,4,8"
    )
    swp.add_argument(
        "--baselines",
        default=None,
        help=f"comma-separated subset of {','.join(BASELINE_CHOICES)}",
    )
    swp.add_argument("--workers", type=int, default=None, help="process pool size")
    swp.add_argument(
        "--rotation-start",
        choices=("haar", "identity"),
        default=None,
        help="initial rotation V: seeded Haar draw (default) or identity",
    )
    swp.add_argument("--out", type=Path, default=Path("sweep.csv"), help="CSV path")

    mi = sub.add_parser("mi", help="evaluate MI of a stored precoder")
    _add_common(mi, "Monte Carlo samples for the estimate")
    mi.add_argument("--snr-db", type=float, default=None, help="operating SNR in dB")
    mi.add_argument("--precoder", type=Path, required=True, help="precoder matrix file")
    mi.add_argument("--out", type=Path, default=None, help="optional JSON output path")

    proj = sub.add_parser("project", help="project a matrix to the nearest unitary")
    proj.add_argument("--matrix", type=Path, required=True, help="matrix file to project")
    proj.add_argument("--out", type=Path, default=None, help="output path (default: stdout)")
    return parser


def _config_from_args(args: argparse.Namespace, samples_role: str) -> "ExperimentConfig":
    file_values = parse_config_file(args.config) if args.config else None
    overrides: dict = {
        "seed": args.seed,
        "constellation": args.constellation,
    }
    if samples_role == "opt":
        overrides["n_opt_samples"] = args.samples
        overrides["n_report_samples"] = getattr(args, "report_samples", None)
    else:  # the mi command spends samples on the estimate itself
        overrides["n_report_samples"] = args.samples
    snr = getattr(args, "snr_db", None)
    if snr is not None:
        if isinstance(snr, str):
            overrides["snr_grid_db"] = tuple(float(x) for x in snr.split(",") if x.strip())
        else:
            overrides["snr_grid_db"] = (float(snr),)
    baselines = getattr(args, "baselines", None)
    if baselines is not None:
        overrides["baselines"] = tuple(x.strip() for x in baselines.split(",") if x.strip())
    workers = getattr(args, "workers", None)
    if workers is not None:
        overrides["workers"] = workers
    rotation_start = getattr(args, "rotation_start", None)
    if rotation_start is not None:
        overrides["rotation_start"] = rotation_start
    return build_config(file_values, **overrides)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "convergence":
            config = _config_from_args(args, "opt")
            _, reports = run_convergence(config, out_csv=args.out)
            for report in reports:
                final = report.final_mi
                print(
                    f"{report.method}: {final.bits_per_use:.4f} bits/use "
                    f"(+- {final.std_err:.4f}), converged={report.converged}"
                )
            print(f"wrote {args.out} and {args.out.with_suffix('.json')}")
        elif args.command == "sweep":
            config = _config_from_args(args, "opt")
            rows = run_sweep(config, out_csv=args.out)
            for row in rows:
                print(
                    f"snr={row.snr_db:+.1f} dB  {row.method:<13} "
                    f"{row.bits_per_use:.4f} bits/use (+- {row.std_err:.4f})"
                )
            print(f"wrote {args.out} and {args.out.with_suffix('.json')}")
        elif args.command == "mi":
            config = _config_from_args(args, "report")
            result = mi_eval(config, args.precoder)
            text = json.dumps(result, indent=2, sort_keys=True)
            print(text)
            if args.out is not None:
                args.out.write_text(text + "\n")
        elif args.command == "project":
            matrix = read_precoder_matrix(args.matrix)
            projected = project_to_stiefel(matrix)
            if args.out is not None:
                write_precoder_matrix(args.out, projected)
                print(f"wrote {args.out}")
            else:
                sys.stdout.write(format_precoder_matrix(projected))
    except (ValueError, OSError, np.linalg.LinAlgError, PrecoderFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
