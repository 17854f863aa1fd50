"""Command-line interface: transform drivers, diagnostics and reports.

Subcommands
-----------
tiling      harmonic tiling profiles and diagnostics (CSV + JSON summary)
analyze     sphere container or PGM image -> coefficient container
synthesize  coefficient container -> sphere container
roundtrip   analysis/synthesis accuracy table over a list of band limits
bench       analysis/synthesis wall-clock table over a list of band limits
sparsity    per-scale coefficient-magnitude histograms and Gini indices
parabolic   ridge-width accuracy table over dyadic degrees

Exit codes: 0 success, 2 usage error, 3 file or data error.  CSV output
is RFC-4180 (CRLF line endings, header row first) and stable-ordered.
The SCURVE_THREADS environment variable caps FFT parallelism.  Random
test signals come from numpy's default PCG64 generator, seeded by
--seed, so every run is reproducible.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
import time

import numpy as np

from . import container
from .sphere import random_coeffs, sht_forward, sht_inverse
from .tiling import (
    QuadratureError,
    TilingError,
    TilingParams,
    admissibility_residual,
    build_tiling,
    parabolic_accuracy_table,
)
from .transform import (
    analyze,
    analyze_real,
    scale_band_limit,
    synthesize,
    synthesize_real,
)

__all__ = ["gini_coefficient", "main"]

_RNG_ALGORITHM = "numpy-pcg64"


class UsageError(Exception):
    """Bad command-line arguments, reported through the parser (exit 2)."""


def gini_coefficient(magnitudes: np.ndarray) -> float:
    """Concentration index of a non-negative sample: 0 flat, -> 1 peaked."""
    x = np.sort(np.asarray(magnitudes, dtype=float).ravel())
    n = x.size
    total = float(x.sum())
    if n == 0 or total == 0.0:
        raise ValueError("Gini coefficient needs a non-empty, non-zero sample")
    if x[0] < 0.0:
        raise ValueError("Gini coefficient needs non-negative values")
    ranks = np.arange(1, n + 1, dtype=float)
    return float(np.sum((2.0 * ranks - n - 1.0) * x) / (n * total))


def _write_csv(stream, fields, rows) -> None:
    writer = csv.writer(stream, lineterminator="\r\n")
    writer.writerow(fields)
    writer.writerows(rows)


def _emit_table(out, fields, rows, command, args) -> None:
    """CSV to stdout, or to a file plus a one-line JSON note on stdout."""
    if out is None:
        _write_csv(sys.stdout, fields, rows)
        return
    with open(out, "w", newline="") as fh:
        _write_csv(fh, fields, rows)
    note = {"command": command, "wrote": out, "rows": len(rows)}
    if hasattr(args, "seed"):
        note["rng"] = {"algorithm": _RNG_ALGORITHM, "seed": args.seed}
    print(json.dumps(note))


def _make_params(args, band_limit: int, spin: int) -> TilingParams:
    if not args.lam > 1.0:
        raise UsageError("--lambda must exceed 1")
    if args.jmin < 0:
        raise UsageError("--jmin must be non-negative")
    return TilingParams(band_limit, spin, args.lam, args.jmin)


def _load_sphere_input(path: str, args):
    """Sphere signal from an SCRV1 container or a binary PGM image."""
    with open(path, "rb") as fh:
        magic = fh.read(len(container.MAGIC))
    if magic[:2] == b"P5":
        if args.L is None:
            raise UsageError("--L is required for PGM input")
        if args.spin not in (None, 0):
            raise UsageError("PGM input is real-valued and spin 0")
        image = container.read_pgm(path)
        if args.clip is not None:
            if not 0.0 < args.clip <= 100.0:
                raise UsageError("--clip expects a percentile in (0, 100]")
            image = np.minimum(image, np.percentile(image, args.clip))
        if args.rescale:
            lo, hi = float(image.min()), float(image.max())
            image = (image - lo) / (hi - lo) if hi > lo else np.zeros_like(image)
        return container.resample_to_sphere(image, args.L)
    if magic != container.MAGIC:
        raise container.ContainerError(f"{path}: neither an SCRV1 container nor a P5 image")
    if args.clip is not None or args.rescale:
        raise UsageError("--clip and --rescale apply to PGM input only")
    f = container.read_sphere(path)
    if args.L is not None and args.L != f.grid.band_limit:
        raise ValueError(
            f"--L {args.L} disagrees with the container band limit {f.grid.band_limit}"
        )
    if args.spin is not None and args.spin != f.spin:
        raise ValueError(f"--spin {args.spin} disagrees with the container spin {f.spin}")
    return f


def cmd_tiling(args) -> int:
    params = _make_params(args, args.L, args.spin)
    t = build_tiling(params)
    lam = params.lam
    scales = []
    for j in range(params.j_min, params.j_max + 1):
        scales.append(
            {
                "scale": j,
                "band_limit": scale_band_limit(params, j),
                "support": [math.floor(lam ** (j - 1)), math.ceil(lam ** (j + 1))],
                "rotation_colatitude": float(t.angles[j - params.j_min]),
            }
        )
    summary = {
        "L": params.band_limit,
        "spin": params.spin,
        "lambda": lam,
        "j_min": params.j_min,
        "j_max": params.j_max,
        "admissibility_residual": admissibility_residual(t),
        "scales": scales,
    }
    print(json.dumps(summary, indent=2))
    if args.out:
        rows = []
        for idx, j in enumerate(range(params.j_min, params.j_max + 1)):
            for ell in range(params.band_limit):
                rows.append(["kernel", j, ell, float(t.kernels[idx, ell])])
        for name, arr in (
            ("scaling", t.scaling),
            ("direction_pos", t.direction_pos),
            ("direction_neg", t.direction_neg),
        ):
            for ell in range(params.band_limit):
                rows.append([name, "", ell, float(arr[ell])])
        with open(f"{args.out}.csv", "w", newline="") as fh:
            _write_csv(fh, ("component", "scale", "ell", "value"), rows)
        with open(f"{args.out}.json", "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_analyze(args) -> int:
    f = _load_sphere_input(args.input, args)
    params = _make_params(args, f.grid.band_limit, f.spin)
    t = build_tiling(params)
    coeffs = analyze_real(f, t) if f.real else analyze(f, t)
    container.write_coeffs(args.out, coeffs)
    print(
        json.dumps(
            {
                "wrote": args.out,
                "kind": "curvelet",
                "L": params.band_limit,
                "spin": params.spin,
                "lambda": params.lam,
                "j_min": params.j_min,
                "j_max": params.j_max,
                "real": coeffs.real,
            }
        )
    )
    return 0


def cmd_synthesize(args) -> int:
    coeffs = container.read_coeffs(args.input)
    t = build_tiling(coeffs.params)
    f = synthesize_real(coeffs, t) if coeffs.real else synthesize(coeffs, t)
    container.write_sphere(args.out, f)
    print(
        json.dumps(
            {
                "wrote": args.out,
                "kind": "sphere",
                "L": f.grid.band_limit,
                "spin": f.spin,
                "real": f.real,
            }
        )
    )
    return 0


def _check_repeats(args) -> None:
    if args.repeats < 1:
        raise UsageError("--repeats must be at least 1")


def _check_spin_fits(args) -> None:
    if abs(args.spin) >= min(args.L):
        raise UsageError("--spin must be smaller than the smallest band limit")


def cmd_roundtrip(args) -> int:
    _check_repeats(args)
    _check_spin_fits(args)
    rng = np.random.default_rng(args.seed)
    rows = []
    for L in args.L:
        t = build_tiling(_make_params(args, L, args.spin))
        worst = 0.0
        err_sum = 0.0
        count = 0
        for _ in range(args.repeats):
            flm = random_coeffs(L, args.spin, rng)
            back = sht_forward(synthesize(analyze(sht_inverse(flm), t), t))
            err = np.abs(back.values - flm.values)
            worst = max(worst, float(err.max()))
            err_sum += float(err.sum())
            count += err.size
        rows.append([L, worst, err_sum / count])
    _emit_table(args.out, ("L", "max_error", "mean_error"), rows, "roundtrip", args)
    return 0


def cmd_bench(args) -> int:
    _check_repeats(args)
    _check_spin_fits(args)
    rng = np.random.default_rng(args.seed)
    rows = []
    for L in args.L:
        t = build_tiling(_make_params(args, L, args.spin))
        f = sht_inverse(random_coeffs(L, args.spin, rng))
        synthesize(analyze(f, t), t)
        times = []
        for _ in range(args.repeats):
            start = time.perf_counter()
            synthesize(analyze(f, t), t)
            times.append(time.perf_counter() - start)
        rows.append([L, statistics.median(times)])
    _emit_table(args.out, ("L", "seconds"), rows, "bench", args)
    return 0


def cmd_sparsity(args) -> int:
    if args.bins < 1:
        raise UsageError("--bins must be at least 1")
    f = _load_sphere_input(args.input, args)
    params = _make_params(args, f.grid.band_limit, f.spin)
    t = build_tiling(params)
    coeffs = analyze_real(f, t) if f.real else analyze(f, t)
    edges = np.linspace(0.0, 1.0, args.bins + 1)
    csv_rows = []
    scale_notes = []
    for j in range(params.j_min, params.j_max + 1):
        mags = np.abs(coeffs.scale(j).values).ravel()
        top = float(mags.max())
        note = {"scale": j, "coefficients": int(mags.size), "max_abs": top}
        if top == 0.0:
            print(
                f"scurve: warning: scale {j} is identically zero; no histogram",
                file=sys.stderr,
            )
            note["gini"] = None
        else:
            counts, _ = np.histogram(mags / top, bins=args.bins, range=(0.0, 1.0))
            note["gini"] = gini_coefficient(mags)
            for b in range(args.bins):
                csv_rows.append(
                    [
                        params.band_limit,
                        j,
                        b,
                        float(edges[b]),
                        float(edges[b + 1]),
                        counts[b] / mags.size,
                    ]
                )
        scale_notes.append(note)
    summary = {
        "L": params.band_limit,
        "spin": params.spin,
        "lambda": params.lam,
        "j_min": params.j_min,
        "j_max": params.j_max,
        "bins": args.bins,
        "scales": scale_notes,
    }
    print(json.dumps(summary, indent=2))
    if args.out:
        fields = ("L", "scale", "bin", "lower", "upper", "probability")
        with open(f"{args.out}.csv", "w", newline="") as fh:
            _write_csv(fh, fields, csv_rows)
        with open(f"{args.out}.json", "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_parabolic(args) -> int:
    if not 1 <= args.pmax <= 8:
        raise UsageError("--pmax must lie in [1, 8]")
    rows = [
        [r.degree, r.spin, r.fwhm_theta, r.pct_diff]
        for r in parabolic_accuracy_table(args.pmax)
    ]
    _emit_table(args.out, ("ell", "spin", "fwhm_theta", "pct_error"), rows, "parabolic", args)
    return 0


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _band_limit_list(text: str) -> list:
    try:
        values = sorted({int(tok) for tok in text.split(",") if tok.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad band-limit list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty band-limit list")
    if values[0] < 1:
        raise argparse.ArgumentTypeError("band limits must be positive")
    return values


def _add_tiling_flags(p, spin_default=0) -> None:
    p.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=2.0,
        help="dilation between neighbouring scales (must exceed 1)",
    )
    p.add_argument("--jmin", type=int, default=0, help="coarsest scale index")
    p.add_argument(
        "--spin",
        type=int,
        default=spin_default,
        help="signal spin" if spin_default is not None else "expected input spin",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scurve",
        description="Exact directional multiscale transforms on the sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("tiling", help="export tiling profiles and diagnostics")
    p.add_argument("--L", type=_positive_int, required=True, help="band limit")
    _add_tiling_flags(p)
    p.add_argument("--out", help="path prefix for OUT.csv and OUT.json")
    p.set_defaults(func=cmd_tiling)

    p = sub.add_parser("analyze", help="decompose a sphere file into coefficients")
    p.add_argument("input", help="SCRV1 sphere container or binary PGM image")
    p.add_argument(
        "--L", type=_positive_int, default=None, help="band limit (required for PGM input)"
    )
    _add_tiling_flags(p, spin_default=None)
    p.add_argument(
        "--clip", type=float, default=None, help="clip PGM intensities above this percentile"
    )
    p.add_argument(
        "--rescale", action="store_true", help="rescale PGM intensities to [0, 1] after clipping"
    )
    p.add_argument("--out", required=True, help="output coefficient container")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synthesize", help="reassemble a sphere signal from coefficients")
    p.add_argument("input", help="SCRV1 coefficient container")
    p.add_argument("--out", required=True, help="output sphere container")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("roundtrip", help="analysis/synthesis accuracy table")
    p.add_argument(
        "--L",
        type=_band_limit_list,
        required=True,
        help="comma-separated band limits, e.g. 4,8,16",
    )
    _add_tiling_flags(p)
    p.add_argument("--repeats", type=int, default=3, help="random signals per band limit")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("bench", help="analysis/synthesis timing table")
    p.add_argument(
        "--L",
        type=_band_limit_list,
        required=True,
        help="comma-separated band limits, e.g. 32,64,128",
    )
    _add_tiling_flags(p)
    p.add_argument("--repeats", type=int, default=3, help="timed runs per band limit")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sparsity", help="coefficient-magnitude histograms and Gini indices")
    p.add_argument("input", help="SCRV1 sphere container or binary PGM image")
    p.add_argument(
        "--L", type=_positive_int, default=None, help="band limit (required for PGM input)"
    )
    _add_tiling_flags(p, spin_default=None)
    p.add_argument("--bins", type=int, default=64, help="histogram bins on [0, 1]")
    p.add_argument(
        "--clip", type=float, default=None, help="clip PGM intensities above this percentile"
    )
    p.add_argument(
        "--rescale", action="store_true", help="rescale PGM intensities to [0, 1] after clipping"
    )
    p.add_argument("--out", help="path prefix for OUT.csv and OUT.json")
    p.set_defaults(func=cmd_sparsity)

    p = sub.add_parser("parabolic", help="ridge-width accuracy table over dyadic degrees")
    p.add_argument("--pmax", type=int, default=8, help="largest dyadic exponent (1..8)")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_parabolic)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (container.ContainerError, TilingError, QuadratureError, ValueError, OSError) as exc:
        print(f"scurve: error: {exc}", file=sys.stderr)
        return 3
