"""Command-line front end: weight tables, verification, convergence, CT runs.

Exit codes: 0 success, 2 validation error (bad arguments/config), 3 numerical
failure (singular or unacceptably ill-conditioned solve).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from math import pi

import numpy as np

from .ct import (
    add_poisson_noise,
    fbp_reconstruct,
    load_phantom,
    make_sinogram,
    metrics,
    phantom_image,
    save_pgm16,
    save_sinogram_csv,
)
from .discrete_op import DiscreteOperator, default_window, verify_convolution, verify_moments
from .efpoly import ef_coefficients, ef_roots_inside
from .oracle import solve_oracle
from .quadrature import NumericalError, QuadratureSpec, coefficients, integrate

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_CSV_FMT = "%.12g"  # CSV output is rounded to 12 significant digits


def _out_dir(args) -> str:
    d = args.output_dir or os.environ.get("OSCQUAD_OUTPUT_DIR", ".")
    os.makedirs(d, exist_ok=True)
    return d


def _emit(args, payload: dict, table_key: str, columns: list[str]) -> None:
    """Print payload as JSON (full double precision) or the table as CSV."""
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for key, val in payload.items():
            if key != table_key:
                print(f"# {key}={val}")
        print(",".join(columns))
        for row in payload[table_key]:
            print(",".join(_CSV_FMT % row[c] for c in columns))


def _apply_config(args, parser_dests: set) -> None:
    """Overlay config-file values onto parsed flags; unknown keys are fatal."""
    if not args.config:
        return
    with open(args.config) as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ValueError("config file must contain a JSON object")
    unknown = set(cfg) - parser_dests
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, val in cfg.items():
        setattr(args, key, val)


def cmd_coeffs(args) -> int:
    spec = QuadratureSpec(args.m, args.omega, args.a, args.b, args.n)
    cv = coefficients(spec)
    rows = [
        {"beta": b, "node": float(node), "real": w.real, "imag": w.imag}
        for b, (node, w) in enumerate(zip(spec.nodes(), cv.values))
    ]
    payload = {
        "m": args.m, "omega": args.omega, "a": args.a, "b": args.b, "n": args.n,
        "branch": cv.branch.value,
        "k_factor": cv.aux.get("k_factor"),
        "weights": rows,
    }
    _emit(args, payload, "weights", ["beta", "node", "real", "imag"])
    return EXIT_OK


def cmd_oracle(args) -> int:
    res = solve_oracle(args.m, args.omega, args.n)
    rows = [
        {"beta": b, "real": w.real, "imag": w.imag} for b, w in enumerate(res.values)
    ]
    payload = {
        "m": args.m, "omega": args.omega, "n": args.n,
        "residual": res.residual, "condition_number": res.cond,
        "weights": rows,
    }
    _emit(args, payload, "weights", ["beta", "real", "imag"])
    return EXIT_OK


def cmd_verify(args) -> int:
    op = DiscreteOperator.build(args.m, args.h)
    window = args.window or default_window(op)
    conv = verify_convolution(op, window)
    rows = [
        {"degree": k, "moment": verify_moments(op, k, window)}
        for k in range(2 * args.m + 1)
    ]
    payload = {
        "m": args.m, "h": args.h, "window": window,
        "convolution_residual": conv,
        "moments": rows,
    }
    _emit(args, payload, "moments", ["degree", "moment"])
    return EXIT_OK


_INTEGRANDS = {
    # name -> (phi(x), analytic value of int_0^1 exp(2 pi i w x) phi(x) dx)
    "exp": (np.exp, lambda w: (np.exp(1 + 2j * pi * w) - 1) / (1 + 2j * pi * w)),
    "cos3": (
        lambda x: np.cos(3 * x),
        lambda w: 0.5 * ((np.exp(2j * pi * w + 3j) - 1) / (2j * pi * w + 3j)
                         + (np.exp(2j * pi * w - 3j) - 1) / (2j * pi * w - 3j)),
    ),
}


def cmd_convergence(args) -> int:
    if args.integrand not in _INTEGRANDS:
        raise ValueError(f"unknown integrand {args.integrand!r}; choices: {sorted(_INTEGRANDS)}")
    phi, exact_fn = _INTEGRANDS[args.integrand]
    exact = complex(exact_fn(args.omega))
    ladder = []
    n = args.n_min
    while n <= args.n_max:
        ladder.append(n)
        n *= 2
    rows = []
    for n in ladder:
        spec = QuadratureSpec(args.m, args.omega, 0.0, 1.0, n)
        approx = integrate(spec, phi(spec.nodes()))
        rows.append({"n": n, "h": 1.0 / n, "error": abs(approx - exact)})
    logs = np.log([r["error"] for r in rows])
    order = float(np.polyfit(np.log([r["h"] for r in rows]), logs, 1)[0])
    payload = {
        "m": args.m, "omega": args.omega, "integrand": args.integrand,
        "fitted_order": order,
        "ladder": rows,
    }
    _emit(args, payload, "ladder", ["n", "h", "error"])
    return EXIT_OK


def cmd_efpoly(args) -> int:
    coeffs = ef_coefficients(args.k)
    roots = ef_roots_inside(args.k) if args.k >= 2 and args.k % 2 == 0 else ()
    payload = {
        "k": args.k,
        "coefficients": list(coeffs),
        "roots_inside": [{"index": i, "root": r} for i, r in enumerate(roots)],
    }
    _emit(args, payload, "roots_inside", ["index", "root"])
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    if args.full_scale:
        args.size, args.views = 512, 360
        args.detectors = None
    n_det = args.detectors or args.size
    ellipses = load_phantom(args.variant)
    aperture = None if args.aperture == "point" else args.aperture
    sino = make_sinogram(ellipses, args.views, n_det, aperture=aperture)
    seed = args.seed
    if args.noise > 0:
        sino = add_poisson_noise(sino, args.noise, seed=seed)
    reference = phantom_image(args.size, ellipses)
    methods = {
        "all": [("dft", 2), ("oqf", 2), ("oqf", 3)],
        "dft": [("dft", args.m)],
        "oqf": [("oqf", args.m)],
    }[args.method]
    out = _out_dir(args)
    save_sinogram_csv(os.path.join(out, f"{args.prefix}sinogram.csv"), sino)
    reports = []
    for method, m in methods:
        t0 = time.perf_counter()
        img = fbp_reconstruct(sino, method=method, n=args.size, m=m,
                              oversample=args.oversample, fov_mask=args.fov_mask)
        runtime_ms = 1000.0 * (time.perf_counter() - t0)
        rep = metrics(img, reference, fov_mask=args.fov_mask)
        tag = method if method == "dft" else f"{method}-m{m}"
        save_pgm16(os.path.join(out, f"{args.prefix}{tag}.pgm"), img)
        reports.append({
            "method": method, "m": m, "noise_level": args.noise, "noise_seed": seed,
            "e_max": rep.e_max, "mse": rep.mse, "psnr": rep.psnr,
            "runtime_ms": runtime_ms,
        })
        print(f"{tag}: e_max={rep.e_max:.6f} mse={rep.mse:.6e} psnr={rep.psnr:.4f} dB "
              f"({runtime_ms:.0f} ms)")
    with open(os.path.join(out, f"{args.prefix}metrics.json"), "w") as f:
        json.dump(reports, f, indent=2)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oscquad",
        description="Optimal quadrature for oscillatory Fourier integrals, with a CT pipeline.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=None,
                        help="output directory (default: $OSCQUAD_OUTPUT_DIR or '.')")
    common.add_argument("--config", default=None,
                        help="JSON config file; its keys override command-line flags")
    common.add_argument("--format", choices=["json", "csv"], default="json",
                        help="tabular output format (CSV rounds to 12 significant digits)")
    common.add_argument("--threads", type=int, default=None, help="cap BLAS thread count")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="optimal weight table for one formula", parents=[common])
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--omega", type=float, required=True)
    c.add_argument("--a", type=float, default=0.0)
    c.add_argument("--b", type=float, default=1.0)
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(func=cmd_coeffs)

    c = sub.add_parser("oracle", parents=[common],
                       help="weights from the directly solved defining system on [0,1]")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--omega", type=float, required=True)
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(func=cmd_oracle)

    c = sub.add_parser("verify", parents=[common],
                       help="discrete-operator convolution and moment identities")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--h", type=float, required=True)
    c.add_argument("--window", type=int, default=None)
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("convergence", parents=[common],
                       help="error ladder and fitted order on a smooth integrand")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--omega", type=float, default=3.3)
    c.add_argument("--integrand", default="exp")
    c.add_argument("--n-min", type=int, default=32)
    c.add_argument("--n-max", type=int, default=512)
    c.set_defaults(func=cmd_convergence)

    c = sub.add_parser("efpoly", parents=[common],
                       help="Euler-Frobenius polynomial coefficients and roots")
    c.add_argument("--k", type=int, required=True)
    c.set_defaults(func=cmd_efpoly)

    c = sub.add_parser("reconstruct", parents=[common],
                       help="end-to-end filtered back-projection experiment")
    c.add_argument("--size", type=int, default=128, help="image size (pixels per side)")
    c.add_argument("--views", type=int, default=180)
    c.add_argument("--detectors", type=int, default=None, help="default: image size")
    c.add_argument("--method", choices=["all", "dft", "oqf"], default="all")
    c.add_argument("--m", type=int, default=2, help="order for --method oqf")
    c.add_argument("--noise", type=float, default=0.0, help="Poisson noise level (e.g. 0.10)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--variant", default="modified", help="phantom variant")
    c.add_argument("--aperture", choices=["linear", "point"], default="linear")
    c.add_argument("--oversample", type=int, default=3)
    c.add_argument("--fov-mask", action="store_true")
    c.add_argument("--full-scale", action="store_true",
                   help="512x512 image, 360 views (overrides --size/--views/--detectors)")
    c.add_argument("--prefix", default="", help="filename prefix for outputs")
    c.set_defaults(func=cmd_reconstruct)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        dests = {a.dest for a in parser._actions} | {
            a.dest for sp in parser._subparsers._group_actions
            for choice in sp.choices.values() for a in choice._actions
        }
        _apply_config(args, dests)
        if args.threads:
            import threadpoolctl

            with threadpoolctl.threadpool_limits(limits=args.threads):
                return args.func(args)
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
