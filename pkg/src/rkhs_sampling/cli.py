"""Batch command-line front end.

Subcommands::

    gram         Gram matrix CSV and Riesz constants JSON for a point file
    fit          interpolate a training point file and predict at probes
    stability    both Riesz stability sandwiches for the training data
    determining  finite-section diagnostics for a point sequence generator
    tensor       Kronecker-path interpolation on a product grid
    bench        tensor path vs dense path timings

Exit codes: 0 success, 2 invalid input, 3 matrix not numerically positive
definite, 4 determining diagnostic reports ``degrading``.
"""

import argparse
import json
import logging
import sys

from .config import RunConfig, check_seed
from .determining import PointSequence, determining_diagnostic
from .exceptions import DimensionError, DuplicatePointError, NotPositiveDefiniteError
from .io import (
    ParseError,
    format_float,
    matrix_to_csv,
    read_grid_samples,
    read_point_file,
    to_json,
    write_grid_samples,
    write_outputs,
    write_point_file,
)
from .kernels import Gaussian, TensorProduct, kernel_from_dict
from .linalg import PointSet, assemble_gram, riesz_constants
from .sampling import (
    biorthogonality_residual,
    fit_gram,
    stability_check_dual,
    stability_check_primal,
)
from .tensor import TensorGrid, bench_tensor_vs_dense, bench_to_csv, tensor_fit

log = logging.getLogger("rkhs_sampling")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_PD = 3
EXIT_DEGRADING = 4


class UsageError(ValueError):
    pass


def _load_config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.kernel:
        with open(args.kernel) as fh:
            cfg.kernel = kernel_from_dict(json.load(fh))
    if args.seed is not None:
        cfg.seed = check_seed(args.seed)
    for item in args.tol or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        cfg.set_tolerance(name.strip(), value)
    return cfg


def _kernel_for(cfg, dim):
    if cfg.kernel is None:
        raise UsageError("a kernel is required (--kernel or 'kernel' in --config)")
    if cfg.kernel.dim != dim:
        raise DimensionError(f"kernel dimension {cfg.kernel.dim} does not match data dimension {dim}")
    return cfg.kernel


def _parse_sizes(text, pairs=False):
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        if pairs:
            n, _, m = part.partition("x")
            out.append((int(n), int(m or n)))
        else:
            out.append(int(part))
    if not out:
        raise UsageError("--sizes is empty")
    return out


def cmd_gram(args, cfg):
    coords, _ = read_point_file(args.points)
    G = assemble_gram(_kernel_for(cfg, coords.shape[1]), PointSet(coords))
    G.chol
    bounds = riesz_constants(G)
    write_outputs(args.out, {"gram.csv": matrix_to_csv(G.entries), "bounds.json": to_json(bounds.to_dict())})
    return EXIT_OK


def cmd_fit(args, cfg):
    coords, f = read_point_file(args.points, require_f=True)
    probes, _ = read_point_file(args.probes, require_f=False)
    k = _kernel_for(cfg, coords.shape[1])
    if probes.shape[1] != coords.shape[1]:
        raise DimensionError("probe and training dimensions differ")
    model = fit_gram(assemble_gram(k, PointSet(coords)), f)
    residual = model.node_residual()
    tol = cfg.tolerances["interpolation"]
    if residual > tol:
        log.warning("node residual %.3e exceeds interpolation tolerance %.1e", residual, tol)
    summary = {"n": len(coords), "node_residual": residual, "interpolation_ok": residual <= tol}
    write_outputs(
        args.out,
        {
            "predictions.csv": write_point_file(probes, model(probes)),
            "coefficients.csv": "c\n" + "".join(format_float(c) + "\n" for c in model.coeffs),
            "fit.json": to_json(summary),
        },
    )
    return EXIT_OK


def cmd_stability(args, cfg):
    coords, f = read_point_file(args.points, require_f=True)
    G = assemble_gram(_kernel_for(cfg, coords.shape[1]), PointSet(coords))
    slack = cfg.tolerances["stability_slack"]
    c = G.solve(f)
    resid = biorthogonality_residual(G)
    report = {
        "riesz": riesz_constants(G).to_dict(),
        "dual": stability_check_dual(G, f, slack).to_dict(),
        "primal": stability_check_primal(G, c, slack).to_dict(),
        "biorthogonality_residual": resid,
        "biorthogonality_ok": resid <= cfg.tolerances["biorthogonality"],
    }
    write_outputs(args.out, {"stability.json": to_json(report)})
    return EXIT_OK


def cmd_determining(args, cfg):
    with open(args.generator) as fh:
        seq = PointSequence.from_dict(json.load(fh), seed=cfg.seed)
    k = _kernel_for(cfg, seq.dim)
    report = determining_diagnostic(k, seq, _parse_sizes(args.sizes), margin=cfg.tolerances["stable_margin"])
    write_outputs(args.out, {"report.json": report.to_json(), "report.csv": report.to_csv()})
    log.info("verdict: %s", report.verdict)
    return EXIT_DEGRADING if report.verdict == "degrading" else EXIT_OK


def cmd_tensor(args, cfg):
    gx, _ = read_point_file(args.grid_x, require_f=False)
    gy, _ = read_point_file(args.grid_y, require_f=False)
    F = read_grid_samples(args.samples)
    probes, _ = read_point_file(args.probes, require_f=False)
    k = _kernel_for(cfg, gx.shape[1] + gy.shape[1])
    if not isinstance(k, TensorProduct) or k.left.dim != gx.shape[1]:
        raise UsageError("tensor needs a 'tensor' kernel whose left factor matches --grid-x")
    if probes.shape[1] != k.dim:
        raise DimensionError(f"probes have dimension {probes.shape[1]}, expected {k.dim}")
    model = tensor_fit(k.left, k.right, TensorGrid(gx, gy), F)
    write_outputs(
        args.out,
        {
            "predictions.csv": write_point_file(probes, model(probes)),
            "coefficients.csv": write_grid_samples(model.coeffs.reshape(F.shape)),
        },
    )
    return EXIT_OK


def cmd_bench(args, cfg):
    k1 = k2 = None
    if cfg.kernel is not None:
        if not isinstance(cfg.kernel, TensorProduct):
            raise UsageError("bench takes a 'tensor' kernel")
        k1, k2 = cfg.kernel.left, cfg.kernel.right
    if (k1 and k1.dim != 1) or (k2 and k2.dim != 1):
        raise UsageError("bench grids are one-dimensional per factor")
    rows = bench_tensor_vs_dense(
        _parse_sizes(args.sizes, pairs=True),
        trials=args.trials,
        k1=k1 or Gaussian(),
        k2=k2 or Gaussian(),
        dense_budget=args.dense_budget,
        seed=cfg.seed,
    )
    write_outputs(args.out, {"bench.csv": bench_to_csv(rows)})
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run config JSON (kernel, tolerances, seed)")
    common.add_argument("--kernel", help="kernel spec JSON file")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, help="seed for randomized routines")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rkhs-sampling", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gram", parents=[common], help="Gram matrix and Riesz constants")
    p.add_argument("--points", required=True)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("fit", parents=[common], help="interpolate and predict")
    p.add_argument("--points", required=True, help="training point file with an f column")
    p.add_argument("--probes", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("stability", parents=[common], help="Riesz stability sandwiches")
    p.add_argument("--points", required=True)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("determining", parents=[common], help="finite-section diagnostics")
    p.add_argument("--generator", required=True, help="point sequence generator JSON")
    p.add_argument("--sizes", required=True, help="increasing section sizes, e.g. 8,16,32")
    p.set_defaults(func=cmd_determining)

    p = sub.add_parser("tensor", parents=[common], help="product-grid interpolation")
    p.add_argument("--grid-x", required=True)
    p.add_argument("--grid-y", required=True)
    p.add_argument("--samples", required=True, help="n x m sample matrix CSV")
    p.add_argument("--probes", required=True)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("bench", parents=[common], help="tensor vs dense timings")
    p.add_argument("--sizes", required=True, help="factor sizes, e.g. 1,40,80 or 40x30")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--dense-budget", type=int, default=4096)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = _load_config(args)
        return args.func(args, cfg)
    except NotPositiveDefiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_PD
    except (ParseError, UsageError, DimensionError, DuplicatePointError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
