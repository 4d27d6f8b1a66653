"""Command-line surface.

Exit codes: 0 success, 2 user/config error, 3 data-consistency error,
4 numerical divergence.
"""

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import fileio
from .core import ComplexField, Volume, frobenius_norm, inner_product_2d, inner_product_3d
from .errors import DimensionMismatchError, DivergenceError, Holo3DError, ParameterError
from .metrics import data_domain_error, object_domain_error
from .phantoms import make_phantom
from .propagation import adjoint, forward
from .solver import fista, spectral_norm

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DIVERGED = 4


class DataConsistencyError(Holo3DError):
    """File contents disagree with the configuration."""


def _say(args, msg):
    if not args.quiet:
        print(msg)


def _load_config(args):
    if args.config is None:
        raise ParameterError("--config is required")
    return fileio.load_config(args.config)


def _check_header(header, optics, what):
    """Cross-check a file header against the configured optics."""
    wl = header.get("wavelength_um")
    if wl is not None and not np.isclose(wl, optics.wavelength_um, rtol=1e-12):
        raise DataConsistencyError(
            f"{what} wavelength {wl} um does not match config {optics.wavelength_um} um"
        )
    if header["nx"] != optics.nx or header["ny"] != optics.ny:
        raise DataConsistencyError(
            f"{what} grid {header['nx']}x{header['ny']} does not match config "
            f"{optics.nx}x{optics.ny}"
        )
    if not np.isclose(header["pitch_um"], optics.pitch_um, rtol=1e-12):
        raise DataConsistencyError(f"{what} pitch does not match config")


def cmd_phantom(args):
    cfg = _load_config(args)
    if cfg.phantom is None:
        raise ParameterError("config has no phantom section")
    setup = cfg.optics.make_setup()
    vol = make_phantom(cfg.phantom, setup)
    fileio.write_volume(args.out, vol, setup)
    _say(args, f"wrote phantom {cfg.phantom.kind.value} "
               f"({setup.grid.nx}x{setup.grid.ny}x{setup.num_planes}) to {args.out}")
    return EXIT_OK


def cmd_forward(args):
    cfg = _load_config(args)
    plan = cfg.optics.make_plan()
    vol, header = fileio.read_volume(args.volume)
    _check_header(header, cfg.optics, "volume")
    try:
        field = forward(vol, plan)
    except DimensionMismatchError as exc:
        raise DataConsistencyError(str(exc)) from None
    fileio.write_field(args.out, field, plan.setup)
    _say(args, f"wrote detector field to {args.out}")
    return EXIT_OK


def cmd_backproject(args):
    cfg = _load_config(args)
    plan = cfg.optics.make_plan()
    field, header = fileio.read_field(args.field)
    _check_header(header, cfg.optics, "field")
    try:
        vol = adjoint(field, plan)
    except DimensionMismatchError as exc:
        raise DataConsistencyError(str(exc)) from None
    fileio.write_volume(args.out, vol, plan.setup)
    _say(args, f"wrote back-projected volume to {args.out}")
    return EXIT_OK


def cmd_reconstruct(args):
    cfg = _load_config(args)
    if cfg.solver is None:
        raise ParameterError(
            "config has no solver section (alpha, max_iterations, regularizer required)"
        )
    solver_cfg = cfg.solver
    if args.seed is not None:
        solver_cfg = dataclasses.replace(solver_cfg, seed=args.seed)
    plan = cfg.optics.make_plan()
    field, header = fileio.read_field(args.field)
    _check_header(header, cfg.optics, "field")
    truth = None
    if args.truth is not None:
        truth, theader = fileio.read_volume(args.truth)
        _check_header(theader, cfg.optics, "truth volume")
    try:
        vol, report = fista(field, plan, solver_cfg, truth=truth)
    except DimensionMismatchError as exc:
        raise DataConsistencyError(str(exc)) from None
    fileio.write_volume(args.out, vol, plan.setup)
    extra = {"data_error": data_domain_error(field, vol, plan)}
    if truth is not None:
        extra["object_error"] = object_domain_error(truth, vol)
    report_path = args.report or (str(args.out) + ".report.json")
    fileio.write_report(report_path, report, extra)
    _say(args, f"reconstruction finished after {report.iterations} iterations; "
               f"data error {extra['data_error']:.3e}"
               + (f", object error {extra['object_error']:.4f}" if truth else ""))
    return EXIT_OK


def cmd_adjoint_test(args):
    cfg = _load_config(args)
    plan = cfg.optics.make_plan()
    setup = plan.setup
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    shape3 = (setup.grid.nx, setup.grid.ny, setup.num_planes)
    worst = 0.0
    for _ in range(args.trials):
        u = Volume(setup.grid, setup.zplanes,
                   rng.standard_normal(shape3) + 1j * rng.standard_normal(shape3))
        v = ComplexField(setup.grid,
                         rng.standard_normal(setup.grid.shape)
                         + 1j * rng.standard_normal(setup.grid.shape))
        au = forward(u, plan)
        atv = adjoint(v, plan)
        if args.corrupt_adjoint:
            bad = atv.values.copy()
            bad[0, 0, 0] += 1.0
            atv = Volume(setup.grid, setup.zplanes, bad)
        lhs = inner_product_2d(au, v)
        rhs = inner_product_3d(u, atv)
        denom = frobenius_norm(au) * frobenius_norm(v)
        worst = max(worst, abs(lhs - rhs) / denom)
    _say(args, f"max relative adjoint mismatch over {args.trials} trials: {worst:.3e}")
    if worst >= args.tolerance:
        print(f"adjoint identity violated: {worst:.3e} >= {args.tolerance:.1e}",
              file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_spectral_norm(args):
    cfg = _load_config(args)
    if cfg.solver is None:
        raise ParameterError("config has no solver section")
    plan = cfg.optics.make_plan()
    kappa = spectral_norm(plan, cfg.solver)
    print(f"{kappa:.12g}")
    return EXIT_OK


def cmd_metrics(args):
    cfg = _load_config(args)
    plan = cfg.optics.make_plan()
    truth, theader = fileio.read_volume(args.truth)
    estimate, eheader = fileio.read_volume(args.estimate)
    _check_header(theader, cfg.optics, "truth volume")
    _check_header(eheader, cfg.optics, "estimate volume")
    out = {"object_error": object_domain_error(truth, estimate)}
    if args.field is not None:
        field, fheader = fileio.read_field(args.field)
        _check_header(fheader, cfg.optics, "field")
        out["data_error"] = data_domain_error(field, estimate, plan)
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


_CHANNELS = {
    "magnitude": np.abs,
    "real": np.real,
    "imag": np.imag,
    "phase": np.angle,
}


def cmd_export_slices(args):
    vol, header = fileio.read_volume(args.volume)
    planes = [int(p) for p in args.planes.split(",")]
    for p in planes:
        if not 1 <= p <= vol.num_planes:
            raise ParameterError(f"plane {p} out of range 1..{vol.num_planes}")
    chan = _CHANNELS[args.channel]
    scaling = {"channel": args.channel, "planes": {}}
    for p in planes:
        img = chan(vol.values[:, :, p - 1]).astype(np.float64)
        lo, hi = float(img.min()), float(img.max())
        if hi > lo:
            q = np.round((img - lo) / (hi - lo) * 65535.0)
        else:
            q = np.zeros_like(img)
        path = f"{args.out}_p{p:02d}.pgm"
        fileio.write_pgm16(path, q.astype(np.uint16))
        scaling["planes"][str(p)] = {"min": lo, "max": hi, "file": path}
        _say(args, f"wrote {path}")
    fileio._atomic_write_json(f"{args.out}_scaling.json", scaling)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="holo3d",
        description="3D object reconstruction from a 2D complex hologram-plane field",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--config", help="path to a JSON run configuration")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--quiet", action="store_true")
        if out:
            p.add_argument("--out", required=True, help="output path")

    p = sub.add_parser("phantom", help="generate a test object volume")
    common(p)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("forward", help="propagate a volume to the detector plane")
    common(p)
    p.add_argument("volume", help="input volume file")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("backproject", help="replay a detector field into the volume")
    common(p)
    p.add_argument("field", help="input field file")
    p.set_defaults(func=cmd_backproject)

    p = sub.add_parser("reconstruct", help="iterative regularized reconstruction")
    common(p)
    p.add_argument("field", help="input field file")
    p.add_argument("--truth", help="optional ground-truth volume for error history")
    p.add_argument("--report", help="report path (default: <out>.report.json)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("adjoint-test", help="verify the forward/adjoint pairing")
    common(p, out=False)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--corrupt-adjoint", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_adjoint_test)

    p = sub.add_parser("spectral-norm", help="power-iteration estimate of the step constant")
    common(p, out=False)
    p.set_defaults(func=cmd_spectral_norm)

    p = sub.add_parser("metrics", help="object/data domain errors between files")
    common(p, out=False)
    p.add_argument("--truth", required=True)
    p.add_argument("--estimate", required=True)
    p.add_argument("--field")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export-slices", help="export volume planes as 16-bit graymaps")
    p.add_argument("volume", help="input volume file")
    p.add_argument("--planes", required=True, help="comma-separated 1-based plane list")
    p.add_argument("--channel", choices=sorted(_CHANNELS), default="magnitude")
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_export_slices)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataConsistencyError, DimensionMismatchError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ParameterError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
