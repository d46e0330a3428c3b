"""Command-line interface.

Subcommands map one-to-one onto the library: ``sample`` writes a mask,
``assemble`` a matrix, ``spectrum`` counts/eigenvalues, ``ids`` an ensemble
curve, ``certify`` a certificate, ``fit`` an exponent fit, and ``demo`` runs a
small end-to-end pipeline.  All randomness flows from ``--seed``.  Exit codes:
0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import certify as cert_mod
from . import geometry, ids, operators, spectra
from .errors import (EigensolverError, FactorizationError, PerfospecError,
                     ValidationError)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _timestamp(args) -> str | None:
    if getattr(args, "no_timestamp", False):
        return None
    return datetime.now(timezone.utc).isoformat()


def _add_box_args(p: argparse.ArgumentParser):
    p.add_argument("--d", type=int, default=None, help="spatial dimension")
    p.add_argument("--L", type=float, default=None, help="box side length")


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=["bernoulli", "poisson", "periodic"], default=None)
    p.add_argument("--p", type=float, default=None, help="site probability (bernoulli)")
    p.add_argument("--c", type=float, default=None, help="intensity per unit volume (poisson)")
    p.add_argument("--beta", type=float, default=None, help="obstacle side (periodic)")
    p.add_argument("--shape-side", type=float, default=None,
                   help="side of the cubic obstacle shape (bernoulli/poisson)")


def _build_model(args, d: int) -> geometry.DisorderModel:
    if args.model is None:
        raise ValidationError("--model is required")
    if args.model == "periodic":
        if args.beta is None:
            raise ValidationError("periodic model needs --beta")
        return geometry.Periodic(beta=args.beta)
    if args.shape_side is None:
        raise ValidationError(f"{args.model} model needs --shape-side")
    shape = geometry.ObstacleShape.box(args.shape_side, d)
    if args.model == "bernoulli":
        if args.p is None:
            raise ValidationError("bernoulli model needs --p")
        return geometry.Bernoulli(p=args.p, shape=shape)
    if args.c is None:
        raise ValidationError("poisson model needs --c")
    return geometry.Poisson(c=args.c, shape=shape)


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ValidationError(f"--{name.replace('_', '-')} is required")


def _sample_mask(args) -> geometry.ObstacleMask:
    _require(args, "d", "L", "M")
    box = geometry.BoxSpec(d=args.d, L=args.L)
    model = _build_model(args, box.d)
    seed = args.seed if args.seed is not None else 0
    realization = geometry.sample_model(model, box, seed)
    return geometry.rasterize(realization, geometry.model_shape(model, box.d),
                              box, args.M)


def _cmd_sample(args) -> int:
    mask = _sample_mask(args)
    Path(args.out).write_text(geometry.mask_to_json(mask))
    print(f"wrote mask: {args.out} (occupied {mask.occupied_count}/{mask.occupied.size}, "
          f"fraction {mask.fraction:.6g})")
    return EXIT_OK


def _load_mask(path: str) -> geometry.ObstacleMask:
    return geometry.mask_from_json(Path(path).read_text())


def _cmd_assemble(args) -> int:
    mask = _load_mask(args.mask)
    op = operators.assemble(mask, operators.BoundaryCondition.parse(args.bc))
    Path(args.out).write_text(operators.operator_to_text(op))
    print(f"wrote matrix: {args.out} (dimension {op.dimension})")
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    mask = _load_mask(args.mask)
    op = operators.assemble(mask, operators.BoundaryCondition.parse(args.bc))
    doc = {
        "d": mask.box.d, "L": mask.box.L, "M": mask.cells_per_unit,
        "bc": args.bc.upper(), "dimension": op.dimension, "seed": mask.seed,
    }
    if args.energies:
        energies = [float(tok) for tok in args.energies.split(",") if tok.strip()]
        doc["counts"] = [
            {"E": result.energy, "count": result.count, "method": result.method}
            for result in (spectra.count_below(op, e) for e in energies)]
    if args.k:
        pairs = spectra.lowest_k(op, args.k)
        doc["eigenvalues"] = [value for value, _ in pairs]
    stamp = _timestamp(args)
    if stamp is not None:
        doc["timestamp"] = stamp
    Path(args.out).write_text(json.dumps(doc, indent=2))
    print(f"wrote spectrum: {args.out}")
    return EXIT_OK


def _apply_config_file(args):
    if not getattr(args, "config", None):
        return
    overrides = json.loads(Path(args.config).read_text())
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValidationError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _cmd_ids(args) -> int:
    _apply_config_file(args)
    _require(args, "d", "L", "M", "realizations", "seed", "emin", "emax", "points")
    box = geometry.BoxSpec(d=args.d, L=args.L)
    model = _build_model(args, box.d)
    spec = ids.EnsembleSpec(model=model, box=box, resolution=args.M,
                            realizations=args.realizations, master_seed=args.seed)
    energies = np.geomspace(args.emin, args.emax, args.points)
    curve = ids.estimate_ids(spec, energies, jobs=args.jobs)
    Path(args.out_csv).write_text(ids.curve_to_csv(curve))
    meta = {
        "model": geometry.model_descriptor(model),
        "d": box.d, "L": box.L, "M": args.M,
        "realizations": args.realizations, "master_seed": args.seed,
        "emin": args.emin, "emax": args.emax, "points": args.points,
        "jobs": args.jobs, "csv": str(args.out_csv),
    }
    stamp = _timestamp(args)
    if stamp is not None:
        meta["timestamp"] = stamp
    if args.out_meta:
        Path(args.out_meta).write_text(json.dumps(meta, indent=2))
    violations = int((curve.n_dirichlet > curve.n_neumann + 1e-15).sum())
    print(f"wrote curve: {args.out_csv} ({args.points} energies, "
          f"bracketing violations: {violations})")
    return EXIT_OK


def _cmd_certify(args) -> int:
    _require(args, "E")
    if args.mask:
        mask = _load_mask(args.mask)
        certificate = cert_mod.certify_obstacle(mask, args.E)
    else:
        _require(args, "d", "L")
        box = geometry.BoxSpec(d=args.d, L=args.L)
        model = _build_model(args, box.d)
        if isinstance(model, geometry.Periodic) and args.M is None:
            # exact periodic volume: fraction = (2*beta)^d, no grid needed
            fraction = (2.0 * model.beta) ** box.d
            certificate = cert_mod.certify_from_fraction(box, fraction, args.E)
        else:
            certificate = cert_mod.certify_obstacle(_sample_mask(args), args.E)
    Path(args.out).write_text(cert_mod.certificate_to_json(certificate, _timestamp(args)))
    print(f"wrote certificate: {args.out} (eps1 {certificate.eps1:.6g}, "
          f"count {certificate.certified_count} at energy "
          f"{certificate.certified_energy:.6g})")
    return EXIT_OK


def _cmd_fit(args) -> int:
    curve = ids.curve_from_csv(Path(args.input).read_text())
    window = tuple(args.window) if args.window else None
    fit = ids.fit_exponent(curve, kind=args.kind, side=args.side, window=window)
    text = ids.fit_to_json(fit, side=args.side)
    if not getattr(args, "no_timestamp", False):
        doc = json.loads(text)
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        text = json.dumps(doc, indent=2)
    Path(args.out).write_text(text)
    print(f"wrote fit: {args.out} (exponent {fit.exponent:.6g}, "
          f"preference {fit.model_preference})")
    return EXIT_OK


def _cmd_demo(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    box = geometry.BoxSpec(d=1, L=32.0)
    model = geometry.Bernoulli(p=0.5, shape=geometry.ObstacleShape.box(0.5, 1))
    resolution, seed = 8, args.seed if args.seed is not None else 7

    mask = geometry.rasterize(geometry.sample_model(model, box, seed),
                              model.shape, box, resolution)
    (outdir / "mask.json").write_text(geometry.mask_to_json(mask))
    op_nd = operators.assemble(mask, operators.ND)
    (outdir / "matrix_nd.txt").write_text(operators.operator_to_text(op_nd))

    spec = ids.EnsembleSpec(model=model, box=box, resolution=resolution,
                            realizations=args.realizations, master_seed=seed)
    energies = np.geomspace(0.05, 5.0, 24)
    curve = ids.estimate_ids(spec, energies, jobs=args.jobs)
    (outdir / "curve.csv").write_text(ids.curve_to_csv(curve))

    violations = int((curve.n_dirichlet > curve.n_neumann + 1e-15).sum())
    print(f"bracketing: dirichlet <= neumann at all {energies.size} energies: "
          f"{'ok' if violations == 0 else f'{violations} violations'}")

    lifshitz = ids.fit_exponent(curve, "lifshitz", "dirichlet")
    vanhove = ids.fit_exponent(curve, "vanhove", "neumann",
                               window=(float(energies[0]), float(energies[-1])))
    (outdir / "fit_lifshitz.json").write_text(ids.fit_to_json(lifshitz, "dirichlet"))
    (outdir / "fit_vanhove.json").write_text(ids.fit_to_json(vanhove, "neumann"))
    print(f"dirichlet double-log slope {lifshitz.exponent:.3f} "
          f"(model preference {lifshitz.model_preference})")
    print(f"neumann log-log slope {vanhove.exponent:.3f} "
          f"(model preference {vanhove.model_preference})")

    certificate = cert_mod.certify_obstacle(mask, 1.0)
    (outdir / "certificate.json").write_text(
        cert_mod.certificate_to_json(certificate, _timestamp(args)))
    count_nd = spectra.count_below(op_nd, certificate.certified_energy).count
    sound = count_nd >= certificate.certified_count
    print(f"certificate: count {count_nd} at certified energy "
          f"{certificate.certified_energy:.4g} >= certified {certificate.certified_count}: "
          f"{'ok' if sound else 'VIOLATED'}")

    results = [spectra.count_below(op_nd, float(e)) for e in energies]
    counts_doc = {
        "d": 1, "L": box.L, "M": resolution, "bc": "ND",
        "dimension": op_nd.dimension, "seed": seed,
        "counts": [{"E": r.energy, "count": r.count, "method": r.method}
                   for r in results],
    }
    (outdir / "spectrum_nd.json").write_text(json.dumps(counts_doc, indent=2))
    print(f"demo artifacts in {outdir}")
    return EXIT_OK if violations == 0 and sound else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perfospec",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a disorder realization and write its mask")
    _add_box_args(p)
    _add_model_args(p)
    p.add_argument("--M", type=int, default=None, help="grid cells per unit length")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("assemble", help="assemble an operator from a mask file")
    p.add_argument("--mask", required=True)
    p.add_argument("--bc", default="DD", help="two letters, obstacle then box: DD NN ND DN")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_assemble)

    p = sub.add_parser("spectrum", help="counts and/or lowest eigenvalues of a mask's operator")
    p.add_argument("--mask", required=True)
    p.add_argument("--bc", default="DD")
    p.add_argument("--energies", default=None, help="comma-separated energies to count at")
    p.add_argument("--k", type=int, default=None, help="number of lowest eigenvalues")
    p.add_argument("--out", required=True)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("ids", help="ensemble estimate of the normalized counting functions")
    _add_box_args(p)
    _add_model_args(p)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--emin", type=float, default=None)
    p.add_argument("--emax", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config", default=None, help="JSON file with defaults; flags override")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-meta", default=None)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_ids)

    p = sub.add_parser("certify", help="trial-family certificate for a mask or model")
    _add_box_args(p)
    _add_model_args(p)
    p.add_argument("--mask", default=None, help="mask JSON (alternative to model flags)")
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--E", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("fit", help="exponent fit on an exported curve")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=["lifshitz", "vanhove"], required=True)
    p.add_argument("--side", choices=["dirichlet", "neumann"], required=True)
    p.add_argument("--window", type=float, nargs=2, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("demo", help="small end-to-end d=1 run writing all artifact kinds")
    p.add_argument("--outdir", required=True)
    p.add_argument("--realizations", type=int, default=60)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FactorizationError, EigensolverError) as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PerfospecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
