"""Command-line entry point.

Every subcommand is a pure function of its flags: seeds feed the generators
through the documented stream-derivation mixer, aggregation is in index
order, and output artifacts embed {version, schema, config, seed}, so two
runs with identical flags produce byte-identical files regardless of the
worker count.  CSV files carry the provenance as leading '# key=value'
comment lines; JSON files carry it as a header object.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .density import (
    cone_density_exact,
    cone_density_lower,
    cone_density_upper,
    empirical_density,
    parabola_density_upper,
)
from .film import compare_film_to_necklace, film_heat_bath_run
from .gibbs import compositions, partition_function, pattern_probability, signature_frequencies_direct
from .necklace import contact_set, envelope_eval
from .seeding import derive_seed
from .shapes import NumericError, ShapeModel, build_sos_wulff_profile, cone, parabola, semicircle, sos_wulff
from .substrate import SosParams, gen_iid_exponential, gen_sos_substrate

SCHEMA_VERSION = 1


def _config_dict(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return cfg


def _provenance(args: argparse.Namespace) -> dict:
    return {"version": __version__, "schema_version": SCHEMA_VERSION,
            "config": _config_dict(args)}


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: str, args: argparse.Namespace, header: list[str],
               rows) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# version={__version__}\n")
        f.write(f"# schema_version={SCHEMA_VERSION}\n")
        for k, v in _config_dict(args).items():
            f.write(f"# {k}={v}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, args: argparse.Namespace, payload) -> None:
    doc = {"provenance": _provenance(args), "data": payload}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def _summary(command: str, **fields) -> None:
    print(json.dumps({"command": command, **fields}))


def _add_shape_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shape", required=True,
                   choices=["cone", "parabola", "semicircle", "sos-wulff"])
    p.add_argument("--lam", "--lambda", dest="lam", type=float, default=None,
                   help="slope/curvature parameter (cone, parabola, semicircle)")
    p.add_argument("--j2", type=float, default=None, help="sos-wulff gradient coupling")
    p.add_argument("--k2", type=float, default=None, help="sos-wulff pressure")
    p.add_argument("--nodes", type=int, default=4096, help="sos-wulff table nodes")


def _shape_from_args(args: argparse.Namespace) -> ShapeModel:
    if args.shape == "sos-wulff":
        if args.j2 is None or args.k2 is None:
            raise ValueError("sos-wulff needs --j2 and --k2")
        return sos_wulff(args.j2, args.k2, args.nodes)
    if args.lam is None:
        raise ValueError(f"{args.shape} needs --lam")
    return {"cone": cone, "parabola": parabola, "semicircle": semicircle}[args.shape](args.lam)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_gen_substrate(args: argparse.Namespace) -> int:
    if args.kind == "iid":
        sub = gen_iid_exponential(args.n, args.seed)
    else:
        params = SosParams(j1=args.j1, k1=args.k1, sweeps=args.sweeps,
                           burn_in=args.burn_in)
        sub = gen_sos_substrate(args.n, params, args.seed)
    _write_csv(args.out, args, ["i", "h"],
               ((i, float(h)) for i, h in enumerate(sub.heights)))
    _summary("gen-substrate", n=sub.n, kind=args.kind, seed=args.seed,
             mean_height=float(sub.heights.mean()), out=args.out)
    return 0


def cmd_wulff_profile(args: argparse.Namespace) -> int:
    profile = build_sos_wulff_profile(args.j2, args.k2, args.nodes)
    _write_csv(args.out, args, ["x", "w"],
               ((float(x), float(w)) for x, w in zip(profile.xs, profile.ws)))
    _summary("wulff-profile", j2=args.j2, k2=args.k2, nodes=args.nodes,
             support_radius=profile.support_radius, out=args.out)
    return 0


def cmd_necklace(args: argparse.Namespace) -> int:
    shape = _shape_from_args(args)
    sub = gen_iid_exponential(args.n, args.seed)
    neck = contact_set(sub, shape, method=args.method)
    sites, heights = neck.contacts
    _write_csv(args.out, args, ["n", "b", "h"],
               ((i, int(b), float(h)) for i, (b, h) in enumerate(zip(sites, heights))))
    if args.envelope_out:
        xs = np.arange(sites[0], sites[-1] + args.envelope_step / 2, args.envelope_step)
        env = envelope_eval(neck, xs)
        _write_csv(args.envelope_out, args, ["x", "I"],
                   ((float(x), float(v)) for x, v in zip(xs, env)))
    _summary("necklace", n=args.n, contacts=int(sites.size), seed=args.seed,
             out=args.out)
    return 0


def cmd_density_scan(args: argparse.Namespace) -> int:
    records = []
    for li, lam in enumerate(args.lam):
        if args.shape == "cone":
            shape = cone(lam)
        elif args.shape == "parabola":
            shape = parabola(lam)
        else:
            raise ValueError("density-scan supports cone and parabola")
        est = empirical_density(shape, args.n, args.samples,
                                derive_seed(args.seed, li), workers=args.workers)
        rec = {
            "shape": args.shape,
            "lambda": lam,
            "p_hat": est.p_hat,
            "se": est.se,
            "exact": cone_density_exact(lam) if args.shape == "cone" else None,
            "upper": (cone_density_upper(lam) if args.shape == "cone"
                      else parabola_density_upper(lam) if lam < math.pi / 4 else None),
            "lower": (cone_density_lower(lam) if args.shape == "cone" and lam < 1
                      else None),
            "n": est.n,
            "samples": est.samples,
            "margin": est.margin,
            "seed": est.seed,
        }
        records.append(rec)
    _write_json(args.out, args, records)
    _summary("density-scan", shape=args.shape, lambdas=args.lam, out=args.out)
    return 0


def cmd_gibbs_check(args: argparse.Namespace) -> int:
    shape = _shape_from_args(args)
    xi, xi_se = partition_function(shape, args.L, args.mc_samples, args.seed)
    emp = signature_frequencies_direct(shape, args.L, args.direct_samples,
                                       derive_seed(args.seed, 1 << 32))
    signatures = []
    for ci, comp in enumerate(compositions(args.L)):
        p, se = pattern_probability(shape, args.L, comp, args.mc_samples,
                                    derive_seed(args.seed, ci))
        p_emp, se_emp = emp.get(comp, (0.0, 0.0))
        signatures.append({"l": list(comp), "p_gibbs": p, "se": se,
                           "p_empirical": p_emp, "se_emp": se_emp})
    payload = {"L": args.L, "shape": shape.label(), "Xi": xi, "Xi_se": xi_se,
               "signatures": signatures}
    _write_json(args.out, args, payload)
    _summary("gibbs-check", L=args.L, Xi=xi, Xi_se=xi_se, out=args.out)
    return 0


def cmd_film_mc(args: argparse.Namespace) -> int:
    params = SosParams(j1=args.j1, k1=args.k1, sweeps=args.substrate_sweeps,
                       burn_in=args.substrate_burn_in)
    sub = gen_sos_substrate(args.n, params, derive_seed(args.seed, 0))
    film = film_heat_bath_run(sub, args.j2, args.k2, args.burn_in, args.measure,
                              derive_seed(args.seed, 1))
    shape = sos_wulff(args.j2, args.k2, args.nodes)
    comp = compare_film_to_necklace(film, shape, exclusion=args.exclusion)
    mean_h2 = film.mean_h2
    rows = ((i, float(sub.heights[i]), float(mean_h2[i]), float(comp.envelope[i]),
             float(comp.deviation[i])) for i in range(sub.n))
    _write_csv(args.out, args, ["i", "h1", "h2_avg", "I", "d"], rows)
    summary = comp.to_dict()
    if args.summary_out:
        _write_json(args.summary_out, args, summary)
    _summary("film-mc", n=args.n, seed=args.seed, out=args.out, **summary)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wulffilm",
        description="Envelope films of convex profiles over disordered substrates")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    default_workers = int(os.environ.get("WULFFILM_WORKERS", "1"))

    p = sub.add_parser("gen-substrate", help="generate a random substrate (CSV i,h)")
    p.add_argument("--kind", choices=["iid", "sos"], default="iid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--j1", type=float, default=1.0)
    p.add_argument("--k1", type=float, default=0.5)
    p.add_argument("--sweeps", type=int, default=1)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_substrate)

    p = sub.add_parser("wulff-profile", help="tabulate the SOS profile (CSV x,w)")
    p.add_argument("--j2", type=float, required=True)
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--nodes", type=int, default=4096)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_wulff_profile)

    p = sub.add_parser("necklace", help="contact set of an iid substrate (CSV n,b,h)")
    _add_shape_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method", choices=["auto", "stack", "hull", "tent"], default="auto")
    p.add_argument("--out", required=True)
    p.add_argument("--envelope-out", default=None, help="also sample the envelope (CSV x,I)")
    p.add_argument("--envelope-step", type=float, default=0.25)
    p.set_defaults(func=cmd_necklace)

    p = sub.add_parser("density-scan", help="contact density estimates vs formulas (JSON)")
    p.add_argument("--shape", choices=["cone", "parabola"], required=True)
    p.add_argument("--lam", "--lambda", dest="lam", type=float, nargs="+", required=True)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=default_workers)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_density_scan)

    p = sub.add_parser("gibbs-check", help="partition function and signature probabilities (JSON)")
    _add_shape_flags(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.add_argument("--direct-samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gibbs_check)

    p = sub.add_parser("film-mc", help="thermal film vs necklace envelope (CSV i,h1,h2_avg,I,d)")
    p.add_argument("--j1", type=float, default=1.0)
    p.add_argument("--k1", type=float, default=0.5)
    p.add_argument("--j2", type=float, required=True)
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--measure", type=int, default=100_000)
    p.add_argument("--substrate-sweeps", type=int, default=1)
    p.add_argument("--substrate-burn-in", type=int, default=100)
    p.add_argument("--nodes", type=int, default=4096)
    p.add_argument("--exclusion", type=float, default=1.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--summary-out", default=None)
    p.set_defaults(func=cmd_film_mc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # UnreachablePair and anything else domain-shaped
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
