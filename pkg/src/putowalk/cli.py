"""Command-line front end.

Exit codes: 0 ok, 1 some verdict inconclusive, 2 invalid input.
JSON goes to stdout (or ``--out``) with sorted keys so reruns diff cleanly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .criteria import Verdict, candidate_spectrum, scan_symbol, structural_criteria
from .deformation import sweep, sweep_csv
from .document import DocumentError, load_vector_document, load_walk, walk_summary
from .eigenspace import check_resolved, wiener_check
from .lattice import (
    distribution,
    evolve,
    initial_state,
    time_average_series,
    write_distribution_csv,
)
from .torus import TorusGrid

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INVALID = 0, 1, 2
DEFAULT_SEED = 0


def _clean(obj):
    """Replace non-finite floats with None so the output is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def parse_complex_list(text, name):
    try:
        return np.array([complex(t.strip().replace(" ", "")) for t in text.split(",")])
    except ValueError:
        raise DocumentError(f"--{name}: cannot parse {text!r} as comma-separated complex numbers") from None


def parse_site(text, d):
    try:
        x = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise DocumentError(f"--x: cannot parse {text!r} as integers") from None
    if len(x) != d:
        raise DocumentError(f"--x: site has {len(x)} coordinates, walk lives on Z^{d}")
    return x


def _phi(args, walk):
    phi = parse_complex_list(args.phi, "phi")
    if phi.size != walk.coin_dim:
        raise DocumentError(f"--phi: {phi.size} entries, coin space is C^{walk.coin_dim}")
    if abs(np.linalg.norm(phi) - 1.0) > 1e-10:
        raise DocumentError(f"--phi: not a unit vector (norm {np.linalg.norm(phi):.12g})")
    return phi


def cmd_validate(args):
    walk = load_walk(args.file)
    _emit(dumps({"command": "validate", "valid": True, "walk": walk_summary(walk)}), args.out)
    return EXIT_OK


def _grid_points(args, d):
    if args.grid is not None:
        return args.grid
    return 64 if d <= 2 else 32


def cmd_spectrum(args):
    walk = load_walk(args.file)
    cands = candidate_spectrum(walk, args.samples, args.seed)
    grid = TorusGrid(walk.dimension, _grid_points(args, walk.dimension))
    scanned = list(cands)
    coin = walk.coin
    # Fourier-type coins: report every fourth root, including ones missing from the coin
    extra = [1, 1j, -1, -1j] if coin.is_fourier and not coin.is_grover else []
    for lam in list(coin.spectrum) + extra:
        if all(abs(lam - c) >= 1e-6 for c in scanned):
            scanned.append(lam)
    reports = [scan_symbol(walk, w, grid).to_dict() for w in scanned]
    doc = {
        "command": "spectrum",
        "seed": args.seed,
        "samples": args.samples,
        "backend": BACKEND,
        "walk": walk_summary(walk),
        "candidates": [[c.real, c.imag] for c in cands],
        "reports": reports,
    }
    _emit(dumps(doc), args.out)
    inconclusive = any(r["verdict"] == Verdict.INCONCLUSIVE.value for r in reports)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def cmd_criteria(args):
    walk = load_walk(args.file)
    results = [r.to_dict() for r in structural_criteria(walk)]
    _emit(dumps({"command": "criteria", "walk": walk_summary(walk), "criteria": results}), args.out)
    return EXIT_OK


def cmd_simulate(args):
    walk = load_walk(args.file)
    phi = _phi(args, walk)
    if args.steps < 0:
        raise DocumentError("--steps must be >= 0")
    state = evolve(walk, initial_state(walk.dimension, walk.coin_dim, phi), args.steps)
    dist = distribution(state)
    average = None
    if args.average is not None:
        if args.average < 1:
            raise DocumentError("--average must be >= 1")
        acc, radius = time_average_series(walk, phi, args.average)
        average = {
            tuple(int(i) - radius for i in idx): float(acc[idx])
            for idx in zip(*np.nonzero(acc))
        }
    _emit(write_distribution_csv(dist, walk.dimension, average=average), args.out)
    return EXIT_OK


def cmd_localize(args):
    walk = load_walk(args.file)
    phi = _phi(args, walk)
    x = parse_site(args.x, walk.dimension) if args.x else (0,) * walk.dimension
    try:
        check_resolved(x, args.quad)
    except ValueError as exc:
        raise DocumentError(f"--quad: {exc}") from None
    res = wiener_check(walk, phi, x, args.N, args.quad, args.samples, args.seed)
    doc = {"command": "localize", "seed": args.seed, "walk": walk_summary(walk)}
    doc.update(res.to_dict())
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_deform(args):
    mu = load_vector_document(args.file)
    try:
        rows = sweep(mu, samples=args.samples, grid_points=args.grid or 64)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    _emit(sweep_csv(rows), args.out)
    bad = any(Verdict.INCONCLUSIVE.value in (r.plus_verdict, r.minus_verdict) for r in rows)
    return EXIT_INCONCLUSIVE if bad else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="putowalk",
        description="Eigenvalues, eigenprojections and simulation of periodic quantum walks on Z^d.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, file_help="walk document (JSON)"):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help=file_help)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "check a walk document")

    p = add("spectrum", cmd_spectrum, "candidate eigenvalues and grid-certified verdicts")
    p.add_argument("--grid", type=int, default=None, help="points per torus axis (64; 32 for d >= 3)")
    p.add_argument("--samples", type=int, default=50, help="random torus points for candidates")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    add("criteria", cmd_criteria, "structural eigenvalue criteria")

    p = add("simulate", cmd_simulate, "probability distribution after n steps (CSV)")
    p.add_argument("--phi", required=True, help="initial coin vector, e.g. 0,1,0 or 0.6,0.8j")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--average", type=int, default=None, help="add Cesaro average over 1..N")

    p = add("localize", cmd_localize, "time average versus eigenprojection at one site")
    p.add_argument("--phi", required=True)
    p.add_argument("--x", default=None, help="site, e.g. 0,0 (default origin)")
    p.add_argument("--N", type=int, default=4000)
    p.add_argument("--quad", type=int, default=2048, help="quadrature points per axis")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = add("deform", cmd_deform, "eigenvalue sweep along the coin path (CSV)",
            file_help='JSON with "mu": target reflection vector')
    p.add_argument("--samples", type=int, default=5, help="number of t values in [0, 1]")
    p.add_argument("--grid", type=int, default=None)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.command == "validate":
            _emit(dumps({"command": "validate", "valid": False, "error": str(exc)}), args.out)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
