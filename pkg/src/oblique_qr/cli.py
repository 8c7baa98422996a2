"""Command-line entry point: ``oblique-qr {sweep,rankdef,factorize}``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import bench
from .errors import InitialBasisFailure, MatrixMarketError
from .factor import OrthOptions
from .mmio import read_matrix


def parse_range(text):
    """``"0:16"`` -> 0..16 inclusive; ``"a:b:s"`` uses step ``s``; commas list values."""
    if "," in text:
        return [float(v) for v in text.split(",") if v.strip()]
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) in (2, 3):
            lo, hi = float(parts[0]), float(parts[1])
            step = float(parts[2]) if len(parts) == 3 else 1.0
            if step <= 0:
                raise ValueError
            count = int(round((hi - lo) / step)) + 1
            return [lo + i * step for i in range(max(count, 0))]
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad range {text!r}; use 'lo:hi', 'lo:hi:step' or a comma list")


def _on_off(text):
    if text.lower() in ("on", "yes", "true", "1"):
        return True
    if text.lower() in ("off", "no", "false", "0"):
        return False
    raise argparse.ArgumentTypeError("expected on|off")


def _algorithms(text):
    algs = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in algs if a not in bench.ALGORITHMS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {', '.join(bad)}")
    return algs


def _opts(args):
    return OrthOptions(reorth=args.reorth, deflation_tol=args.deflation_tol, panel_width=args.panel_width)


def _add_orth_flags(p):
    p.add_argument("--reorth", type=_on_off, default=True, metavar="on|off", help="re-project Householder vectors (default on)")
    p.add_argument("--deflation-tol", type=float, default=0.0, help="relative deflation threshold (default 0: exact zero test)")
    p.add_argument("--panel-width", type=int, default=32, help="panel width of hh_block (default 32)")
    p.add_argument("--timing", action="store_true", help="fill the runtime_ms column (makes output run-dependent)")


def build_parser():
    parser = argparse.ArgumentParser(prog="oblique-qr", description="Householder QR in a B-inner product: experiments and tools.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="loss of orthogonality / residual over a range of cond(X)")
    sw.add_argument("--n", type=int, default=2000)
    sw.add_argument("--k", type=int, default=100)
    sw.add_argument("--log-kappa-b", type=float, default=5.0)
    sw.add_argument("--log-kappa-x", type=parse_range, default=parse_range("0:16"))
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--algorithms", type=_algorithms, default=list(bench.ALGORITHMS))
    sw.add_argument("--init-basis", default=None, metavar="file:PATH", help="use a precomputed U instead of the Cholesky-based basis")
    sw.add_argument("--out", default="-")
    _add_orth_flags(sw)

    rd = sub.add_parser("rankdef", help="the rank deficient problem [X0, 0*X0, X0]")
    rd.add_argument("--n", type=int, default=2000)
    rd.add_argument("--k0", type=int, default=10)
    rd.add_argument("--log-kappa", type=float, default=20.0)
    rd.add_argument("--seed", type=int, default=0)
    rd.add_argument("--algorithms", type=_algorithms, default=list(bench.ALGORITHMS))
    rd.add_argument("--out", default="-")
    _add_orth_flags(rd)

    fz = sub.add_parser("factorize", help="factor Matrix Market inputs and write Q, R and metrics")
    fz.add_argument("--b", required=True, help="B as a Matrix Market file")
    fz.add_argument("--x", required=True, help="X as a Matrix Market file")
    fz.add_argument("--alg", default="hh_right", choices=bench.ALGORITHMS)
    fz.add_argument("--out-prefix", required=True)
    fz.add_argument("--init-basis", default=None, metavar="file:PATH")
    _add_orth_flags(fz)
    return parser


def _init_basis_path(spec):
    if spec is None:
        return None
    return spec[len("file:") :] if spec.startswith("file:") else spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        opts = _opts(args)
        if args.command == "sweep":
            path = _init_basis_path(args.init_basis)
            records = bench.run_sweep(
                n=args.n,
                k=args.k,
                log_kappa_b=args.log_kappa_b,
                log_kappa_x=args.log_kappa_x,
                seed=args.seed,
                algorithms=args.algorithms,
                opts=opts,
                init_basis=read_matrix(path) if path else None,
            )
            bench.write_records(records, args.out, timing=args.timing)
            return 0
        if args.command == "rankdef":
            records = bench.run_rank_deficient(
                n=args.n, k0=args.k0, log_kappa=args.log_kappa, seed=args.seed, algorithms=args.algorithms, opts=opts
            )
            bench.write_records(records, args.out, timing=args.timing)
            return 0
        return bench.factorize_files(
            args.b, args.x, args.alg, args.out_prefix, opts=opts, init_basis_path=_init_basis_path(args.init_basis), timing=args.timing
        )
    except (MatrixMarketError, InitialBasisFailure, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
