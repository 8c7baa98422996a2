"""Experiment harness: condition-number sweeps, the rank-deficient problem, file factorization."""

from __future__ import annotations

import csv
import io
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Optional, Sequence


from .baseline import gram_schmidt
from .core import as_matrix
from .errors import InitialBasisFailure
from .factor import OrthOptions, QRFactorization, householder_qr_block, householder_qr_left, householder_qr_right, initial_basis
from .mmio import read_matrix, read_operator, write_matrix
from .probe import build_rank_deficient, condition_number, gen_conditioned, gen_spd, loss_of_orthogonality, relative_residual

__all__ = [
    "ALGORITHMS",
    "ExperimentRecord",
    "factorize",
    "run_sweep",
    "run_rank_deficient",
    "factorize_files",
    "write_records",
    "format_records",
]

log = logging.getLogger(__name__)

ALGORITHMS = ("cgs", "mgs", "cgs2", "mgs2", "hh_right", "hh_left", "hh_block")
HOUSEHOLDER = ("hh_right", "hh_left", "hh_block")
THREADS_ENV = "OBLIQUE_QR_THREADS"


@dataclass(frozen=True)
class ExperimentRecord:
    algorithm: str
    n: int
    k: int
    kappa_b: float
    kappa_x: float
    rank_q: int
    loss_orth: float
    rel_residual: float
    runtime_ms: float
    seed: int


CSV_HEADER = tuple(f.name for f in fields(ExperimentRecord))


def _check_algorithms(algorithms):
    algorithms = tuple(algorithms) if algorithms is not None else ALGORITHMS
    bad = [a for a in algorithms if a not in ALGORITHMS]
    if bad:
        raise ValueError(f"unknown algorithm(s) {bad}; choose from {ALGORITHMS}")
    return algorithms


def factorize(algorithm, x, b, u=None, opts: Optional[OrthOptions] = None) -> QRFactorization:
    """Dispatch one factorization by algorithm id (``u`` is used by Householder only)."""
    opts = opts or OrthOptions()
    if algorithm == "hh_right":
        return householder_qr_right(x, b, u, opts)
    if algorithm == "hh_left":
        return householder_qr_left(x, b, u, opts)
    if algorithm == "hh_block":
        return householder_qr_block(x, b, u, opts)
    if algorithm in ("cgs", "mgs", "cgs2", "mgs2"):
        return gram_schmidt(x, b, algorithm)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _measure(algorithm, x, b, u, opts, kappa_b, kappa_x, seed):
    t0 = time.perf_counter()
    f = factorize(algorithm, x, b, u, opts)
    elapsed = (time.perf_counter() - t0) * 1e3
    rec = ExperimentRecord(
        algorithm=algorithm,
        n=x.shape[0],
        k=x.shape[1],
        kappa_b=kappa_b,
        kappa_x=kappa_x,
        rank_q=f.q.shape[1],
        loss_orth=loss_of_orthogonality(f.q, b),
        rel_residual=relative_residual(x, f.q, f.r),
        runtime_ms=elapsed,
        seed=seed,
    )
    return rec, f


def _max_workers(threads):
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def _sort_key(order):
    rank = {a: i for i, a in enumerate(order)}
    return lambda item: (rank[item[0][0]], item[0][1])


def _run_points(points, threads):
    """Run ``(key, fn)`` pairs, possibly concurrently; results keep submission order."""
    workers = min(_max_workers(threads), max(len(points), 1))
    if workers == 1:
        done = [(key, fn()) for key, fn in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [(key, pool.submit(fn)) for key, fn in points]
            done = [(key, fut.result()) for key, fut in futures]
    return done


def _basis(b, k, init_basis):
    if init_basis is not None:
        u = as_matrix(init_basis, name="U")
        if u.shape != (b.dim, k):
            raise ValueError(f"initial basis must be {b.dim}x{k}, got {u.shape[0]}x{u.shape[1]}")
        return u
    try:
        return initial_basis(b, k)
    except InitialBasisFailure as exc:
        raise InitialBasisFailure(exc.pivot, f"n={b.dim}, k={k}: {exc}") from exc


def run_sweep(
    n=2000,
    k=100,
    log_kappa_b=5.0,
    log_kappa_x: Iterable[float] = range(17),
    seed=0,
    algorithms: Optional[Sequence[str]] = None,
    opts: Optional[OrthOptions] = None,
    init_basis=None,
    threads=None,
) -> list:
    """One record per (algorithm, log_kappa_x), sorted algorithm-major.

    ``B`` and the starting basis ``U`` are built once and shared by every
    point of the sweep.
    """
    algorithms = _check_algorithms(algorithms)
    opts = opts or OrthOptions()
    levels = sorted(float(v) for v in log_kappa_x)
    b = gen_spd(n, log_kappa_b, seed)
    kappa_b = condition_number(b)
    u = _basis(b, k, init_basis) if any(a in HOUSEHOLDER for a in algorithms) else None
    log.info("sweep n=%d k=%d kappa_b=%.3g levels=%s", n, k, kappa_b, levels)

    points = []
    for lk in levels:
        x = gen_conditioned(n, k, lk, seed)
        kappa_x = condition_number(x)
        for alg in algorithms:
            points.append(((alg, lk), lambda alg=alg, x=x, kx=kappa_x: _measure(alg, x, b, u, opts, kappa_b, kx, seed)[0]))
    done = _run_points(points, threads)
    done.sort(key=_sort_key(algorithms))
    return [rec for _, rec in done]


def run_rank_deficient(n=2000, k0=10, log_kappa=20.0, seed=0, algorithms=None, opts=None, threads=None) -> list:
    """Factor ``X = [X0, 0 * X0, X0]`` with ``B`` and ``X0`` both conditioned to ``10**log_kappa``."""
    algorithms = _check_algorithms(algorithms)
    opts = opts or OrthOptions()
    b = gen_spd(n, log_kappa, seed)
    x0 = gen_conditioned(n, k0, log_kappa, seed)
    x = build_rank_deficient(x0)
    kappa_b = condition_number(b)
    kappa_x = condition_number(x0)
    u = _basis(b, x.shape[1], None) if any(a in HOUSEHOLDER for a in algorithms) else None
    points = [((alg, 0.0), lambda alg=alg: _measure(alg, x, b, u, opts, kappa_b, kappa_x, seed)[0]) for alg in algorithms]
    done = _run_points(points, threads)
    done.sort(key=_sort_key(algorithms))
    return [rec for _, rec in done]


def format_records(records, timing=False) -> str:
    """CSV text (header row, LF endings). ``runtime_ms`` is left empty unless ``timing``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        row = [repr(v) if isinstance(v, float) else str(v) for v in astuple(rec)]
        if not timing:
            row[CSV_HEADER.index("runtime_ms")] = ""
        writer.writerow(row)
    return buf.getvalue()


def write_records(records, path, timing=False) -> None:
    text = format_records(records, timing)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def factorize_files(b_path, x_path, algorithm, out_prefix, opts=None, init_basis_path=None, timing=False) -> int:
    """Factor the matrices in two Matrix Market files.

    Writes ``<out_prefix>_q.mtx``, ``<out_prefix>_r.mtx`` and
    ``<out_prefix>_metrics.csv``. Returns 0 on success and 1 on error,
    after printing a diagnostic to stderr.
    """
    try:
        algorithm = _check_algorithms([algorithm])[0]
        b = read_operator(b_path)
        x = read_matrix(x_path)
        if x.shape[0] != b.dim:
            raise ValueError(f"X has {x.shape[0]} rows but B is {b.dim}x{b.dim}")
        if x.shape[1] > x.shape[0]:
            raise ValueError(f"X must be tall (n >= k), got {x.shape[0]}x{x.shape[1]}")
        u = None
        if algorithm in HOUSEHOLDER:
            u = _basis(b, x.shape[1], read_matrix(init_basis_path) if init_basis_path else None)
        rec, f = _measure(algorithm, x, b, u, opts or OrthOptions(), condition_number(b), condition_number(x), 0)
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_matrix(f"{out_prefix}_q.mtx", f.q)
    write_matrix(f"{out_prefix}_r.mtx", f.r)
    write_records([rec], f"{out_prefix}_metrics.csv", timing)
    return 0
