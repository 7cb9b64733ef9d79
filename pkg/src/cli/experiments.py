#!/usr/bin/env python3
"""
Experiment driver for the moment measure solver

    python -m src.cli.experiments run --test 1 --n 8 --out results
    python -m src.cli.experiments sweep --test 5 --n-list 8 16 32 --threads 4
    python -m src.cli.experiments rates results/test5.txt
    python -m src.cli.experiments grid --test 5 --n 16
    python -m src.cli.experiments diagnostics --test 2 --n 8
"""
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Dict, List, Sequence, Tuple
import argparse
import logging
import sys
import time

import pandas as pd
from tqdm import tqdm

from config.settings import settings
from config.test_cases import TEST_CASES, support_size
from src.analysis.error_norms import align, error_norms
from src.analysis.rates import fit_rate
from src.cli.tables import (
    ERROR_COLUMNS,
    IterationRecord,
    RunRecord,
    error_file,
    grid_file,
    iteration_file,
    iteration_records,
    read_errors,
    write_errors,
    write_grid,
    write_iterations,
)
from src.exceptions import MomentMeasureError
from src.measure.discrete_measure import diagnostics
from src.measure.exact_solutions import exact_solution
from src.measure.test_cases import build_test_case
from src.solver.damped_newton import SolverConfig, solve

logger = logging.getLogger(__name__)


def run_case(test: int, n: int, config: SolverConfig) -> Tuple[RunRecord, List[IterationRecord]]:
    """Solve one test case and compare with its exact solution"""
    started = time.perf_counter()
    nu = build_test_case(test, n)
    potential, trace = solve(nu, config)
    exact = exact_solution(TEST_CASES[test]["exact"])
    alignment, _ = align(exact, nu, potential)
    report = error_norms(exact, nu, potential, alignment)
    record = RunRecord(
        test=test,
        n=n,
        N=nu.size,
        l_inf=report.l_inf,
        l2_nu=report.l2_nu,
        l1_nu=report.l1_nu,
        iterations=trace.iterations,
        wall_time=time.perf_counter() - started,
        damped_iterations=trace.damped_iterations,
        min_weight=nu.min_weight,
    )
    return record, iteration_records(trace)


def _config(args) -> SolverConfig:
    return SolverConfig.from_settings(tolerance=args.tol, max_newton_iterations=args.max_iter)


def _print_records(records: Sequence[RunRecord]):
    df = pd.DataFrame([record.to_dict() for record in records])
    print(df.to_string(index=False))


def slopes(table: pd.DataFrame) -> Dict[str, float]:
    """Fitted log-log slope of every error column against N"""
    return {
        column: fit_rate(zip(table["N"], table[column]))
        for column in ERROR_COLUMNS[1:]
    }


def _print_slopes(rates: Dict[str, float]):
    for column, rate in rates.items():
        print(f"{column:>7} slope {rate:+.3f}")


def cmd_run(args) -> int:
    config = _config(args)
    record, iterations = run_case(args.test, args.n, config)
    path = write_iterations(iteration_file(args.out, args.test, args.n), iterations)
    logger.info(f"Iteration history written to {path}")
    _print_records([record])
    return 0


def _solve_all(test: int, n_list: Sequence[int], config: SolverConfig, threads: int) -> List[Tuple[RunRecord, List[IterationRecord]]]:
    results = {}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = {pool.submit(run_case, test, n, config): n for n in n_list}
            try:
                for future in tqdm(as_completed(futures), total=len(futures), desc=f"test {test}"):
                    results[futures[future]] = future.result()
            except BaseException:
                for future in futures:
                    future.cancel()
                raise
    else:
        for n in tqdm(n_list, desc=f"test {test}"):
            results[n] = run_case(test, n, config)
    return [results[n] for n in n_list]


def cmd_sweep(args) -> int:
    config = _config(args)
    n_list = sorted(set(args.n_list), key=lambda n: support_size(args.test, n))
    for n in n_list:
        if n >= settings.long_running_n:
            logger.warning(f"n = {n} (N = {support_size(args.test, n)}) is a long-running instance")

    results = _solve_all(args.test, n_list, config, args.threads)
    for record, iterations in results:
        write_iterations(iteration_file(args.out, args.test, record.n), iterations)
    records = [record for record, _ in results]
    path = write_errors(error_file(args.out, args.test), records)
    logger.info(f"Error table written to {path}")

    _print_records(records)
    if len(records) >= 2:
        _print_slopes(slopes(read_errors(path)))
    else:
        logger.warning("A single run gives no convergence rate")
    return 0


def cmd_rates(args) -> int:
    _print_slopes(slopes(read_errors(args.table)))
    return 0


def cmd_grid(args) -> int:
    nu = build_test_case(args.test, args.n)
    path = write_grid(grid_file(args.out, args.test, args.n), nu)
    logger.info(f"Support of test case {args.test} (N = {nu.size}) written to {path}")
    return 0


def cmd_diagnostics(args) -> int:
    nu = build_test_case(args.test, args.n)
    report = diagnostics(nu)
    print(f"test {args.test}: {TEST_CASES[args.test]['name']}, n = {args.n}")
    print(f"  N          {nu.size}")
    print(f"  min weight {nu.min_weight:.6e}")
    print(f"  R_lower    {report.R_lower:.6e}")
    print(f"  r_upper    {report.r_upper:.6e}  (direction {report.direction[0]:+.4f}, {report.direction[1]:+.4f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Semidiscrete moment measure experiments")
    subparsers = parser.add_subparsers(dest="command", required=True)

    case = argparse.ArgumentParser(add_help=False)
    case.add_argument("--test", type=int, choices=sorted(TEST_CASES), required=True, help="Test case id")
    case.add_argument("--out", default=settings.output_dir, help=f"Output directory (default: {settings.output_dir})")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tol", type=float, default=settings.tolerance,
                        help=f"Stopping tolerance on |grad E| / |nu| (default: {settings.tolerance:g})")
    solver.add_argument("--max-iter", type=int, default=settings.max_newton_iterations,
                        help=f"Newton iteration limit (default: {settings.max_newton_iterations})")

    run = subparsers.add_parser("run", parents=[case, solver], help="Solve one test case")
    run.add_argument("--n", type=int, required=True, help="Discretization parameter (even)")
    run.set_defaults(handler=cmd_run)

    sweep = subparsers.add_parser("sweep", parents=[case, solver], help="Solve over a list of n and fit rates")
    sweep.add_argument("--n-list", type=int, nargs="+", default=list(settings.default_n_list),
                       help="Discretization parameters (default: %(default)s)")
    sweep.add_argument("--threads", type=int, default=1, help="Worker processes (default: 1)")
    sweep.set_defaults(handler=cmd_sweep)

    rates = subparsers.add_parser("rates", help="Fit convergence rates from an N Linfty L2 L1 table")
    rates.add_argument("table", help="Path to a test<id>.txt table")
    rates.set_defaults(handler=cmd_rates)

    grid = subparsers.add_parser("grid", parents=[case], help="Write the support points and masses")
    grid.add_argument("--n", type=int, required=True, help="Discretization parameter (even)")
    grid.set_defaults(handler=cmd_grid)

    diag = subparsers.add_parser("diagnostics", parents=[case], help="Print the stability constants of a measure")
    diag.add_argument("--n", type=int, required=True, help="Discretization parameter (even)")
    diag.set_defaults(handler=cmd_diagnostics)

    return parser


def main(argv: Sequence[str] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (MomentMeasureError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
