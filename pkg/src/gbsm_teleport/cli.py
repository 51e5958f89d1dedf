"""Command-line entry point: sweeps, verification, simulation, security demo.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Optional

import numpy as np

from . import engine, formulas, maf, verify
from .engine import AttemptPlan, Strategy
from .errors import GbsmError
from .formulas import Variant
from .states import InfoState

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Locale-independent 12-significant-digit rendering."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".12g")


def parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"--grid expects start:stop:count, got {spec!r}") from None
    if count < 2:
        raise UsageError("--grid count must be >= 2")
    return np.linspace(start, stop, count)


def _grid_points(args) -> list[tuple[float, float]]:
    """``(concurrence, chi)`` per grid point."""
    pts = []
    for x in parse_grid(args.grid):
        x = float(x)
        if args.axis == "chi":
            if not (0.0 < x <= math.pi / 4 + 1e-15):
                raise UsageError(f"chi grid point {x} outside (0, pi/4]")
            pts.append((formulas.concurrence(min(x, math.pi / 4)), min(x, math.pi / 4)))
        else:
            if not (0.0 < x <= 1.0):
                raise UsageError(f"concurrence grid point {x} outside (0, 1]")
            pts.append((x, formulas.chi_from_concurrence(x)))
    return pts


def _info(args) -> InfoState:
    if args.theta is not None or args.phi is not None:
        if args.a is not None or args.b is not None:
            raise UsageError("give either --a/--b or --theta/--phi, not both")
        return InfoState.from_bloch(args.theta or 0.0, args.phi or 0.0)
    if args.a is None and args.b is None:
        return InfoState.from_bloch(math.pi / 2, 0.0)
    try:
        a = complex((args.a or "0").replace(" ", ""))
        b = complex((args.b or "0").replace(" ", ""))
    except ValueError:
        raise UsageError("--a/--b must be complex literals such as 0.6 or 0.5+0.1j") from None
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if abs(norm - 1) > 1e-12:
        if not args.renormalize:
            raise UsageError(f"info state not normalized (|a|^2+|b|^2 = {norm ** 2:.12g}); pass --renormalize")
        a, b = a / norm, b / norm
    return InfoState(a, b)


def _chi(args) -> float:
    if args.chi is not None:
        return args.chi
    if args.concurrence is not None:
        return formulas.chi_from_concurrence(args.concurrence)
    raise UsageError("one of --chi or --concurrence is required")


def _write_csv(path: Optional[str], header, rows) -> None:
    if path is None or path == "-":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows([[fmt(x) for x in r] for r in rows])
        return
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([[fmt(x) for x in r] for r in rows])


def cmd_sweep_success(args) -> int:
    m = args.m
    if m > 3 and args.analytic:
        raise UsageError("--analytic closed forms exist only for m <= 3")
    info = _info(args)
    variant = Variant(args.variant)
    header = ["concurrence", "chi"] + [f"p_attempt{k}" for k in range(m + 1)]
    if args.analytic:
        header += [f"analytic_attempt{k}" for k in range(m + 1)] + ["max_abs_diff"]
    rows = []
    for C, chi in _grid_points(args):
        tree = engine.enumerate_tree(chi, info, AttemptPlan(m, Strategy(args.strategy)))
        row = [C, chi] + list(tree.cumulative_success)
        if args.analytic:
            an = [formulas.closed_form_success(k, C, variant) for k in range(m + 1)]
            row += an + [max(abs(x - y) for x, y in zip(tree.cumulative_success, an))]
        rows.append(row)
    _write_csv(args.out, header, rows)
    return EXIT_OK


def _m_list(spec: str) -> list[int]:
    try:
        ms = [int(x) for x in str(spec).split(",")]
    except ValueError:
        raise UsageError(f"--m expects an integer or comma list, got {spec!r}") from None
    return ms


def cmd_sweep_maf(args) -> int:
    strategies = list(Strategy) if args.strategy == "both" else [Strategy(args.strategy)]
    plans = [AttemptPlan(m, s) for m in _m_list(args.m) for s in strategies]
    grid = [C for C, _ in _grid_points(args)]
    rows = maf.maf_sweep(grid, plans, order=args.order)
    _write_csv(
        args.out,
        ["concurrence", "m", "strategy", "maf"],
        [[r.concurrence, r.m, r.strategy.value, r.maf] for r in rows],
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_all()
    for r in results:
        print(r.line())
    failed = [r for r in results if r.status == verify.FAIL]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed or expected; {len(failed)} failed")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    chi = _chi(args)
    info = _info(args)
    plan = AttemptPlan(args.m, Strategy(args.strategy))
    tree = engine.enumerate_tree(chi, info, plan)
    est = engine.monte_carlo(chi, info, plan, args.trials, args.seed, workers=args.workers)
    exact_inc = np.diff(np.concatenate([[0.0], tree.cumulative_success]))
    print(f"chi={chi:.12g} C={math.sin(2 * chi):.12g} a={info.a:.6g} b={info.b:.6g} m={plan.max_attempts} "
          f"strategy={plan.strategy.value} trials={args.trials} seed={args.seed}")
    print("attempt  empirical      exact")
    for k in range(plan.max_attempts + 1):
        print(f"{k:7d}  {est.per_attempt[k] / est.trials:.8f}  {exact_inc[k]:.8f}")
    exact = float(tree.cumulative_success[-1])
    z = (est.success_rate - exact) / est.standard_error if est.standard_error > 0 else float("nan")
    print(f"total    {est.success_rate:.8f}  {exact:.8f}  (SE {est.standard_error:.2e}, z={z:+.2f})")
    rng = np.random.default_rng(args.seed)
    shown = []
    for _ in range(args.examples):
        run = engine.sample_run(chi, info, plan, rng)
        leaf = tree.record(run.history)
        shown.append([run.label, int(run.success), run.attempts_used, str(run.classification),
                      leaf.fidelity_after_correction])
        print(f"  {run.label:<8} {str(run.classification):<16} attempts={run.attempts_used} "
              f"fidelity={leaf.fidelity_after_correction:.12g}")
    if args.out:
        _write_csv(args.out, ["history", "success", "attempts", "classification", "fidelity"], shown)
    return EXIT_OK


def cmd_security_demo(args) -> int:
    rng = np.random.default_rng(args.seed)
    samples = [InfoState(1, 0), InfoState(1 / math.sqrt(2), 1 / math.sqrt(2)), InfoState.random(rng)]
    for info in samples:
        rho = maf.bob_pauli_mixture(info)
        print(f"a={info.a:.6f} b={info.b:.6f}")
        print(f"  rho_Bob = [[{rho[0, 0].real:.6f}, {rho[0, 1]:.6f}], [{rho[1, 0]:.6f}, {rho[1, 1].real:.6f}]]")
        print(f"  Tr[rho_Bob rho_I] = {maf.eavesdropper_overlap(info):.6f}")
    est = maf.random_state_overlap(samples[-1], args.samples, args.seed)
    print(f"random-state overlap mean = {est.mean:.6f} +- {est.standard_error:.6f} ({est.samples} samples)")
    return EXIT_OK


def _add_grid(p, default="0.05:1.0:20"):
    p.add_argument("--grid", default=default, help="start:stop:count")
    p.add_argument("--axis", choices=("concurrence", "chi"), default="concurrence",
                   help="grid variable (default concurrence)")
    p.add_argument("--out", help="output CSV path (default stdout)")


def _add_info(p):
    p.add_argument("--a", help="complex amplitude of |0>")
    p.add_argument("--b", help="complex amplitude of |1>")
    p.add_argument("--theta", type=float, help="Bloch polar angle")
    p.add_argument("--phi", type=float, help="Bloch azimuth")
    p.add_argument("--renormalize", action="store_true", help="normalize --a/--b instead of rejecting")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gbsm-teleport", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    strategies = [s.value for s in Strategy]

    p = sub.add_parser("sweep-success", help="cumulative success probability per attempt vs concurrence")
    _add_grid(p)
    _add_info(p)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--strategy", choices=strategies, default="continue")
    p.add_argument("--analytic", action="store_true", help="add closed-form columns and max_abs_diff")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="corrected")
    p.set_defaults(func=cmd_sweep_success)

    p = sub.add_parser("sweep-maf", help="maximal average fidelity vs concurrence")
    _add_grid(p)
    p.add_argument("--m", default="0,1,2", help="attempt budget or comma list")
    p.add_argument("--strategy", choices=strategies + ["both"], default="both")
    p.add_argument("--order", type=int, default=maf.DEFAULT_ORDER, help="Gauss-Legendre order")
    p.set_defaults(func=cmd_sweep_maf)

    p = sub.add_parser("verify", help="run all cross-checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte-Carlo trajectories vs exact enumeration")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--chi", type=float)
    g.add_argument("--concurrence", type=float)
    _add_info(p)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--strategy", choices=strategies, default="continue")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--examples", type=int, default=5, help="example trajectories to print")
    p.add_argument("--out", help="CSV of the example trajectories")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("security-demo", help="Pauli-mixture overlap identity")
    p.add_argument("--seed", type=int, default=2018)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_security_demo)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except (GbsmError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
