"""Command-line front end.

Subcommands: ``classify`` (proper/improper with witness), ``solve``
(multi-seed leakage minimization), ``sweep`` (leakage versus total
beam count, CSV), and ``group`` (antenna-transfer family of a
symmetric system).  Exit codes: 0 success/proper/converged, 1 usage or
parse/validation error, 3 improper, 4 no trial converged.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import feasibility, model, solver

__all__ = ["main", "SweepConfig", "SweepPoint", "run_sweep"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IMPROPER = 3
EXIT_NO_CONVERGENCE = 4

CSV_SWEEP_HEADER = "total_beams,proper,min_leakage,median_leakage,frac_converged"
CSV_SOLVE_HEADER = "seed,iterations,final_max_leakage,converged"

_BRUTE_FORCE_CAP = 20


class _Parser(argparse.ArgumentParser):
    # Usage errors exit with 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="iafeas",
        description="Interference alignment feasibility and leakage tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p, trials_default):
        p.add_argument("--seed", type=int, default=0, help="base seed")
        p.add_argument(
            "--trials", type=int, default=trials_default,
            help="independent seeds to run",
        )
        p.add_argument(
            "--tol", type=float, default=1e-8,
            help="stop when max leakage falls below this",
        )
        p.add_argument("--max-iters", type=int, default=5000)
        p.add_argument("--out", help="write output to this file")

    classify = sub.add_parser(
        "classify", help="decide proper/improper by equation counting"
    )
    classify.add_argument("system", help='system text, e.g. "(2x3,1)^4"')
    classify.add_argument("--json", action="store_true")
    classify.add_argument(
        "--brute-force", action="store_true",
        help="also run the exhaustive subset check and assert agreement",
    )

    solve = sub.add_parser("solve", help="run the leakage-minimization solver")
    solve.add_argument("system")
    add_solver_flags(solve, trials_default=1)
    solve.add_argument("--json", action="store_true")
    solve.add_argument("--csv", action="store_true")
    solve.add_argument(
        "--channel-seed", type=int, default=None,
        help="hold one channel realization fixed across trials",
    )

    sweep = sub.add_parser(
        "sweep", help="leakage versus total beams, emitted as CSV"
    )
    sweep.add_argument("system")
    sweep.add_argument("--max-beams", type=int, required=True)
    add_solver_flags(sweep, trials_default=3)

    group = sub.add_parser(
        "group", help="list the antenna-transfer family of a symmetric system"
    )
    group.add_argument("system")
    group.add_argument("--json", action="store_true")

    return parser


def _load_valid_spec(text: str) -> model.SystemSpec | None:
    """Parse and validate; on failure report to stderr and return None."""
    try:
        spec = model.parse_system(text)
    except model.SpecSyntaxError as err:
        print(f"iafeas: syntax error: {err}", file=sys.stderr)
        return None
    problems = model.validate(spec)
    if problems:
        for p in problems:
            print(f"iafeas: invalid system: user {p.user} {p.reason}", file=sys.stderr)
        return None
    return spec


def _write_text(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_classify(args) -> int:
    spec = _load_valid_spec(args.system)
    if spec is None:
        return EXIT_USAGE
    result = feasibility.classify_proper(spec)
    if args.brute_force:
        if result.counts.num_equations > _BRUTE_FORCE_CAP:
            print(
                f"iafeas: --brute-force refused: {result.counts.num_equations} "
                f"equations exceed the cap of {_BRUTE_FORCE_CAP}",
                file=sys.stderr,
            )
            return EXIT_USAGE
        oracle = feasibility.brute_force_proper(spec)
        if oracle.verdict != result.verdict:
            raise RuntimeError(
                "matching classifier and subset enumeration disagree on "
                f"{model.format_system(spec)}"
            )
    if args.json:
        print(json.dumps(result.to_json_dict(), indent=2))
    else:
        _print_classification(result, brute_forced=args.brute_force)
    return EXIT_OK if result.is_proper else EXIT_IMPROPER


def _print_classification(result: feasibility.Classification, brute_forced: bool) -> None:
    print(f"system:    {model.format_system(result.system)}")
    print(f"verdict:   {result.verdict.value}"
          + (" (confirmed by subset enumeration)" if brute_forced else ""))
    print(f"equations: {result.counts.num_equations}")
    print(f"variables: {result.counts.num_variables}")
    witness = result.witness
    if isinstance(witness, feasibility.ViolatingSubset):
        print(
            f"deficient subset: {len(witness.equations)} equations over "
            f"{witness.union_size} variables"
        )
        labels = [eq.label() for eq in witness.equations]
        for start in range(0, len(labels), 8):
            print("  " + " ".join(labels[start : start + 8]))
    elif isinstance(witness, feasibility.SaturatingAssignment):
        print("saturating assignment (equation -> block slot):")
        for entry in witness.entries:
            block = entry.block
            print(
                f"  {entry.equation.label()} -> {block.kind}[{block.user}]"
                f".col{block.column} slot {entry.slot}"
            )


def _solver_options(args) -> solver.SolverOptions:
    return solver.SolverOptions(
        max_iterations=args.max_iters,
        leakage_tolerance=args.tol,
        seed=args.seed,
    )


def _cmd_solve(args) -> int:
    spec = _load_valid_spec(args.system)
    if spec is None:
        return EXIT_USAGE
    try:
        opts = _solver_options(args)
    except ValueError as err:
        print(f"iafeas: {err}", file=sys.stderr)
        return EXIT_USAGE
    summary = solver.feasibility_experiment(
        spec, args.trials, opts, channel_seed=args.channel_seed
    )
    if args.json:
        payload = {
            "system": model.format_system(spec),
            "base_seed": args.seed,
            "trials": [
                {
                    "seed": t.seed,
                    "final_max_leakage": t.final_leakage,
                    "iterations": t.iterations,
                    "converged": t.converged,
                }
                for t in summary.trials
            ],
            "min_leakage": summary.min_leakage,
            "median_leakage": summary.median_leakage,
            "max_leakage": summary.max_leakage,
            "frac_converged": summary.fraction_converged,
            "converged_threshold": summary.converged_threshold,
        }
        _write_text(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.csv:
        lines = [CSV_SOLVE_HEADER]
        for t in summary.trials:
            lines.append(
                f"{t.seed},{t.iterations},{t.final_leakage:.6e},"
                f"{str(t.converged).lower()}"
            )
        _write_text("\n".join(lines) + "\n", args.out)
        print(f"base seed: {args.seed}", file=sys.stderr)
    else:
        print(f"system:    {model.format_system(spec)}")
        print(f"base seed: {args.seed}")
        for t in summary.trials:
            print(
                f"  seed {t.seed}: final max leakage {t.final_leakage:.3e} "
                f"after {t.iterations} iterations"
                + (" (converged)" if t.converged else "")
            )
        print(
            f"converged {summary.fraction_converged:.0%} of {args.trials} "
            f"trials (threshold {summary.converged_threshold:.0e})"
        )
    return EXIT_OK if summary.fraction_converged > 0 else EXIT_NO_CONVERGENCE


@dataclass(frozen=True)
class SweepConfig:
    """One beam sweep: grow the base system's total streams to the cap."""

    base_system: model.SystemSpec
    max_total_beams: int
    seeds_per_point: int
    options: solver.SolverOptions

    def __post_init__(self):
        if self.max_total_beams < self.base_system.total_dof():
            raise ValueError(
                f"max_total_beams {self.max_total_beams} is below the base "
                f"demand of {self.base_system.total_dof()}"
            )
        if self.seeds_per_point < 1:
            raise ValueError("seeds_per_point must be at least 1")


@dataclass(frozen=True)
class SweepPoint:
    total_beams: int
    saturated: bool
    proper: bool | None
    min_leakage: float | None
    median_leakage: float | None
    fraction_converged: float | None

    def csv_row(self) -> str:
        if self.saturated:
            return f"{self.total_beams},saturated,,,"
        return (
            f"{self.total_beams},{str(self.proper).lower()},"
            f"{self.min_leakage:.6e},{self.median_leakage:.6e},"
            f"{self.fraction_converged}"
        )


def _with_total_beams(spec: model.SystemSpec, total: int) -> model.SystemSpec | None:
    """Raise stream demands round-robin (user 0 first) until the total
    is reached, never past a user's antenna minimum; None if impossible."""
    dofs = [u.dof for u in spec.users]
    caps = [u.max_streams() for u in spec.users]
    extra = total - sum(dofs)
    cursor = 0
    while extra > 0:
        if all(d >= c for d, c in zip(dofs, caps)):
            return None
        if dofs[cursor] < caps[cursor]:
            dofs[cursor] += 1
            extra -= 1
        cursor = (cursor + 1) % len(dofs)
    return model.SystemSpec(
        tuple(
            model.UserConfig(u.tx_antennas, u.rx_antennas, d)
            for u, d in zip(spec.users, dofs)
        )
    )


def run_sweep(config: SweepConfig) -> list[SweepPoint]:
    """Classify and solve each beam total from the base demand up."""
    points = []
    for total in range(config.base_system.total_dof(), config.max_total_beams + 1):
        grown = _with_total_beams(config.base_system, total)
        if grown is None:
            points.append(SweepPoint(total, True, None, None, None, None))
            continue
        proper = feasibility.classify_proper(grown).is_proper
        summary = solver.feasibility_experiment(
            grown, config.seeds_per_point, config.options
        )
        points.append(
            SweepPoint(
                total,
                False,
                proper,
                summary.min_leakage,
                summary.median_leakage,
                summary.fraction_converged,
            )
        )
    return points


def _cmd_sweep(args) -> int:
    spec = _load_valid_spec(args.system)
    if spec is None:
        return EXIT_USAGE
    try:
        config = SweepConfig(spec, args.max_beams, args.trials, _solver_options(args))
    except ValueError as err:
        print(f"iafeas: {err}", file=sys.stderr)
        return EXIT_USAGE
    print(f"sweep base seed: {args.seed}", file=sys.stderr)
    points = run_sweep(config)
    lines = [CSV_SWEEP_HEADER] + [p.csv_row() for p in points]
    _write_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_group(args) -> int:
    spec = _load_valid_spec(args.system)
    if spec is None:
        return EXIT_USAGE
    sym = spec.as_symmetric()
    if sym is None:
        print("iafeas: group requires a symmetric system", file=sys.stderr)
        return EXIT_USAGE
    members = feasibility.transfer_group(sym)
    verdicts = [feasibility.symmetric_proper(m) for m in members]
    if len(set(verdicts)) != 1:
        raise RuntimeError(
            "antenna-transfer family members disagree on the verdict"
        )
    verdict = "proper" if verdicts[0] else "improper"
    if args.json:
        print(
            json.dumps(
                {
                    "system": model.format_system(spec),
                    "verdict": verdict,
                    "members": [str(m) for m in members],
                },
                indent=2,
            )
        )
    else:
        print(f"antenna-transfer family of {model.format_system(spec)} "
              f"({len(members)} members, all {verdict}):")
        for member in members:
            print(f"  {member}")
    return EXIT_OK


_COMMANDS = {
    "classify": _cmd_classify,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "group": _cmd_group,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
