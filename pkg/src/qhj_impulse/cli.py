"""Command-line entry point: ``qhj-impulse {verify,trajectory,perturb,ensemble}``.

Exit codes: 0 success, 1 validation or domain error, 2 numerical error,
3 I/O error. CSV output is UTF-8 with LF line endings and a header row;
floats are written as their shortest round-trip decimal.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from typing import Iterable, Sequence

import numpy as np

from .config import RunConfig, load_config
from .ensemble import EnsembleSpec, run_ensemble
from .errors import NumericalError, ValidationError
from .kinematics import TrajectoryClock, exact_time_of_position, locate_particle, Direction
from .model import ImpulseSpec
from .perturbation import CASE_ORDER, Variant, copenhagen_e1, trajectory_e1
from . import plotting, verify

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

TRAJECTORY_COLUMNS = ("t", "x", "direction", "cycle", "sheet_epoch")
PERTURB_COLUMNS = (
    "F", "epsilon", "gamma", "T", "tau0", "case", "sheet_time", "window_lo", "window_hi",
    "e1_trajectory", "e1_copenhagen_original", "e1_copenhagen_errata",
)
ENSEMBLE_COLUMNS = (
    ("epsilon", "n", "mean_e1", "stderr_e1")
    + tuple(case.value for case in CASE_ORDER)
    + ("n_skipped", "copenhagen_e1_original", "copenhagen_e1_errata")
)
SAMPLE_COLUMNS = ("epsilon", "microstate", "tau", "e1", "case")
VERIFY_COLUMNS = ("group", "check", "status", "detail")

# CLI flag -> RunConfig field
_OVERRIDES = {
    "hbar": "hbar", "m": "m", "q": "q", "a": "a", "b": "b", "c": "c",
    "F": "F", "eps": "epsilon", "gamma": "gamma", "T": "T",
    "n": "n", "seed": "seed", "threads": "threads", "source": "source", "count": "count",
    "set_seed": "set_seed", "on_error": "on_error", "tau0": "tau0",
    "n_points": "n_points", "cycles": "n_cycles", "out": "path", "format": "format",
}


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: str | None, stdout) -> None:
    if not path:
        stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors, not numerical ones
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty sweep")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI run configuration")
    common.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")
    common.add_argument("--format", choices=["csv"], help="output format")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help="worker threads (fallback: QHJ_IMPULSE_THREADS)")
    for name in ("hbar", "m", "q", "a", "b", "c", "F"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--eps", type=float, help="band width epsilon")
    common.add_argument("--gamma", type=float, help="impulse time")
    common.add_argument("--T", type=float, help="time weight of the impulse")
    common.add_argument("--tau0", type=float, help="+x sheet epoch of the trajectory")
    common.add_argument("--no-figure", action="store_true", help="skip PNG rendering")

    parser = _Parser(prog="qhj-impulse", description="Impulse perturbation of the infinite-well ground state.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--group", action="append", choices=list(verify.GROUPS), help="run only this group (repeatable)")

    p = sub.add_parser("trajectory", parents=[common], help="sample x(t) along one trajectory")
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--cycles", type=int)

    sub.add_parser("perturb", parents=[common], help="single-event E1, trajectory and Copenhagen")

    p = sub.add_parser("ensemble", parents=[common], help="uniform-epoch ensemble average of E1")
    p.add_argument("--n", type=int, help="samples per ensemble")
    p.add_argument("--sweep", type=_float_list, metavar="EPS,EPS,...", help="one ensemble per epsilon")
    p.add_argument("--source", choices=["fixed", "random"])
    p.add_argument("--count", type=int, help="size of the random microstate set")
    p.add_argument("--set-seed", dest="set_seed", type=int, help="seed of the random microstate set")
    p.add_argument("--on-error", dest="on_error", choices=["abort", "skip"])
    p.add_argument("--samples-out", metavar="PATH", help="per-sample CSV")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    values = {field: getattr(args, flag) for flag, field in _OVERRIDES.items() if hasattr(args, flag)}
    cfg = cfg.with_overrides(**values)
    if cfg.format != "csv":
        raise ValidationError("format", f"only csv is supported, got {cfg.format!r}")
    return cfg


def _threads(cfg: RunConfig):
    return cfg.threads if cfg.threads > 0 else None


def cmd_verify(cfg: RunConfig, groups=None, stdout=sys.stdout) -> int:
    checks = verify.run_groups(cfg.well(), cfg.microstate(), cfg.impulse(), groups)
    rows = []
    for chk in checks:
        status = "SKIP" if chk.skipped else ("PASS" if chk.passed else "FAIL")
        rows.append((chk.group, chk.name, status, chk.detail))
    failed = [r for r in rows if r[2] == "FAIL"]
    if cfg.path:
        _emit(render_csv(VERIFY_COLUMNS, rows), cfg.path, stdout)
    for group, name, status, detail in rows:
        stdout.write(f"{status} {group}: {name}" + (f" ({detail})" if detail else "") + "\n")
    stdout.write(f"{len(rows) - len(failed)} of {len(rows)} checks passed\n")
    for group, name, _, detail in failed:
        stdout.write(f"failed invariant: {group}/{name}\n")
    return EXIT_OK if not failed else EXIT_NUMERICAL


def trajectory_rows(cfg: RunConfig) -> list[tuple]:
    if cfg.n_points < 0:
        raise ValidationError("n_points", f"must be >= 0, got {cfg.n_points}")
    if cfg.n_cycles < 1:
        raise ValidationError("n_cycles", f"must be >= 1, got {cfg.n_cycles}")
    clock = TrajectoryClock(cfg.microstate(), cfg.well(), cfg.tau0)
    H, T = clock.half_sheet, clock.t_period
    times = np.linspace(cfg.tau0 - H, cfg.tau0 - H + cfg.n_cycles * T, cfg.n_points)
    rows = []
    for t in times:
        snap = locate_particle(clock, float(t))
        s = t - snap.sheet_epoch if snap.direction is Direction.PLUS else snap.sheet_epoch - t
        back = exact_time_of_position(clock, snap.x, Direction.PLUS)
        if abs(back - s) > 1e-9 * T:
            raise NumericalError(f"row t = {t!r}: x = {snap.x!r} maps back to sheet time {back!r}, expected {s!r}")
        rows.append((float(t), snap.x, snap.direction.value, snap.cycle_index, snap.sheet_epoch))
    return rows


def cmd_trajectory(cfg: RunConfig, figure: bool = True, stdout=sys.stdout) -> int:
    rows = trajectory_rows(cfg)
    _emit(render_csv(TRAJECTORY_COLUMNS, rows), cfg.path, stdout)
    if cfg.path:
        plotting.write_plot_script("trajectory", cfg.path)
        if figure:
            named = [dict(zip(TRAJECTORY_COLUMNS, r)) for r in rows]
            plotting.render_trajectory(named, plotting.companion_paths(cfg.path)[1])
    return EXIT_OK


def perturb_row(cfg: RunConfig) -> tuple:
    well, ms, spec = cfg.well(), cfg.microstate(), cfg.impulse()
    traj = trajectory_e1(well, ms, spec, cfg.tau0)
    orig = copenhagen_e1(well, spec, Variant.ORIGINAL)
    errata = copenhagen_e1(well, spec, Variant.ERRATA)
    return (
        spec.F, spec.epsilon, spec.gamma, spec.T_weight, cfg.tau0, traj.case_id.value, traj.sheet_time,
        traj.window[0], traj.window[1], traj.e1, orig.e1, errata.e1,
    )


def cmd_perturb(cfg: RunConfig, stdout=sys.stdout) -> int:
    row = perturb_row(cfg)
    rec = dict(zip(PERTURB_COLUMNS, row))
    stdout.write(
        f"trajectory E1: {rec['e1_trajectory']!r} (case {rec['case']}, sheet time {rec['sheet_time']!r}, "
        f"window [{rec['window_lo']!r}, {rec['window_hi']!r}])\n"
        f"Copenhagen E1 (original): {rec['e1_copenhagen_original']!r}\n"
        f"Copenhagen E1 (errata): {rec['e1_copenhagen_errata']!r}\n"
    )
    if cfg.path:
        _emit(render_csv(PERTURB_COLUMNS, [row]), cfg.path, stdout)
    return EXIT_OK


def ensemble_rows(cfg: RunConfig, sweep=None, keep_samples: bool = False):
    well = cfg.well()
    source = cfg.microstate_source()
    summary, samples = [], []
    for eps in sweep or [cfg.epsilon]:
        impulse = ImpulseSpec(cfg.F, eps, cfg.gamma, cfg.T)
        spec = EnsembleSpec(cfg.n, impulse, source, rng_seed=cfg.seed, on_error=cfg.on_error)
        rep = run_ensemble(spec, well, threads=_threads(cfg), keep_samples=keep_samples)
        summary.append(
            (eps, rep.n, rep.mean_e1, rep.stderr_e1)
            + tuple(rep.case_histogram[case.value] for case in CASE_ORDER)
            + (rep.n_skipped, rep.copenhagen_e1_original, rep.copenhagen_e1_errata)
        )
        if keep_samples:
            s = rep.samples
            samples.extend(zip([eps] * rep.n, s["microstate"], s["tau"], s["e1"], s["case"]))
    return summary, samples


def cmd_ensemble(cfg: RunConfig, sweep=None, samples_out: str | None = None, figure: bool = True, stdout=sys.stdout) -> int:
    summary, samples = ensemble_rows(cfg, sweep, keep_samples=samples_out is not None)
    _emit(render_csv(ENSEMBLE_COLUMNS, summary), cfg.path, stdout)
    if samples_out is not None:
        _emit(render_csv(SAMPLE_COLUMNS, samples), samples_out, stdout)
    if cfg.path:
        plotting.write_plot_script("ensemble", cfg.path)
        if figure:
            named = [dict(zip(ENSEMBLE_COLUMNS, r)) for r in summary]
            plotting.render_ensemble(named, plotting.companion_paths(cfg.path)[1])
        for row in summary:
            rec = dict(zip(ENSEMBLE_COLUMNS, row))
            stdout.write(
                f"epsilon {rec['epsilon']!r}: <E1> = {rec['mean_e1']:.6g} +- {rec['stderr_e1']:.3g} "
                f"(n = {rec['n']}), Copenhagen {rec['copenhagen_e1_original']:.6g} / {rec['copenhagen_e1_errata']:.6g}\n"
            )
    return EXIT_OK


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("once")
        warnings.showwarning = _show_warning
        return _dispatch(args, stdout)


_SHOWN: set = set()


def _show_warning(message, category, filename, lineno, file=None, line=None):
    text = str(message)
    if text not in _SHOWN:
        _SHOWN.add(text)
        print(f"warning: {text}", file=sys.stderr)


def _dispatch(args: argparse.Namespace, stdout) -> int:
    try:
        cfg = resolve_config(args)
        figure = not args.no_figure
        if args.command == "verify":
            return cmd_verify(cfg, args.group, stdout)
        if args.command == "trajectory":
            return cmd_trajectory(cfg, figure, stdout)
        if args.command == "perturb":
            return cmd_perturb(cfg, stdout)
        return cmd_ensemble(cfg, args.sweep, args.samples_out, figure, stdout)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
