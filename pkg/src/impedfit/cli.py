"""Command-line front end.

Subcommands: estimate, evaluate, tune, synth, report.  Any flag can
also come from a JSON config file (--config); explicit flags win.
Exit codes: 0 success, 1 error, 2 result produced but not converged
or with constraint violations.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from impedfit import estimator, presets, reporting, svg, tuning
from impedfit.gait_data import (
    GaitDataError,
    SyntheticSpec,
    load_gait_csv,
    synthesize,
)
from impedfit.impedance import (
    equilibrium_curve,
    joint_power,
    load_params,
    profile_curve,
    save_params,
    torque_trajectory,
)
from impedfit.qp import QPError

__all__ = ["main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2


class CliError(Exception):
    pass


def _parse_boundaries(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError(f"bad boundary list {text!r}; expected comma-separated numbers")
    return values


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise CliError(f"bad fit window {text!r}; expected a:b")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise CliError(f"bad fit window {text!r}; expected numbers a:b")


def _parse_angles(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError(f"bad angle list {text!r}; expected comma-separated numbers")


def _parse_columns(text: str) -> dict:
    schema = {}
    for item in text.split(","):
        if "=" not in item:
            raise CliError(f"bad column mapping {item!r}; expected name=header")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in ("phase", "angle", "velocity", "torque"):
            raise CliError(f"unknown channel {key!r} in column mapping")
        schema[key] = value.strip()
    return schema


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the JSON config file; flags override."""
    if not getattr(args, "config", None):
        return args
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise CliError(f"config {args.config} must hold a JSON object")
    for key, value in config.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise CliError(f"config key {key!r} is not a known option")
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    return args


def _resolve_schedule_spec(args) -> tuple[list[float], str | None]:
    if getattr(args, "boundaries", None):
        bounds = args.boundaries
        if isinstance(bounds, str):
            bounds = _parse_boundaries(bounds)
        return [float(b) for b in bounds], getattr(args, "set", None)
    label = getattr(args, "set", None)
    if label:
        return list(presets.reference_boundaries(label)), label.upper()
    raise CliError("need --set or --boundaries to define equilibrium sections")


def _load_input(args) -> "GaitCycleData":
    if not getattr(args, "input", None):
        raise CliError("--input CSV is required")
    schema = args.columns
    if isinstance(schema, str):
        schema = _parse_columns(schema)
    return load_gait_csv(
        args.input,
        schema=schema,
        joint_label=args.joint or "other",
        phase_format=args.phase_format or "auto",
        cycle_duration=args.cycle_duration if args.cycle_duration is not None else 1.0,
    )


def _resolve_params(args):
    if getattr(args, "params", None):
        return load_params(args.params)
    label = getattr(args, "set", None)
    if label:
        return presets.reference_parameters(label, tuned=bool(getattr(args, "tuned", False)))
    raise CliError("need --params JSON or --set to select parameters")


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_common_io(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file supplying any option; flags override")
    p.add_argument("--out", help="output directory (default: current)")


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="gait cycle CSV")
    p.add_argument("--columns",
                   help="channel=header mapping, e.g. phase=pct,angle=ang,torque=trq")
    p.add_argument("--joint", choices=("ankle", "knee", "other"),
                   help="joint label carried on the data")
    p.add_argument("--phase-format", choices=("auto", "fraction", "percent", "index"),
                   help="how the phase column is scaled (default auto)")
    p.add_argument("--cycle-duration", type=float,
                   help="cycle duration in seconds for derived velocity (default 1.0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impedfit",
        description="Estimate, tune, and evaluate gait-cycle impedance controllers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="fit impedance parameters to torque data")
    _add_data_flags(p)
    p.add_argument("--set", choices=("A", "B", "C", "D"),
                   help="equilibrium sectioning preset")
    p.add_argument("--boundaries", help="custom section boundaries, e.g. 0,0.4,0.63,1")
    p.add_argument("--order-k", type=int, help="stiffness polynomial order (default 4)")
    p.add_argument("--order-d", type=int, help="damping polynomial order (default 4)")
    p.add_argument("--stance-end", type=float, help="stance/swing boundary (default 0.63)")
    p.add_argument("--lipschitz", type=float,
                   help="torque rate bound c (default: 2 * steepest data rate)")
    p.add_argument("--angle-bound", type=float,
                   help="symmetric equilibrium bound in rad (default 0.5)")
    p.add_argument("--starts", type=int, help="number of seeded starts (default 8)")
    p.add_argument("--seed", type=int, help="base random seed (default 0)")
    p.add_argument("--fit-window", help="phase interval a:b for the cost (default 0:1)")
    p.add_argument("--grid-n", type=int,
                   help="constraint grid resolution (default 1001)")
    _add_common_io(p)

    p = sub.add_parser("evaluate", help="play parameters over a gait cycle")
    _add_data_flags(p)
    p.add_argument("--params", help="impedance parameters JSON")
    p.add_argument("--set", choices=("A", "B", "C", "D"),
                   help="use a bundled reference set instead of --params")
    p.add_argument("--tuned", action=argparse.BooleanOptionalAction,
                   help="with --set, use the hand-tuned equilibria")
    p.add_argument("--svg", action=argparse.BooleanOptionalAction,
                   help="also write stiffness/damping/torque SVG charts")
    _add_common_io(p)

    p = sub.add_parser("tune", help="scale and shift parameters for deployment")
    p.add_argument("--params", help="impedance parameters JSON")
    p.add_argument("--set", choices=("A", "B", "C", "D"),
                   help="use a bundled reference set instead of --params")
    p.add_argument("--alpha", type=float, help="stiffness scale (default 1)")
    p.add_argument("--beta", type=float, help="damping scale (default 1)")
    p.add_argument("--gamma", type=float, help="stiffness offset (default 0)")
    p.add_argument("--angles", help="replacement equilibria, comma-separated rad")
    _add_common_io(p)

    p = sub.add_parser("synth", help="generate torque data from known parameters")
    _add_data_flags(p)
    p.add_argument("--params", help="ground-truth parameters JSON")
    p.add_argument("--set", choices=("A", "B", "C", "D"),
                   help="use a bundled reference set instead of --params")
    p.add_argument("--tuned", action=argparse.BooleanOptionalAction,
                   help="with --set, use the hand-tuned equilibria")
    p.add_argument("--noise-std", type=float, help="torque noise sigma (default 0)")
    p.add_argument("--seed", type=int, help="noise seed (default 0)")
    _add_common_io(p)

    p = sub.add_parser("report", help="comparison table over estimation results")
    p.add_argument("--results", nargs="+", help="result JSON files from estimate")
    _add_common_io(p)

    return parser


def cmd_estimate(args) -> int:
    data = _load_input(args)
    boundaries, label = _resolve_schedule_spec(args)
    window = _parse_window(args.fit_window) if args.fit_window else (0.0, 1.0)
    angle_bounds = None
    if args.angle_bound is not None:
        angle_bounds = (-abs(args.angle_bound), abs(args.angle_bound))
    prob = estimator.build_problem(
        data, boundaries, label=label,
        stiffness_order=args.order_k, damping_order=args.order_d,
        stance_end=args.stance_end if args.stance_end is not None else 0.63,
        lipschitz_c=args.lipschitz,
        angle_bounds=angle_bounds,
        fit_window=window,
        constraint_grid_n=args.grid_n if args.grid_n is not None else 1001,
    )
    n_starts = args.starts if args.starts is not None else 8
    seed = args.seed if args.seed is not None else 0
    result = estimator.multi_start(prob, n_starts=n_starts, seed=seed)

    out = _out_dir(args)
    save_params(result.params, out / "params.json")
    estimator.save_trace_csv(result, out / "trace.csv")
    estimator.save_result_json(result, out / "result.json")
    trend = reporting.trend_report(result.params, grid_n=prob.constraint_grid_n)
    fit = reporting.metrics(result.params, data)
    with open(out / "report.txt", "w", encoding="utf-8") as fh:
        fh.write(_estimate_report_text(prob, result, trend, fit))

    ok = result.converged and result.feasible
    status = "converged, constraints satisfied" if ok else (
        "converged with constraint violations" if result.converged
        else "did not converge")
    print(f"estimate [{label or 'custom'}]: cost {result.cost:.6g} "
          f"in {result.iterations} iterations; {status}; wrote {out}/params.json")
    return EXIT_OK if ok else EXIT_VIOLATIONS


def _estimate_report_text(prob, result, trend, fit) -> str:
    lines = [
        "impedance estimation report",
        "===========================",
        f"sections        : {prob.n_sections} "
        f"({', '.join(f'{b:g}' for b in prob.boundaries)})",
        f"orders (K, D)   : {prob.stiffness_order}, {prob.damping_order}",
        f"stance end      : {prob.stance_end:g}",
        f"lipschitz bound : {prob.lipschitz_c:.6g}",
        f"fit window      : {prob.fit_window[0]:g}:{prob.fit_window[1]:g}",
        "",
        f"cost (L2)       : {result.cost:.9g}",
        f"rmse            : {fit.rmse:.9g}",
        f"iterations      : {result.iterations}",
        f"converged       : {result.converged}",
        "",
        "constraints:",
    ]
    for check in result.constraint_report.checks:
        where = f" at t={check.worst_phase:.3f}" if check.worst_phase is not None else ""
        lines.append(f"  {check.name:28s} {'ok' if check.satisfied else 'VIOLATED'} "
                     f"(worst {check.worst_violation:.3e}{where})")
    lines += [
        "",
        "equilibria (rad):",
    ]
    bnd = prob.boundaries
    for i, angle in enumerate(result.params.schedule.angles):
        lines.append(f"  [{bnd[i]:.2f}, {bnd[i + 1]:.2f}) : {angle:+.4f}")
    lines += [
        "",
        "trends:",
        f"  stiffness peak {trend.stiffness_peak_value:.4g} at t={trend.stiffness_peak_phase:.3f} "
        f"(in stance: {trend.stiffness_peak_in_stance}, "
        f"exceeds K(0)={trend.stiffness_start_value:.4g}: {trend.stiffness_peak_exceeds_start})",
        f"  damping early max {trend.damping_early_max:.4g} at t={trend.damping_early_phase:.3f}; "
        f"late min {trend.damping_late_min:.4g} at t={trend.damping_late_phase:.3f} "
        f"(drops late: {trend.damping_drops_late})",
        f"  peak torque {fit.peak_torque:.4g} at t={fit.peak_torque_phase:.3f}; "
        f"peak power {fit.peak_power:.4g} at t={fit.peak_power_phase:.3f}; "
        f"push-off at t={fit.pushoff_phase:.3f}",
        "",
    ]
    return "\n".join(lines)


def cmd_evaluate(args) -> int:
    data = _load_input(args)
    params = _resolve_params(args)
    out = _out_dir(args)

    t = data.phase
    K = profile_curve(params.stiffness, t)
    D = profile_curve(params.damping, t)
    eq = equilibrium_curve(params.schedule, t)
    tau = torque_trajectory(params, data)
    power = joint_power(tau, data.velocity)

    with open(out / "curves.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase", "K", "D", "theta_eq", "tau_model",
                         "tau_data", "power"])
        for row in zip(t, K, D, eq, tau, data.torque, power):
            writer.writerow([repr(float(v)) for v in row])

    fit = reporting.metrics(params, data)
    with open(out / "metrics.json", "w", encoding="utf-8") as fh:
        json.dump(fit.to_dict(), fh, indent=2)
        fh.write("\n")

    if args.svg:
        svg.save_chart(out / "stiffness.svg", [("K", t, K)],
                       title="Stiffness profile", x_label="gait phase",
                       y_label="K")
        svg.save_chart(out / "damping.svg", [("D", t, D)],
                       title="Damping profile", x_label="gait phase",
                       y_label="D")
        svg.save_chart(out / "torque.svg",
                       [("model", t, tau), ("data", t, data.torque)],
                       title="Torque playback", x_label="gait phase",
                       y_label="torque")

    print(f"evaluate: rmse {fit.rmse:.6g}; wrote {out}/curves.csv")
    return EXIT_OK


def cmd_tune(args) -> int:
    params = _resolve_params(args)
    angles = None
    if args.angles:
        angles = args.angles if not isinstance(args.angles, str) \
            else _parse_angles(args.angles)
    spec = tuning.TuningSpec(
        alpha=args.alpha if args.alpha is not None else 1.0,
        beta=args.beta if args.beta is not None else 1.0,
        gamma=args.gamma if args.gamma is not None else 0.0,
        tuned_angles=tuple(angles) if angles is not None else None,
    )
    tuned = tuning.tune(params, spec)
    out = _out_dir(args)
    save_params(tuned, out / "params.json")
    print(f"tune: alpha={spec.alpha:g} beta={spec.beta:g} gamma={spec.gamma:g}; "
          f"wrote {out}/params.json")
    return EXIT_OK


def cmd_synth(args) -> int:
    kinematics = _load_input(args)
    params = _resolve_params(args)
    spec = SyntheticSpec(
        ground_truth=params,
        kinematics=kinematics,
        noise_std=args.noise_std if args.noise_std is not None else 0.0,
        seed=args.seed if args.seed is not None else 0,
    )
    data = synthesize(spec)
    out = _out_dir(args)
    path = out / "synthetic.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase", "angle", "velocity", "torque"])
        for row in zip(data.phase, data.angle, data.velocity, data.torque):
            writer.writerow([repr(float(v)) for v in row])
    print(f"synth: {data.n_samples} samples; wrote {path}")
    return EXIT_OK


def cmd_report(args) -> int:
    if not args.results:
        raise CliError("--results needs at least one result JSON file")
    results = [estimator.load_result_json(p) for p in args.results]
    rows = reporting.compare_sets(results)
    out = _out_dir(args)
    text = reporting.comparison_text(rows)
    with open(out / "comparison.txt", "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(out / "comparison.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(reporting.comparison_csv(rows))
    with open(out / "comparison.json", "w", encoding="utf-8") as fh:
        fh.write(reporting.comparison_json(rows))
    print(text, end="")
    return EXIT_OK


COMMANDS = {
    "estimate": cmd_estimate,
    "evaluate": cmd_evaluate,
    "tune": cmd_tune,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return COMMANDS[args.command](args)
    except (CliError, GaitDataError, QPError, estimator.EstimationError,
            FileNotFoundError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"impedfit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
