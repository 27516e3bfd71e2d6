"""Command line front end: ``ballistic-bell {chsh,sweep,violation,calibrate,compile,sample}``.

Exit status is 0 on success, 1 when a command fails (I/O error, failed
feasibility verdict, rejected input) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import bell, device, sampler
from .config import ConfigError, load_device_config, parse_angle, parse_grid
from .qcore import RejectedInput
from .schemas import SWEEP_COLUMNS

SEED_ENV = "BALLISTIC_BELL_SEED"


def fmt(x: float) -> str:
    """At most 12 significant digits, no trailing zeros, no negative zero."""
    s = f"{x:.12g}"
    return "0" if s in ("-0", "0") else s


class _UsageError(Exception):
    pass


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> list[float]:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _angles4(text: str) -> bell.AngleSettings:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--angles takes four comma-separated angles a,b,a',b'")
    return bell.AngleSettings(*(_angle(p) for p in parts))


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise _UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _json(record: dict) -> str:
    return json.dumps(record, sort_keys=False) + "\n"


def _kv(pairs: Sequence[tuple[str, str]]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in pairs)


# ---------------------------------------------------------------- commands


def cmd_chsh(args: argparse.Namespace) -> int:
    if args.optimize == (args.angles is not None):
        raise _UsageError("give exactly one of --angles or --optimize")
    if args.shots is not None and args.shots < 4:
        raise _UsageError("--shots must be at least 4 (split over four settings)")
    alpha = args.alpha
    exact = bell.chsh_max(alpha) if args.optimize else bell.chsh_value(alpha, args.angles)
    record: dict = {
        "alpha": alpha,
        "mode": "exact",
        "optimized": bool(args.optimize),
        "settings": asdict(exact.settings),
        "correlations": list(exact.correlations),
        "chsh_value": exact.chsh_value,
        "stderr": None,
        "shots": 0,
        "seed": None,
        "violated": exact.violated,
    }
    if args.shots:
        seed = _seed(args)
        est = sampler.estimate_chsh(alpha, exact.settings, sampler.ShotPlan(args.shots, seed))
        record.pop("correlations")
        record.update(
            mode="sampled",
            chsh_value=est.mean,
            stderr=est.stderr,
            shots=est.shots,
            seed=seed,
            violated=abs(est.mean) > bell.CLASSICAL_BOUND,
        )

    if args.format == "json":
        _emit(_json(record), args.output)
        return 0
    pairs = [
        ("alpha", fmt(alpha)),
        ("mode", record["mode"] + (" (optimized angles)" if args.optimize else "")),
        ("angles", ",".join(fmt(t) for t in exact.settings.as_tuple())),
    ]
    if record["mode"] == "exact":
        pairs += [
            (name, fmt(c))
            for name, c in zip(("P(a,b)", "P(a',b)", "P(a',b')", "P(a,b')"), exact.correlations)
        ]
        pairs.append(("chsh_value", fmt(exact.chsh_value)))
    else:
        pairs += [
            ("chsh_value", fmt(record["chsh_value"])),
            ("stderr", fmt(record["stderr"])),
            ("shots", str(record["shots"])),
            ("seed", str(record["seed"])),
        ]
    pairs.append(("violated", "true" if record["violated"] else "false"))
    _emit(_kv(pairs), args.output)
    return 0


def sweep_csv(
    alphas: Sequence[float], thetas: Sequence[float], shots: int = 0, seed: int = 0
) -> str:
    """Rows of S(alpha, theta): five-gate network, closed form and (optionally) shots.

    Row ``i`` (alpha-major) samples from ``derive_seed(seed, i)``.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    row = 0
    for alpha in alphas:
        for theta in thetas:
            s_exact = bell.zz_expectation(bell.five_gate_network(alpha, theta))
            s_analytic = bell.correlation_analytic(alpha, theta)
            if shots > 0:
                est = sampler.estimate_correlation(
                    alpha, 0.0, theta, sampler.ShotPlan(shots, sampler.derive_seed(seed, row))
                )
                sampled, err = fmt(est.mean), fmt(est.stderr)
            else:
                sampled, err = "", ""
            writer.writerow([fmt(alpha), fmt(theta), fmt(s_exact), fmt(s_analytic), sampled, err, shots])
            row += 1
    return buf.getvalue()


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.shots < 0:
        raise _UsageError("--shots must be >= 0")
    text = sweep_csv(args.alpha_grid, args.theta_grid, args.shots, _seed(args))
    _emit(text, args.output)
    return 0


def cmd_violation(args: argparse.Namespace) -> int:
    if not 0 < args.step <= 0.01:
        raise _UsageError("--step must be in (0, 0.01]")
    interval = bell.violation_interval(args.step, tol=args.tol, workers=args.workers)
    at_pi = bell.chsh_max(math.pi).chsh_value
    record = {
        "alpha_lo": interval.alpha_lo,
        "alpha_hi": interval.alpha_hi,
        "tolerance": interval.tolerance,
        "step": args.step,
        "chsh_max_at_pi": at_pi,
    }
    if args.format == "json":
        _emit(_json(record), args.output)
    else:
        _emit(
            f"violation interval: ({fmt(interval.alpha_lo)}, {fmt(interval.alpha_hi)})"
            f" +- {fmt(interval.tolerance)}\n"
            f"chsh_max(pi) = {fmt(at_pi)}\n",
            args.output,
        )
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    if args.points < 4:
        raise _UsageError("--points must be at least 4")
    if args.shots < 0:
        raise _UsageError("--shots must be >= 0")
    thetas = [2 * math.pi * k / args.points for k in range(args.points)]
    seed = None
    if args.shots == 0:
        data = [(t, bell.correlation_simulated(args.alpha_true, 0.0, t), None) for t in thetas]
    else:
        seed = _seed(args)
        data = sampler.calibration_dataset(args.alpha_true, thetas, sampler.ShotPlan(args.shots, seed))
    fit = bell.calibrate_alpha(data)
    record = {
        "alpha_true": args.alpha_true,
        "alpha_hat": fit.alpha_hat,
        "abs_error": bell.angular_distance(fit.alpha_hat, args.alpha_true),
        "residual_rms": fit.residual_rms,
        "num_points": fit.num_points,
        "shots": args.shots,
        "seed": seed,
        "low_identifiability": fit.low_identifiability,
    }
    if args.format == "json":
        _emit(_json(record), args.output)
    else:
        _emit(
            _kv(
                [
                    ("alpha_hat", fmt(fit.alpha_hat)),
                    ("residual_rms", fmt(fit.residual_rms)),
                    ("abs_error", fmt(record["abs_error"])),
                    ("num_points", str(fit.num_points)),
                    ("low_identifiability", "true" if fit.low_identifiability else "false"),
                ]
            ),
            args.output,
        )
    return 0


def _element_record(e: device.PhysicalElement) -> dict:
    return {
        "index": e.index,
        "name": e.name,
        "element": e.element,
        "logical": e.logical,
        "qubits": list(e.qubits),
        "geometry": dict(e.geometry),
        "verdicts": dict(e.verdicts),
        "ok": e.ok,
    }


def _element_table(elements: Sequence[device.PhysicalElement]) -> str:
    lines = ["index,name,element,logical,qubits,geometry,verdicts"]
    for e in elements:
        geom = " ".join(f"{k}={fmt(v)}" for k, v in e.geometry.items())
        verdicts = " ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in e.verdicts.items())
        qubits = "+".join(str(q) for q in e.qubits)
        lines.append(f"{e.index},{e.name},{e.element},{e.logical},{qubits},{geom},{verdicts or '-'}")
    return "\n".join(lines) + "\n"


def cmd_compile(args: argparse.Namespace) -> int:
    try:
        params, gates = load_device_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 1
    error = None
    try:
        elements = device.compile_network(gates, params)
    except device.CompilationError as exc:
        elements, error = exc.elements, str(exc)
    if args.format == "json":
        record = {"ok": error is None, "error": error, "elements": [_element_record(e) for e in elements]}
        _emit(_json(record), args.output)
    else:
        _emit(_element_table(elements), args.output)
    if error is not None:
        print(f"error: compilation failed: {error}", file=sys.stderr)
        return 1
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    if args.shots < 1:
        raise _UsageError("--shots must be >= 1")
    seed = _seed(args)
    est = sampler.estimate_correlation(
        args.alpha, args.theta1, args.theta2, sampler.ShotPlan(args.shots, seed, args.antithetic)
    )
    record = {
        "alpha": args.alpha,
        "theta1": args.theta1,
        "theta2": args.theta2,
        "mean": est.mean,
        "stderr": est.stderr,
        "shots": est.shots,
        "seed": seed,
        "exact": bell.correlation_simulated(args.alpha, args.theta1, args.theta2),
    }
    if args.format == "json":
        _emit(_json(record), args.output)
    else:
        _emit(_kv([(k, fmt(v) if isinstance(v, float) else str(v)) for k, v in record.items()]), args.output)
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ballistic-bell",
        description="Dual-rail ballistic-electron Bell test: exact and shot-sampled CHSH experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seed: bool = True) -> None:
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, help=f"root RNG seed (default: ${SEED_ENV} or 0)")

    p = sub.add_parser("chsh", help="CHSH value at fixed or optimized analyzer angles")
    p.add_argument("--alpha", type=_angle, required=True, help="coupler phase, e.g. pi or 2pi/3")
    p.add_argument("--angles", type=_angles4, help="a,b,a',b' analyzer angles in the Oyz plane")
    p.add_argument("--optimize", action="store_true", help="maximize |S| over the four angles")
    p.add_argument("--shots", type=int, help="total shots; estimate S by sampling")
    common(p)
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("sweep", help="CSV of S(alpha, theta) over grids")
    p.add_argument("--alpha-grid", type=_grid, required=True, help="start:stop:step or a,b,c")
    p.add_argument("--theta-grid", type=_grid, required=True, help="start:stop:step or a,b,c")
    p.add_argument("--shots", type=int, default=0, help="shots per row (0: exact only)")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("violation", help="coupler phases that violate the CHSH bound")
    p.add_argument("--step", type=float, default=0.01, help="alpha scan step, at most 0.01 rad")
    p.add_argument("--tol", type=float, default=1e-4, help="bisection tolerance on the edges")
    p.add_argument("--workers", type=int, default=None, help="processes for the alpha scan")
    common(p, seed=False)
    p.set_defaults(func=cmd_violation)

    p = sub.add_parser("calibrate", help="recover the coupler phase from synthetic S(theta) data")
    p.add_argument("--alpha-true", type=_angle, required=True)
    p.add_argument("--points", type=int, default=16, help="number of evenly spaced theta values")
    p.add_argument("--shots", type=int, default=10_000, help="shots per point (0: exact data)")
    common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("compile", help="compile a device config into physical elements")
    p.add_argument("--config", required=True, help="device config file")
    common(p, seed=False)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("sample", help="shot estimate of one correlation")
    p.add_argument("--alpha", type=_angle, required=True)
    p.add_argument("--theta1", type=_angle, default=0.0)
    p.add_argument("--theta2", type=_angle, required=True)
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--antithetic", action="store_true")
    common(p)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except (RejectedInput, bell.OptimizerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
