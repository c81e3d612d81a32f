"""Command-line interface producing figure-style data products.

Subcommands: levels | gate | sweep | scaling | trajectory | nogo. Every
output file embeds the resolved configuration (JSON comment line for CSV,
a "config" field for JSON) so a run can be reproduced byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import (
    closed_form_identity_errors,
    closed_form_rzxz_leakage,
    computational_error,
    gate_report,
    leakage_probabilities,
    process_fidelity,
    scaling_exponent_fit,
)
from .bloch import record_trajectory
from .hamiltonian import ModelParams, eigenvalue_sweep
from .optimizer import (
    CompositeRzxzTemplate,
    OptimizationProblem,
    optimize_gate,
    sweep_optimize,
)
from .propagator import DEFAULT_DT, NoiseSample, bare_ux, evolve_schedule, unitarity_defect
from .pulse import PulseSchedule, build_smooth_schedule
from .sequences import (
    GateSpec,
    RzxzSpec,
    identity_gate,
    identity_sequence,
    rzxz,
    rzxz_steps,
    rzxz_target,
    two_pulse_nogo_scan,
    x_minus_half_pi,
)


def parse_angle(text: str) -> float:
    """Angle flag: plain radians or a pi multiple like '2.5pi' or '-pi'."""
    s = text.strip().lower().replace(" ", "")
    if s.endswith("pi"):
        head = s[:-2]
        if head in ("", "+"):
            factor = 1.0
        elif head == "-":
            factor = -1.0
        else:
            factor = float(head)
        return factor * np.pi
    return float(s)


def parse_ratio(text: str) -> float:
    """Ratio flag: a float or fraction like '1/50'."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _resolve_out(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get("CQPULSE_OUTDIR", "")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write_csv(path: str | None, config: dict, header: list[str], rows) -> None:
    lines = ["# " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.14e}"


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    cfg["version"] = __version__
    return cfg


def _noise_from_args(args) -> NoiseSample:
    d = args.noise_d
    if getattr(args, "noise_ratio", None) is not None:
        d = args.noise_ratio * args.g
    return NoiseSample(d_eps_d=d, d_eps_q=args.noise_q)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_levels(args) -> int:
    fixed = ModelParams(eps_q=args.eps_q, g=args.g, xi=args.xi, zeta=args.zeta)
    table = eigenvalue_sweep(args.axis, args.lo, args.hi, args.n, fixed)
    _write_csv(
        _resolve_out(args.out), _config(args), ["param", "E1", "E2", "E3"], table
    )
    return 0


def _dump_schedule(sched: PulseSchedule, path: str, grid_step: float, config: dict):
    ts = np.arange(0.0, sched.duration + 0.5 * grid_step, grid_step)
    ts = ts[ts <= sched.duration]
    eps, gs = sched.sample(ts)
    _write_csv(path, config, ["t", "eps_q", "g"], zip(ts, eps, gs))


def cmd_gate(args) -> int:
    noise = _noise_from_args(args)
    params: dict = {
        "kind": args.kind,
        "mode": args.mode,
        "d_eps_d": noise.d_eps_d,
        "d_eps_q": noise.d_eps_q,
        "seed": args.seed,
    }

    if args.kind == "rzxz" and args.optimize:
        if args.mode != "smooth":
            print("--optimize requires --mode smooth", file=sys.stderr)
            return 2
        tpl = CompositeRzxzTemplate(
            theta=args.theta, phi=args.phi, g_peak=args.g, rise=args.rise,
            target=rzxz_target(RzxzSpec(args.theta, args.phi, args.g)),
        )
        problem = OptimizationProblem(tpl, noise, dt=args.dt)
        result = optimize_gate(problem, budget=args.budget, seed=args.seed)
        u = result.gate
        target = tpl.target
        params.update(result.params)
        params["evaluations"] = result.evaluations
        if args.dump_schedule:
            sched = build_smooth_schedule(
                tpl.build_steps(list(result.params.values())), tpl.rise
            )
            _dump_schedule(
                sched, _resolve_out(args.dump_schedule), args.grid_step, _config(args)
            )
    elif args.kind == "rzxz":
        spec = RzxzSpec(args.theta, args.phi, args.g)
        target = rzxz_target(spec)
        params.update(theta=args.theta, phi=args.phi, g=args.g, eps_q=spec.eps_q)
        u = rzxz(spec, noise, mode=args.mode, rise=args.rise, dt=args.dt)
        if args.dump_schedule and args.mode == "smooth":
            sched = build_smooth_schedule(rzxz_steps(spec), args.rise)
            _dump_schedule(
                sched, _resolve_out(args.dump_schedule), args.grid_step, _config(args)
            )
    elif args.kind == "identity":
        target = identity_gate()
        params.update(eps_q=args.eps_q, g=args.g)
        u = identity_sequence(
            args.eps_q, args.g, noise, mode=args.mode, rise=args.rise, dt=args.dt
        )
    else:
        print(f"unknown gate kind {args.kind!r}", file=sys.stderr)
        return 2

    if unitarity_defect(u) > 1e-9:
        print("invariant violation: propagator is not unitary", file=sys.stderr)
        return 1
    report = gate_report(u, target, params)
    payload = report.to_dict()
    payload["config"] = _config(args)
    if args.kind == "identity" and noise.d_eps_d:
        ratio = noise.d_eps_d / args.g
        p_ec, p_lc, p_le = closed_form_identity_errors(args.eps_q, args.g, ratio)
        payload["closed_form"] = {"p_ec": p_ec, "p_lc": p_lc, "p_le": p_le}
    _write_json(_resolve_out(args.out), payload)
    return 0


def cmd_sweep(args) -> int:
    grid = [float(x) for x in args.grid.split(",") if x]
    if not grid:
        print("empty noise grid", file=sys.stderr)
        return 2
    rows = sweep_optimize(
        grid,
        ratio_q=args.ratio_q,
        g_peak=args.g_peak,
        rise=args.rise,
        budget=args.budget,
        seed=args.seed,
        dt=args.dt,
    )
    out_rows = []
    for r in rows:
        vals = list(r.params.values())
        out_rows.append(
            (r.d_eps_d, r.d_eps_q, r.approach, r.infidelity, vals[0], vals[1], vals[2], r.evals)
        )
    _write_csv(
        _resolve_out(args.out),
        _config(args),
        ["d_eps_d", "d_eps_q", "approach", "infidelity", "t_z", "t_x", "eps_q_peak", "evals"],
        out_rows,
    )
    return 0


def _scaling_points(args):
    ratios = np.geomspace(args.ratio_lo, args.ratio_hi, args.n_ratios)
    rows = []
    if args.kind == "self-test":
        for r in ratios:
            rows.append((r, r**4, 0.0, 0.0, r**4))
        return ratios, rows
    for r in ratios:
        noise = NoiseSample(d_eps_d=r * args.g)
        if args.kind == "rzxz":
            spec = RzxzSpec(args.theta, args.phi, args.g)
            u = rzxz(spec, noise)
            target = rzxz_target(spec)
        elif args.kind == "bare":
            u = bare_ux(args.g, noise, args.theta)
            target = GateSpec("bare-x", np.array(
                [[np.cos(0.5 * args.theta), -1j * np.sin(0.5 * args.theta)],
                 [-1j * np.sin(0.5 * args.theta), np.cos(0.5 * args.theta)]]))
        else:  # identity
            u = identity_sequence(args.eps_q, args.g, noise)
            target = identity_gate()
        p_lc, p_le = leakage_probabilities(u)
        rows.append(
            (r, computational_error(u, target), p_lc, p_le, 1.0 - process_fidelity(u, target))
        )
    return ratios, rows


def cmd_scaling(args) -> int:
    ratios, rows = _scaling_points(args)
    if args.out_csv:
        _write_csv(
            _resolve_out(args.out_csv),
            _config(args),
            ["ratio", "comp_error", "p_lc", "p_le", "infidelity"],
            rows,
        )
    comp = [(r[0], r[1]) for r in rows]
    if args.kind == "bare":
        # Leakage is the dominant bare-gate error; its quadratic slope is
        # the conventional-gate baseline.
        leak = [(r[0], r[2] + r[3]) for r in rows]
        slope_comp = scaling_exponent_fit([(r[0], r[4]) for r in rows])
    else:
        leak = [(r[0], r[2] + r[3]) for r in rows]
        slope_comp = scaling_exponent_fit(comp)
    slope_leak = scaling_exponent_fit(leak)
    payload = {
        "slope_comp": slope_comp,
        "slope_leak": slope_leak,
        "config": _config(args),
    }
    _write_json(_resolve_out(args.out), payload)
    return 0


def _parse_state(text: str) -> np.ndarray:
    parts = [complex(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("--psi0 needs three comma-separated components")
    psi = np.array(parts, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("--psi0 must be non-zero")
    return psi / norm


def cmd_trajectory(args) -> int:
    noise = _noise_from_args(args)
    psi0 = _parse_state(args.psi0)
    if args.schedule_json:
        with open(args.schedule_json) as fh:
            sched = PulseSchedule.from_json(fh.read())
    else:
        if args.optimize:
            tpl = CompositeRzxzTemplate(
                theta=args.theta, phi=args.phi, g_peak=args.g, rise=args.rise,
                target=rzxz_target(RzxzSpec(args.theta, args.phi, args.g)),
            )
            result = optimize_gate(
                OptimizationProblem(tpl, noise, dt=args.dt),
                budget=args.budget,
                seed=args.seed,
            )
            sched = build_smooth_schedule(
                tpl.build_steps(list(result.params.values())), tpl.rise
            )
        else:
            spec = RzxzSpec(args.theta, args.phi, args.g)
            sched = build_smooth_schedule(rzxz_steps(spec), args.rise)

    if args.raw_amplitudes:
        _, times, states = evolve_schedule(
            sched, noise, dt=args.dt, record=True, psi0=psi0
        )
        rows = [
            (t, s[0].real, s[0].imag, s[1].real, s[1].imag, s[2].real, s[2].imag)
            for t, s in zip(times, states)
        ]
        _write_csv(
            _resolve_out(args.out),
            _config(args),
            ["t", "re_c", "im_c", "re_e", "im_e", "re_l", "im_l"],
            rows,
        )
        return 0

    samples = record_trajectory(sched, noise, psi0=psi0, dt=args.dt)
    rows = [
        (t, s.chi, s.varrho, s.vartheta, s.varsigma, p)
        for t, s, p in samples
    ]
    if args.format == "json":
        payload = {
            "config": _config(args),
            "trajectory": [
                {
                    "t": t, "chi": chi, "varrho": rho,
                    "vartheta": th, "varsigma": sig, "p_leak": p,
                }
                for t, chi, rho, th, sig, p in rows
            ],
        }
        _write_json(_resolve_out(args.out), payload)
    else:
        _write_csv(
            _resolve_out(args.out),
            _config(args),
            ["t", "chi", "varrho", "vartheta", "varsigma", "p_leak"],
            rows,
        )
    return 0


def cmd_nogo(args) -> int:
    result = two_pulse_nogo_scan(
        n_theta=args.n_theta,
        n_phi=args.n_phi,
        n_ratio=args.n_ratio,
        zero_tol=args.tol,
        refine_top=args.refine_top,
        seed=args.seed,
    )
    rows = [
        (c.theta, c.phi, c.eps_q, c.g, c.c1, c.c2, c.min_abs)
        for c in result.candidates
    ]
    cfg = _config(args)
    cfg["n_points"] = result.n_points
    cfg["verdict"] = "null-rotations-only" if result.verdict else "VIOLATION"
    _write_csv(
        _resolve_out(args.out),
        cfg,
        ["theta", "phi", "eps_q", "g", "c1", "c2", "min_abs"],
        rows,
    )
    print(
        f"scanned {result.n_points} points, {len(result.candidates)} refined "
        f"near-zeros, verdict: {cfg['verdict']}"
    )
    return 0 if result.verdict else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqpulse",
        description="Composite-pulse leakage suppression for a three-level qubit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--dt", type=float, default=DEFAULT_DT, help="integrator step (ns)")

    p = sub.add_parser("levels", help="eigenvalue sweep CSV")
    common(p)
    p.add_argument("--axis", choices=["eps_q", "g"], required=True)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("-n", type=int, default=201)
    p.add_argument("--eps-q", dest="eps_q", type=float, default=0.0)
    p.add_argument("--g", type=float, default=0.0)
    p.add_argument("--xi", type=float, default=0.3)
    p.add_argument("--zeta", type=float, default=1.0)
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("gate", help="simulate one composite gate, JSON report")
    common(p)
    p.add_argument("kind", choices=["rzxz", "identity"])
    p.add_argument("--theta", type=parse_angle, default=parse_angle("2.5pi"))
    p.add_argument("--phi", type=parse_angle, default=parse_angle("2pi"))
    p.add_argument("--g", type=float, default=3.0)
    p.add_argument("--eps-q", dest="eps_q", type=float, default=1.0)
    p.add_argument("--noise-d", dest="noise_d", type=float, default=0.0)
    p.add_argument("--noise-q", dest="noise_q", type=float, default=0.0)
    p.add_argument(
        "--noise-ratio", dest="noise_ratio", type=float, default=None,
        help="set d_eps_d = ratio * g",
    )
    p.add_argument("--mode", choices=["bang_bang", "smooth"], default="bang_bang")
    p.add_argument("--rise", type=float, default=0.05)
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--budget", type=int, default=600)
    p.add_argument("--dump-schedule", dest="dump_schedule")
    p.add_argument("--grid-step", dest="grid_step", type=float, default=1e-3)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("sweep", help="composite vs single-pulse infidelity sweep CSV")
    common(p)
    p.add_argument("--grid", required=True, help="comma-separated d_eps_d values (GHz)")
    p.add_argument("--ratio-q", dest="ratio_q", type=parse_ratio, default=0.0)
    p.add_argument("--g-peak", dest="g_peak", type=float, default=3.0)
    p.add_argument("--rise", type=float, default=0.05)
    p.add_argument("--budget", type=int, default=600)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scaling", help="log-log error scaling fit, JSON slopes")
    common(p)
    p.add_argument("--kind", choices=["rzxz", "bare", "identity", "self-test"], default="rzxz")
    p.add_argument("--theta", type=parse_angle, default=parse_angle("3pi"))
    p.add_argument("--phi", type=parse_angle, default=parse_angle("2pi"))
    p.add_argument("--g", type=float, default=3.0)
    p.add_argument("--eps-q", dest="eps_q", type=float, default=1.0)
    p.add_argument("--ratio-lo", dest="ratio_lo", type=float, default=1e-3)
    p.add_argument("--ratio-hi", dest="ratio_hi", type=float, default=1e-2)
    p.add_argument("--n-ratios", dest="n_ratios", type=int, default=9)
    p.add_argument("--out-csv", dest="out_csv")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("trajectory", help="two-sphere trajectory CSV/JSON")
    common(p)
    p.add_argument("--theta", type=parse_angle, default=parse_angle("2.5pi"))
    p.add_argument("--phi", type=parse_angle, default=parse_angle("2pi"))
    p.add_argument("--g", type=float, default=3.0)
    p.add_argument("--noise-d", dest="noise_d", type=float, default=0.3)
    p.add_argument("--noise-q", dest="noise_q", type=float, default=0.0)
    p.add_argument("--rise", type=float, default=0.05)
    p.add_argument(
        "--psi0", default=f"{np.cos(np.pi / 10)},{np.sin(np.pi / 10)},0",
        help="initial state amplitudes c,e,l (normalized automatically)",
    )
    p.add_argument("--schedule-json", dest="schedule_json")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--budget", type=int, default=600)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--raw-amplitudes", dest="raw_amplitudes", action="store_true")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("nogo", help="two-pulse leakage no-go scan CSV + verdict")
    common(p)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=64)
    p.add_argument("--n-phi", dest="n_phi", type=int, default=56)
    p.add_argument("--n-ratio", dest="n_ratio", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--refine-top", dest="refine_top", type=int, default=150)
    p.set_defaults(func=cmd_nogo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "levels":
        if args.lo is None or args.hi is None:
            lo_hi = {"eps_q": (-10.0, 10.0), "g": (0.0, 5.0)}[args.axis]
            args.lo = args.lo if args.lo is not None else lo_hi[0]
            args.hi = args.hi if args.hi is not None else lo_hi[1]
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
