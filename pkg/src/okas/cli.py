"""Command-line entry point ``okas``."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from okas.diffuse import ScalingParams, energy_rescaled, minimize, write_trace
from okas.droplets import read_config
from okas.effective import (LONE_DROPLET_MASS, e0_2d_envelope, e0_conjectured, m_star,
                            split_threshold_2d, weights_admissible)
from okas.green import green_value, regular_part, self_constant_report
from okas.grid import TorusGrid, read_field, write_field
from okas.harness import SweepPlan, build_recovery, expansion_check, write_report
from okas.interaction import lattice_report, optimize_positions
from okas.sharp import sharp_energy_asymptotic, sharp_energy_grid
from okas.wells import SIGMA, mollify_indicator


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(" ", "").split(",") if t]


def cmd_green(args) -> None:
    if args.self_constant:
        print("cutoff,recip_cutoff,value,delta")
        for real, recip, value, delta in self_constant_report(args.dim):
            print(f"{real},{recip},{value!r},{delta!r}")
        return
    if args.at is None:
        raise SystemExit("green: give --at or --self-constant")
    x = np.array(_floats(args.at))
    if x.size != args.dim:
        raise SystemExit(f"green: --at needs {args.dim} coordinates")
    print(f"G = {float(green_value(x, args.dim))!r}")
    print(f"regular_part = {float(regular_part(x, args.dim))!r}")


def cmd_mollify(args) -> None:
    config = read_config(args.config, eta=args.eta)
    grid = TorusGrid(config.d, args.grid)
    result = mollify_indicator(config, grid, args.eps, args.alpha)
    write_field(result.field, args.out)
    print("check,value,bound,ok")
    for name, value, bound, ok in result.report_rows():
        print(f"{name},{value!r},{bound!r},{ok}")


def cmd_minimize(args) -> None:
    p = ScalingParams(args.dim, args.eta, args.eps, args.mass, sigma=args.sigma)
    grid = TorusGrid(args.dim, args.grid)
    if args.init == "const":
        v0 = grid.constant(args.mass)
    elif args.init == "droplets":
        _, v0 = build_recovery(args.mass, args.dim, args.eta, grid, args.sigma, eps=args.eps)
    else:
        v0 = read_field(args.init)
        if v0.grid != grid:
            raise SystemExit("minimize: initial field grid differs from --dim/--grid")
    v, trace = minimize(v0, p, steps=args.steps)
    write_field(v, args.out)
    trace_path = Path(args.trace) if args.trace else Path(args.out).with_name("trace.csv")
    write_trace(trace, trace_path)
    e = energy_rescaled(v, p)
    print(f"total = {e.total!r}")
    print(f"mass = {v.mean()!r}")


def cmd_sharp(args) -> None:
    config = read_config(args.config, eta=args.eta)
    p = ScalingParams(config.d, args.eta, args.eps, config.total_mass, sigma=args.sigma)
    if args.mode == "grid":
        e = sharp_energy_grid(config, TorusGrid(config.d, args.grid), p)
        print(f"interfacial = {e.interfacial!r}")
        print(f"nonlocal = {e.nonlocal_!r}")
        print(f"total = {e.total!r}")
    else:
        leading, correction = sharp_energy_asymptotic(config, p)
        print(f"leading = {leading!r}")
        print(f"correction = {correction!r}")
        print(f"total = {leading + correction!r}")


def _effective_row(d: int, m: float, sigma: float) -> tuple[float, int]:
    return e0_2d_envelope(m, sigma) if d == 2 else e0_conjectured(m, sigma)


def cmd_effective(args) -> None:
    value, n_opt = _effective_row(args.dim, args.mass, args.sigma)
    split = [args.mass / n_opt] * n_opt
    print(f"value = {value!r}")
    print(f"n_opt = {n_opt}")
    print(f"admissible = {weights_admissible(split, args.dim, args.sigma)}")
    if args.dim == 3:
        print(f"m_star = {m_star(args.sigma)!r}")
    else:
        print(f"split_threshold = {split_threshold_2d(args.sigma)!r}")
        print(f"lone_droplet_mass = {LONE_DROPLET_MASS!r}")
    if args.sweep:
        m0, m1, steps = args.sweep.split(":")
        out = sys.stdout if args.csv is None else open(args.csv, "w", newline="")
        try:
            writer = csv.writer(out)
            writer.writerow(["mass", "value", "n_opt"])
            for m in np.linspace(float(m0), float(m1), int(steps)):
                v, n = _effective_row(args.dim, float(m), args.sigma)
                writer.writerow([repr(float(m)), repr(v), n])
        finally:
            if out is not sys.stdout:
                out.close()


def cmd_place(args) -> None:
    res = optimize_positions(args.n, args.mass, args.dim, restarts=args.restarts,
                             seed=args.seed, sigma=args.sigma)
    print(f"energy = {res.energy!r}")
    if res.energy == float("inf"):
        print("note = weights inadmissible for this sigma; positions still minimize the pair sum")
    print(f"gradient_norm = {res.gradient_norm!r}")
    nn = np.full(args.n, np.nan)
    if args.n > 1:
        from okas.green import wrap

        diff = wrap(res.positions[:, None, :] - res.positions[None, :, :])
        dist = np.linalg.norm(diff, axis=-1)
        np.fill_diagonal(dist, np.inf)
        nn = dist.min(axis=1)
        print(f"nn_cv = {lattice_report(res.positions, args.dim).cv!r}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", *"xyz"[: args.dim], "nn_distance"])
            for i, (x, r) in enumerate(zip(res.positions, nn)):
                writer.writerow([i, *(repr(float(c)) for c in x), repr(float(r))])


_EXPAND_DEFAULTS = {"dim": 2, "mass": 1.0, "etas": "0.25,0.2,0.15", "zeta": 1.0,
                    "regime": "second", "grid": None, "sigma": SIGMA, "minimize": 0,
                    "restarts": 10, "seed": 0, "out": "report", "svg": True}


def read_key_values(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise SystemExit(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in text.split("=", 1))
        key = key.replace("-", "_")
        if key not in _EXPAND_DEFAULTS:
            raise SystemExit(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _expand_settings(args) -> dict:
    settings = dict(_EXPAND_DEFAULTS)
    if args.config:
        settings.update(read_key_values(args.config))
    for key in _EXPAND_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    svg = settings["svg"]
    if isinstance(svg, str):
        svg = svg.lower() in ("1", "true", "yes", "on")
    grid = settings["grid"]
    return {
        "dim": int(settings["dim"]), "mass": float(settings["mass"]),
        "etas": _floats(str(settings["etas"])), "zeta": float(settings["zeta"]),
        "regime": str(settings["regime"]), "sigma": float(settings["sigma"]),
        "grid": None if grid in (None, "") else int(grid), "minimize": int(settings["minimize"]),
        "restarts": int(settings["restarts"]), "seed": int(settings["seed"]),
        "out": str(settings["out"]), "svg": svg,
    }


def cmd_expand(args) -> None:
    s = _expand_settings(args)
    plan = SweepPlan(s["dim"], s["mass"], tuple(s["etas"]), zeta=s["zeta"], regime=s["regime"],
                     grid_sizes=s["grid"], sigma=s["sigma"], minimize_steps=s["minimize"],
                     restarts=s["restarts"], seed=s["seed"])
    report = expansion_check(plan)
    write_report(report, s["out"], svg=s["svg"])
    print((Path(s["out"]) / "fit.txt").read_text(), end="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="okas", description="Small-volume-fraction diblock "
                                     "copolymer energies on the unit torus.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("green", help="periodic Green's function and its regular part")
    g.add_argument("--dim", type=int, choices=(2, 3), required=True)
    g.add_argument("--at", help="point x,y[,z]")
    g.add_argument("--self-constant", action="store_true", help="g(0) with a cutoff report")
    g.set_defaults(func=cmd_green)

    m = sub.add_parser("mollify", help="mollify a droplet configuration")
    m.add_argument("--config", required=True)
    m.add_argument("--eps", type=float, required=True)
    m.add_argument("--alpha", type=float, required=True)
    m.add_argument("--eta", type=float, default=1.0, help="mass scale of the config (default 1)")
    m.add_argument("--grid", type=int, default=256)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mollify)

    mn = sub.add_parser("minimize", help="mass-conserving descent of the diffuse energy")
    mn.add_argument("--dim", type=int, choices=(2, 3), required=True)
    mn.add_argument("--eta", type=float, required=True)
    mn.add_argument("--eps", type=float, required=True)
    mn.add_argument("--mass", type=float, required=True)
    mn.add_argument("--grid", type=int, required=True)
    mn.add_argument("--steps", type=int, default=1000)
    mn.add_argument("--init", default="droplets", help="const, droplets or a field file")
    mn.add_argument("--sigma", type=float, default=SIGMA)
    mn.add_argument("--out", default="field.txt")
    mn.add_argument("--trace", help="trace CSV path (default: trace.csv next to --out)")
    mn.set_defaults(func=cmd_minimize)

    sh = sub.add_parser("sharp", help="sharp-interface energy of a droplet configuration")
    sh.add_argument("--config", required=True)
    sh.add_argument("--eta", type=float, required=True)
    sh.add_argument("--grid", type=int, default=256)
    sh.add_argument("--mode", choices=("grid", "asymptotic"), default="grid")
    sh.add_argument("--eps", type=float, default=1e-3,
                    help="only used to build the scaling parameters")
    sh.add_argument("--sigma", type=float, default=SIGMA)
    sh.set_defaults(func=cmd_sharp)

    ef = sub.add_parser("effective", help="first-order effective energy of a mass")
    ef.add_argument("--dim", type=int, choices=(2, 3), required=True)
    ef.add_argument("--mass", type=float, required=True)
    ef.add_argument("--sigma", type=float, default=1.0)
    ef.add_argument("--sweep", help="m0:m1:steps")
    ef.add_argument("--csv", help="write the sweep here instead of stdout")
    ef.set_defaults(func=cmd_effective)

    pl = sub.add_parser("place", help="optimal positions of equal particles")
    pl.add_argument("--dim", type=int, choices=(2, 3), required=True)
    pl.add_argument("--n", type=int, required=True)
    pl.add_argument("--mass", type=float, required=True)
    pl.add_argument("--restarts", type=int, default=10)
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--sigma", type=float, default=SIGMA)
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_place)

    ex = sub.add_parser("expand", help="eta sweep and two-term expansion fit")
    ex.add_argument("--config", help="key = value file; flags override it")
    ex.add_argument("--dim", type=int, choices=(2, 3))
    ex.add_argument("--mass", type=float)
    ex.add_argument("--etas")
    ex.add_argument("--zeta", type=float)
    ex.add_argument("--regime", choices=("first", "second"))
    ex.add_argument("--grid", type=int)
    ex.add_argument("--sigma", type=float)
    ex.add_argument("--minimize", type=int, nargs="?", const=200,
                    help="also descend from each recovery field (default 200 steps)")
    ex.add_argument("--restarts", type=int)
    ex.add_argument("--seed", type=int)
    ex.add_argument("--out")
    ex.add_argument("--no-svg", dest="svg", action="store_const", const=False)
    ex.set_defaults(func=cmd_expand)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValueError as exc:
        print(f"okas {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


__all__ = ["main", "build_parser", "read_key_values"]

if __name__ == "__main__":
    sys.exit(main())
