"""Command-line interface: tau0, profile, ja-probe, simulate, sweep, oracle,
selftest, dump-config.

Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 selftest
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from types import SimpleNamespace

import numpy as np

from .approx import ApproxSolution, ja_scaling_probe
from .characteristics import characteristic_fan
from .config import DEFAULTS, dump_config, parse_config
from .errors import InputError, RunFailure
from .lifespan import tau0 as tau0_estimate
from .radiation import radiation_field
from .riccati import certify_from_run
from .selftest import run_selftest
from .sweep import render_sweep_csv, sweep
from .wave import run_to_blowup, track_characteristic

__all__ = ["main"]


def _fmt(x) -> str:
    return repr(float(x))


def _defaults_epilog() -> str:
    lines = ["config defaults (INI sections; every key may be omitted):"]
    for section, keys in DEFAULTS.items():
        for key, (default, help_text) in keys.items():
            lines.append(f"  {section}.{key} = {default!r}  # {help_text}")
    return "\n".join(lines)


def _add_config_arg(p):
    p.add_argument("--config", required=True, help="path to the INI run configuration")


def _load(args):
    cfg = parse_config(args.config)
    u0, u1 = cfg.profiles()
    return cfg, u0, u1, radiation_field(u0, u1)


def _cmd_tau0(args) -> int:
    cfg, _, _, field = _load(args)
    est = tau0_estimate(field, grid_n=args.grid_n)
    if args.json:
        print(json.dumps({"tau0": est.tau0, "s_star": est.s_star, "branch": est.branch}))
    else:
        print(f"tau0   = {_fmt(est.tau0)}")
        print(f"s_star = {_fmt(est.s_star)}")
        print(f"branch = {est.branch}")
    return 0


def _cmd_profile(args) -> int:
    cfg, _, _, field = _load(args)
    fan = characteristic_fan(field, args.tau, n=args.n)
    with open(args.out, "w", newline="") as fh:
        fh.write("s,q,V,dqV,d2qV,dsq\n")
        for i in range(fan.s.size):
            fh.write(",".join(_fmt(v) for v in
                              (fan.s[i], fan.q[i], fan.V[i], fan.w[i], fan.d2V[i], fan.dsq[i])))
            fh.write("\n")
    print(f"wrote {fan.s.size} rows to {args.out}")
    return 0


def _cmd_ja_probe(args) -> int:
    cfg, u0, u1, field = _load(args)
    times = [float(x) for x in args.times.split(",") if x.strip()]
    apx = ApproxSolution(u0, u1, epsilon=args.epsilon)
    slope, sups = ja_scaling_probe(apx, times)
    body = "t,supJa\n" + "".join(f"{_fmt(t)},{_fmt(s)}\n" for t, s in zip(times, sups))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    print(f"fitted log-log slope: {_fmt(slope)}", file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    cfg, u0, u1, field = _load(args)
    est = tau0_estimate(field, grid_n=20001)
    eps = args.epsilon
    dr = args.dr if args.dr is not None else cfg.get_float("solver", "dr")
    thresholds = (tuple(float(x) for x in args.thresholds.split(","))
                  if args.thresholds else cfg.thresholds)
    t_max = args.tmax if args.tmax is not None else cfg.tmax(eps, est.tau0)
    snapshot_times = ()
    if args.snapshots:
        os.makedirs(args.snapshots, exist_ok=True)
        stride = args.snap_stride
        if t_max / stride > 200000:
            raise InputError(
                f"snapshot stride {stride} over horizon {t_max:.3g} would write "
                f"{t_max / stride:.0f} files; coarsen --snap-stride or cap --tmax")
        snapshot_times = tuple(np.arange(0.0, t_max, stride))
    res = run_to_blowup(u0, u1, eps, dr, t_max=t_max, thresholds=thresholds,
                        rho0=est.s_star, cfl=cfg.get_float("solver", "cfl"),
                        c2_floor=cfg.get_float("solver", "c2_floor"),
                        diag_stride_t=cfg.get_float("solver", "diag_stride"),
                        window_q=cfg.window_q(eps), snapshot_times=snapshot_times)
    s = res.series
    with open(args.out, "w", newline="") as fh:
        fh.write("t,max_abs_w1,max_abs_w2,min_c2,A,B,C,D\n")
        for i in range(s["t"].size):
            fh.write(",".join(_fmt(s[k][i]) for k in
                              ("t", "max_abs_w1", "max_abs_w2", "min_c2", "A", "B", "C", "D")))
            fh.write("\n")
    for t_snap, r, U, dtU in res.snapshots:
        path = os.path.join(args.snapshots, f"U_{t_snap:.4f}.csv")
        with open(path, "w", newline="") as fh:
            fh.write("r,U,dtU\n")
            for j in range(r.size):
                fh.write(f"{_fmt(r[j])},{_fmt(U[j])},{_fmt(dtU[j])}\n")
    rep = res.report
    print(f"cause={rep.cause} t_end={_fmt(rep.t_end)} "
          f"T_star={'' if rep.t_star is None else _fmt(rep.t_star)}")
    for lam, t_c in rep.crossing_times.items():
        print(f"  crossing |w1|>={_fmt(lam)}: {'not reached' if t_c is None else _fmt(t_c)}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    result = sweep(cfg, jobs=args.jobs)
    out = args.out if args.out else cfg.get("sweep", "out")
    with open(out, "w", newline="") as fh:
        fh.write(render_sweep_csv(result))
    d, viol = result.trend()
    print(f"wrote {len(result.rows)} rows to {out} (tau0_ref={_fmt(result.tau0_ref)})")
    for eps, dev in d:
        print(f"  eps={_fmt(eps)}: |eps ln T - tau0| = {_fmt(dev)}")
    print(f"monotonicity violations: {viol}")
    return 0


def _load_snapshots(run_dir: str):
    pat = re.compile(r"U_([0-9.]+)\.csv$")
    snaps = []
    for name in os.listdir(run_dir):
        m = pat.match(name)
        if not m:
            continue
        t = float(m.group(1))
        data = np.loadtxt(os.path.join(run_dir, name), delimiter=",", skiprows=1)
        snaps.append((t, data[:, 0], data[:, 1], data[:, 2]))
    if not snaps:
        raise InputError(f"no U_<t>.csv snapshots found in {run_dir}")
    snaps.sort(key=lambda s: s[0])
    return snaps


def _cmd_oracle(args) -> int:
    cfg, u0, u1, field = _load(args)
    est = tau0_estimate(field, grid_n=20001)
    rho0 = est.s_star if args.rho0 == "auto" else float(args.rho0)
    snaps = _load_snapshots(args.run)
    dr = float(np.min(np.diff(snaps[0][1])))
    traced = track_characteristic(snaps, rho0, +1, dr)
    run_like = SimpleNamespace(paths={"rho0": traced})
    out = certify_from_run(run_like, field, rho0, args.mu, args.epsilon, est.tau0)
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for key in sorted(out):
            print(f"{key:16s} = {out[key]}")
    return 0


def _cmd_selftest(args) -> int:
    return 0 if run_selftest() else 3


def _cmd_dump_config(args) -> int:
    cfg = parse_config(args.config)
    sys.stdout.write(dump_config(cfg))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qwblow",
        description="numerical laboratory for geometric blowup of a radial quasilinear wave equation",
        epilog=_defaults_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("tau0", help="minimize the lifespan functional")
    _add_config_arg(p)
    p.add_argument("--grid-n", type=int, default=100001)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_tau0)

    p = sub.add_parser("profile", help="characteristic fan at fixed slow time")
    _add_config_arg(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--n", type=int, default=2001)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_profile)

    p = sub.add_parser("ja-probe", help="interior-residual scaling probe")
    _add_config_arg(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--times", required=True, help="comma-separated probe times")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_ja_probe)

    p = sub.add_parser("simulate", help="integrate one blowup run")
    _add_config_arg(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--dr", type=float, default=None)
    p.add_argument("--thresholds", default=None)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--snapshots", default=None)
    p.add_argument("--snap-stride", type=float, default=1.0)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("sweep", help="epsilon sweep assembling the lifespan table")
    _add_config_arg(p)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("oracle", help="Riccati certificate from stored snapshots")
    _add_config_arg(p)
    p.add_argument("--run", required=True, help="directory of U_<t>.csv snapshots")
    p.add_argument("--rho0", default="auto")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("selftest", help="fast invariant suite")
    p.set_defaults(fn=_cmd_selftest)

    p = sub.add_parser("dump-config", help="emit the effective configuration")
    _add_config_arg(p)
    p.set_defaults(fn=_cmd_dump_config)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RunFailure, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
