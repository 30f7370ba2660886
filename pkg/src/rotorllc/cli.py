"""`sim` command line: batch runs, frequency responses, fidelity scoring,
real-time serving, and parameter sweeps."""

from __future__ import annotations

import argparse
import asyncio
import json
import math
import sys

import numpy as np

from . import fidelity as fid_mod
from . import runner, trace as trace_mod
from .harmonic import LtiModel
from .reduction import ReducedLti
from .scenario import MODE_CUE, POLICY_PERFECT, Scenario


def _cmd_run(args) -> int:
    scenario = Scenario.load(args.scenario)
    if args.mode:
        scenario = scenario.with_mode(args.mode)
    setup = runner.prepare(scenario)
    if scenario.mode == MODE_CUE and scenario.pilot_policy == POLICY_PERFECT:
        result = runner.run_piloted(scenario, setup)
    else:
        result = runner.run_batch(scenario, setup)
    peak = float(np.nanmax(result["y_1rev_exact"]))
    print(f"{scenario.name}: mode={scenario.mode} frames={len(result)} peak 1/rev={peak:.1f} lbs")
    misses = int(result["deadline_miss"].sum())
    if misses:
        print(f"  solver deadline misses: {misses}")
    if args.out:
        trace_mod.export_trace(result, args.out)
        print(f"  trace written to {args.out}")
    return 0


def _load_model(path):
    with open(path) as fh:
        doc = json.load(fh)
    if "a_hat" in doc:
        return ReducedLti.from_json(doc)
    return LtiModel.from_json(doc)


def _cmd_freq(args) -> int:
    model = _load_model(args.model)
    if args.omega:
        omega = np.array([float(w) for w in args.omega])
    else:
        omega = np.logspace(math.log10(args.omega_min), math.log10(args.omega_max), args.n_omega)
    fr = fid_mod.frequency_response(model, args.pairs, omega)
    fid_mod.export_frequency_response(fr, args.out)
    print(f"{len(args.pairs)} pair(s) over {omega.shape[0]} frequencies -> {args.out}")
    return 0


def _cmd_fidelity(args) -> int:
    model_fr = fid_mod.import_frequency_response(args.model_fr)
    ref_fr = fid_mod.import_frequency_response(args.ref_fr)
    report = fid_mod.fidelity_cost(model_fr, ref_fr, w_g=args.w_g, w_p=args.w_p)
    print(report)
    return 0


def _cmd_serve(args) -> int:
    scenario = Scenario.load(args.scenario)
    if scenario.mode != MODE_CUE:
        print(f"serve requires a cue-mode scenario, got {scenario.mode!r}", file=sys.stderr)
        return 2
    from .server import serve_realtime

    print(f"serving {scenario.name!r} on ws://127.0.0.1:{args.port} (cue gain {args.cue_gain})")
    result = asyncio.run(serve_realtime(scenario, args.port, cue_gain=args.cue_gain))
    print(
        f"session complete: {len(result.trace)} frames, "
        f"{result.deadline_misses} deadline misses, {result.jitter_frames} jitter frames"
    )
    if args.out:
        trace_mod.export_trace(result.trace, args.out)
        print(f"  trace written to {args.out}")
    if args.stick_log:
        with open(args.stick_log, "w") as fh:
            json.dump({"schema_version": 1, "sticks": result.sticks}, fh)
        print(f"  stick log written to {args.stick_log}")
    return 0


def _cmd_sweep(args) -> int:
    from .llc import MpcConfig

    scenario = Scenario.load(args.scenario)
    param = args.param if args.param in MpcConfig.__dataclass_fields__ else args.param.lower()
    if param not in MpcConfig.__dataclass_fields__:
        print(f"unknown limiter parameter {args.param!r}", file=sys.stderr)
        return 2
    rows = []
    for value in args.values:
        over = dict(scenario.mpc_overrides)
        over[param] = float(value)
        from dataclasses import replace

        sc = replace(scenario, mpc_overrides=over)
        setup = runner.prepare(sc)
        result = runner.run_batch(sc, setup)
        peak = float(np.nanmax(result["y_1rev_exact"]))
        cm_min = float(np.nanmin(result["cm"])) if np.isfinite(result["cm"]).any() else math.nan
        med_ms = float(np.median(result["solve_ms"]))
        rows.append((float(value), peak, cm_min, med_ms))
    print(f"{param:>12s} {'peak 1/rev':>12s} {'min cm':>10s} {'med solve ms':>13s}")
    for value, peak, cm_min, med_ms in rows:
        print(f"{value:12.6g} {peak:12.2f} {cm_min:10.3f} {med_ms:13.3f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(f"{param},peak_1rev,min_cm,median_solve_ms\n")
            for row in rows:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        print(f"sweep table written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim", description="Harmonic load limiting control workbench"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario batch simulation")
    p_run.add_argument("scenario")
    p_run.add_argument("--mode", choices=["llc_off", "auto_limit", "cue"])
    p_run.add_argument("--out", help="write the trace CSV here")
    p_run.set_defaults(func=_cmd_run)

    p_freq = sub.add_parser("freq", help="frequency response of a model JSON")
    p_freq.add_argument("model")
    p_freq.add_argument("--pairs", nargs="+", required=True, help="e.g. q/delta_lon pitch_link_load.1c/delta_lon")
    p_freq.add_argument("--out", required=True)
    p_freq.add_argument("--omega", nargs="*", help="explicit grid, rad/s")
    p_freq.add_argument("--omega-min", type=float, default=0.6)
    p_freq.add_argument("--omega-max", type=float, default=20.0)
    p_freq.add_argument("--n-omega", type=int, default=40)
    p_freq.set_defaults(func=_cmd_freq)

    p_fid = sub.add_parser("fidelity", help="frequency-domain mismatch cost")
    p_fid.add_argument("model_fr")
    p_fid.add_argument("ref_fr")
    p_fid.add_argument("--w-g", type=float, default=fid_mod.W_G_DEFAULT)
    p_fid.add_argument("--w-p", type=float, default=fid_mod.W_P_DEFAULT)
    p_fid.set_defaults(func=_cmd_fidelity)

    p_serve = sub.add_parser("serve", help="real-time cue session server")
    p_serve.add_argument("scenario")
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--cue-gain", type=float, default=1.0)
    p_serve.add_argument("--out", help="write the session trace CSV here")
    p_serve.add_argument("--stick-log", help="write the raw stick log JSON here")
    p_serve.set_defaults(func=_cmd_serve)

    p_sweep = sub.add_parser("sweep", help="sweep one limiter config parameter")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--param", required=True, help="MpcConfig field, e.g. tp")
    p_sweep.add_argument("--values", nargs="+", required=True)
    p_sweep.add_argument("--out")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
