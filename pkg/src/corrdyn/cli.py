"""Command-line interface.

Subcommands:

* ``ibar``        exact correlation measure of a channel file
* ``lowerbound``  measurement lower bound from a state file or count record
* ``tomo``        simulate measurement records / reconstruct from them
* ``reproduce``   run the figure-level scenario pipelines to CSV

``CORRDYN_SEED`` in the environment overrides every seed argument.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bounds import lower_bound_from_counts, lower_bound_from_state
from .channels import PAULI, channel_from_json, channel_to_json
from .linalg import Observable, load_state, state_to_json
from .measure import PartyStructure, measure_ibar
from .noise import analytic_dephasing_channel, decay_channel, scenario_from_json
from .records import load_record, save_record
from .tomography import (
    mle_process_tomography,
    mle_state_tomography,
    process_tomography_settings,
    simulate_record,
    state_tomography_settings,
)
from . import experiments


def _parse_parties(text: str) -> PartyStructure:
    try:
        m, d = (int(x) for x in text.split(","))
    except ValueError:
        raise SystemExit(f"--parties expects 'M,d', got {text!r}")
    return PartyStructure(m, d)


def _seed(args) -> int:
    env = os.environ.get("CORRDYN_SEED")
    return int(env) if env is not None else args.seed


def _append_csv(path: str, header: list[str], row: list) -> None:
    exists = Path(path).exists()
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if not exists:
            writer.writerow(header)
        writer.writerow(row)


def _cmd_ibar(args) -> int:
    with open(args.channel) as fh:
        channel = channel_from_json(json.load(fh))
    parties = _parse_parties(args.parties)
    report = measure_ibar(channel, parties)
    doc = {"label": args.label, **report.as_dict()}
    print(json.dumps(doc, indent=2))
    if args.csv:
        header = ["label", "m", "d", "ibar", "joint_entropy"] + [
            f"marginal_{i}" for i in range(parties.m)
        ]
        row = [args.label, parties.m, parties.d, report.ibar, report.joint_entropy]
        row += list(report.entropies)
        _append_csv(args.csv, header, row)
    return 0


def _cmd_lowerbound(args) -> int:
    labels = [x.strip() for x in args.obs.split(",")]
    if args.state:
        rho = load_state(args.state)
        parties = (
            _parse_parties(args.parties)
            if args.parties
            else PartyStructure(len(labels), 2)
        )
        obs = [Observable((2,), PAULI[c]) for c in labels]
        result = lower_bound_from_state(rho, obs, parties)
    elif args.counts:
        record = load_record(args.counts)
        parties = (
            _parse_parties(args.parties)
            if args.parties
            else PartyStructure(record.n_qubits, 2)
        )
        result = lower_bound_from_counts(
            record, labels, parties, bootstrap=args.bootstrap, seed=_seed(args)
        )
    else:
        raise SystemExit("lowerbound needs --state or --counts")
    doc = {"label": args.label, "observables": labels, **result.as_dict()}
    print(json.dumps(doc, indent=2))
    if args.csv:
        header = (
            ["label", "m", "d", "joint"]
            + [f"single_{i}" for i in range(parties.m)]
            + ["c", "lower_bound", "std_err"]
        )
        row = [args.label, parties.m, parties.d, result.joint]
        row += list(result.singles)
        row += [result.c, result.lower_bound, result.std_err]
        _append_csv(args.csv, header, row)
    return 0


def _cmd_tomo_simulate(args) -> int:
    seed = _seed(args)
    if args.channel:
        with open(args.channel) as fh:
            source = channel_from_json(json.load(fh))
        n = int(round(np.log2(source.dim)))
        settings = process_tomography_settings(n)
    elif args.state:
        source = load_state(args.state)
        n = int(round(np.log2(source.dim)))
        settings = state_tomography_settings(n)
    elif args.scenario:
        with open(args.scenario) as fh:
            doc = json.load(fh)
        model = scenario_from_json(doc)
        if hasattr(model, "sigma_b"):
            source = analytic_dephasing_channel(model)
        else:
            source = decay_channel(model, float(doc.get("t", 1.0)), int(doc.get("n", 2)))
        n = int(round(np.log2(source.dim)))
        settings = process_tomography_settings(n)
    else:
        raise SystemExit("tomo simulate needs --channel, --state or --scenario")
    record = simulate_record(source, settings, args.shots, seed, exact=args.exact)
    save_record(record, args.out)
    print(
        json.dumps(
            {
                "out": args.out,
                "n": record.n_qubits,
                "settings": len(record.settings),
                "shots_per_setting": args.shots,
                "seed": seed,
            }
        )
    )
    return 0


def _cmd_tomo_reconstruct(args) -> int:
    record = load_record(args.record)
    kind = args.type or ("process" if record.is_process_record() else "state")
    if kind == "state":
        rho, info = mle_state_tomography(record, record.n_qubits, return_info=True)
        out_doc = state_to_json(rho)
    else:
        channel, info = mle_process_tomography(record, record.n_qubits, return_info=True)
        out_doc = channel_to_json(channel, include_choi=True)
    with open(args.out, "w") as fh:
        json.dump(out_doc, fh)
    print(
        json.dumps(
            {
                "out": args.out,
                "type": kind,
                "iterations": info.iterations,
                "converged": info.converged,
                "loglik": info.logliks[-1],
            }
        )
    )
    return 0


def _cmd_reproduce(args) -> int:
    seed = _seed(args)
    if args.ntraj is None:
        # 500 noise samples for the fig4 pipeline, 1000 elsewhere
        args.ntraj = 500 if args.figure == "fig4" else 1000
    if args.figure == "fig4":
        result = experiments.run_fig4(
            args.variant,
            shots=args.shots,
            n_traj=args.ntraj,
            band_reps=args.reps,
            seed=seed,
            include_pipeline=not args.analytic_only,
        )
    elif args.figure == "fig6":
        result = experiments.run_fig6(
            shots=args.shots, n_traj=args.ntraj, band_reps=args.reps, seed=seed
        )
    elif args.figure == "fig7":
        result = experiments.run_fig7(
            shots=args.shots, n_traj=args.ntraj, band_reps=args.reps, seed=seed
        )
    else:
        result = experiments.run_fig8()
    result.write_csv(args.out)
    for check in result.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {result.scenario}: {check.name} ({check.detail})")
    print(json.dumps({"out": args.out, "rows": len(result.rows), "passed": result.passed}))
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrdyn",
        description="Quantify spatial correlations in quantum dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ibar", help="exact correlation measure of a channel")
    p.add_argument("--channel", required=True, help="channel JSON file")
    p.add_argument("--parties", required=True, help="party structure 'M,d'")
    p.add_argument("--label", default="channel")
    p.add_argument("--csv", help="append a CSV row to this file")
    p.set_defaults(func=_cmd_ibar)

    p = sub.add_parser("lowerbound", help="measurement lower bound")
    p.add_argument("--state", help="state JSON file")
    p.add_argument("--counts", help="measurement record JSON file")
    p.add_argument("--obs", required=True, help="comma-separated Pauli labels, e.g. 'X,X'")
    p.add_argument("--parties", help="party structure 'M,d' (default: one qubit per label)")
    p.add_argument("--bootstrap", action="store_true", help="bootstrap the error bar")
    p.add_argument("--label", default="state")
    p.add_argument("--csv", help="append a CSV row to this file")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_lowerbound)

    p = sub.add_parser("tomo", help="simulate or reconstruct tomography data")
    tomo_sub = p.add_subparsers(dest="tomo_command", required=True)

    ps = tomo_sub.add_parser("simulate", help="generate a measurement record")
    ps.add_argument("--channel", help="channel JSON (process tomography)")
    ps.add_argument("--state", help="state JSON (state tomography)")
    ps.add_argument("--scenario", help="noise scenario JSON")
    ps.add_argument("--shots", type=int, default=100)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--exact", action="store_true", help="expected counts, no projection noise")
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=_cmd_tomo_simulate)

    pr = tomo_sub.add_parser("reconstruct", help="maximum-likelihood reconstruction")
    pr.add_argument("--record", required=True)
    pr.add_argument("--type", choices=["state", "process"])
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=_cmd_tomo_reconstruct)

    p = sub.add_parser("reproduce", help="run a figure scenario to CSV")
    p.add_argument("figure", choices=["fig4", "fig6", "fig7", "fig8"])
    p.add_argument("--variant", choices=list(experiments.FIG4_VARIANTS), default="sym")
    p.add_argument("--out", required=True)
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--ntraj", type=int, default=None)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--analytic-only", action="store_true", help="skip the sampled pipeline (fig4)")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
