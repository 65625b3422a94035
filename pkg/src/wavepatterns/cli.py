"""Command line entry point: ``wavepatterns <subcommand> --scenario FILE``.

Exit codes: 0 success, 1 a verification criterion failed, 2 usage or
configuration error, 3 numerical abort.
"""
import argparse
import logging
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import artifacts as io
from .composite import build_composite, eval_composite, residual_decay, residuals
from .contact import check_contact_decay, eval_contact
from .diagnostics import perturbation
from .errors import ConfigurationError, DomainError, NumericalAbort, SolverError
from .rarefaction import end_states, eval_rarefaction, strength
from .riemann import decompose
from .scenario import emit_scenario, load_scenario, resolved_delta, sample_grid
from .solver import run
from .verification import (
    Check,
    StabilityCriteria,
    all_passed,
    construction_checks,
    stability_checks,
)

log = logging.getLogger("wavepatterns")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3


def _outdir(args, scenario, sub):
    root = args.out if args.out is not None else scenario.output
    return io.ensure_dir(os.path.join(root, sub))


def _profile_columns(x, t, f):
    return {"x": x, "t": np.full_like(x, t), "V": f.V, "U": f.U, "Theta": f.Theta,
            "Vx": f.V_x, "Ux": f.U_x, "Thetax": f.Theta_x}


def _wave(sc):
    return build_composite(sc.gas, decompose(sc.gas, sc.z_minus, sc.z_plus))


def cmd_contact_profile(sc, out):
    wave = _wave(sc)
    prof = wave.contact
    x = sample_grid(sc)
    files = []
    for t in sc.diagnostics.profile_times:
        name = f"contact_t{io.time_tag(t)}.csv"
        io.write_csv(os.path.join(out, name), _profile_columns(x, t, eval_contact(prof, sc.gas, x, t)))
        files.append(name)
    meta = {"theta_minus": prof.theta_minus, "theta_plus": prof.theta_plus, "p_plus": prof.p_plus,
            "u": prof.u_minus, "diffusivity": prof.a, "ode_residual": prof.residual,
            "iterations": prof.iterations, "delta": prof.delta}
    if prof.delta > 0:
        meta["envelopes"] = [asdict(e) for e in check_contact_decay(prof).envelopes]
    io.write_json(os.path.join(out, "contact.json"), meta)
    io.write_plot_script(out, "plot_contact.py", "contact wave profiles", files, "x",
                         ["V", "U", "Theta"])
    return EXIT_OK


def cmd_rarefaction(sc, out):
    wave = _wave(sc)
    x = sample_grid(sc)
    meta, files = {}, []
    for spec in (wave.rarefaction_1, wave.rarefaction_3):
        key = f"rarefaction_{spec.family}"
        left, right = end_states(spec, sc.gas)
        meta[key] = {"trivial": spec.trivial, "w_l": spec.w_l, "w_r": spec.w_r,
                     "left": left.to_list(), "right": right.to_list(),
                     "strength": strength(spec, sc.gas)}
        if spec.trivial:
            continue
        for t in sc.diagnostics.profile_times:
            name = f"rarefaction{spec.family}_t{io.time_tag(t)}.csv"
            f = eval_rarefaction(spec, sc.gas, x, t)
            io.write_csv(os.path.join(out, name), _profile_columns(x, t, f))
            files.append(name)
    io.write_json(os.path.join(out, "rarefaction.json"), meta)
    if files:
        io.write_plot_script(out, "plot_rarefaction.py", "rarefaction profiles", files, "x",
                             ["V", "U", "Theta"])
    return EXIT_OK


def cmd_decompose(sc, out):
    pattern = decompose(sc.gas, sc.z_minus, sc.z_plus)
    d = pattern.to_dict()
    d["pure_contact"] = pattern.pure_contact
    io.write_json(os.path.join(out, "pattern.json"), d)
    with open(os.path.join(out, "pattern.json"), encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


def cmd_composite(sc, out):
    wave = _wave(sc)
    x = sample_grid(sc)
    files = []
    for t in sc.diagnostics.profile_times:
        f = eval_composite(wave, sc.gas, x, t)
        res = residuals(wave, sc.gas, x, t)
        name = f"composite_t{io.time_tag(t)}.csv"
        io.write_csv(os.path.join(out, name), {"x": x, "V": f.V, "U": f.U, "Theta": f.Theta,
                                               "R1": res.R1, "R2": res.R2})
        files.append(name)
    ts = [t for t in sc.diagnostics.profile_times if t > 0]
    meta = {"pattern": wave.pattern.to_dict()}
    if len(ts) >= 3:
        meta["residual_decay"] = asdict(residual_decay(wave, sc.gas, ts))
    io.write_json(os.path.join(out, "composite.json"), meta)
    io.write_plot_script(out, "plot_composite.py", "composite wave and residuals", files, "x",
                         ["V", "U", "Theta", "R1", "R2"])
    return EXIT_OK


def _simulate(sc, out, wave=None):
    wave = wave or _wave(sc)
    start = time.perf_counter()
    rec = run(wave, sc.gas, sc.grid, sc.perturbation, sc.solver, delta=resolved_delta(sc),
              on_diag=lambda r: log.info("t=%8.3f sup=%.4e H2=%.4e", r.t, r.sup, r.H2))
    wall = time.perf_counter() - start
    rows = [r.row() for r in rec.diagnostics]
    io.write_csv(os.path.join(out, "norms.csv"),
                 {k: [np.nan if r[k] is None else r[k] for r in rows] for k in rows[0]})
    files = []
    for st in rec.snapshots:
        snap = perturbation(st, wave, sc.gas)
        name = f"snapshot_t{io.time_tag(st.t)}.csv"
        io.write_csv(os.path.join(out, name), {"x": st.x, "v": st.v, "u": st.u, "theta": st.theta,
                                               "phi": snap.phi, "psi": snap.psi, "xi": snap.xi})
        files.append(name)
    io.write_json(os.path.join(out, "run.json"),
                  {"steps": rec.steps, "valid": rec.valid, "messages": rec.messages,
                   "ledger": rec.ledger, "initial_h2": rec.initial_h2, "delta": resolved_delta(sc),
                   "wall_time": wall, "gas": asdict(sc.gas), "z_minus": asdict(sc.z_minus),
                   "z_plus": asdict(sc.z_plus), "grid": asdict(sc.grid),
                   "solver": asdict(sc.solver), "perturbation": asdict(sc.perturbation)})
    io.write_plot_script(out, "plot_norms.py", "perturbation norms", ["norms.csv"], "t",
                         ["sup", "H2", "entropy"], log_y=True)
    io.write_plot_script(out, "plot_snapshots.py", "perturbation snapshots", files, "x",
                         ["phi", "psi", "xi"])
    return rec


def cmd_simulate(sc, out):
    _simulate(sc, out)
    return EXIT_OK


def _criteria(sc):
    d = sc.diagnostics
    return StabilityCriteria(decay_factor=d.decay_factor, tail=d.tail, slack=d.slack,
                             ratio_bound=d.ratio_bound, weighted_check=d.weighted_check)


def cmd_verify(sc, out):
    """Construction checks, then a simulation and the stability checks; writes report.json."""
    checks, wave = construction_checks(sc.gas, sc.z_minus, sc.z_plus)
    status = EXIT_OK
    try:
        rec = _simulate(sc, io.ensure_dir(os.path.join(out, "simulation")), wave)
        checks += stability_checks(rec, _criteria(sc))
    except NumericalAbort as exc:
        checks.append(Check("simulation_completed", False, detail=str(exc)))
        status = EXIT_ABORT
    passed = all_passed(checks)
    io.write_json(os.path.join(out, "report.json"),
                  {"scenario": sc.name, "passed": passed, "checks": [c.to_dict() for c in checks]})
    for c in checks:
        print(c.line())
    if status == EXIT_OK and not passed:
        status = EXIT_FAIL
    return status


COMMANDS = {
    "contact-profile": cmd_contact_profile,
    "rarefaction": cmd_rarefaction,
    "decompose": cmd_decompose,
    "composite": cmd_composite,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="wavepatterns",
                                description="Contact and rarefaction wave patterns of a "
                                            "heat-conducting inviscid gas.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--scenario", required=True, help="scenario YAML file")
        s.add_argument("--out", default=None, help="output directory (default: scenario output)")
        s.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="override a scenario entry, e.g. grid.N=3000 (repeatable)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        sc = load_scenario(args.scenario, args.override)
        out = _outdir(args, sc, args.command)
        with open(os.path.join(out, "scenario.yaml"), "w", encoding="utf-8") as fh:
            fh.write(emit_scenario(sc))
        return COMMANDS[args.command](sc, out)
    except (ConfigurationError, DomainError, OSError) as exc:
        print(f"wavepatterns: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalAbort, SolverError) as exc:
        print(f"wavepatterns: numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
