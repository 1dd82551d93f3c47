"""Command-line front end.

Verbs: simulate, identify, sweep solvability|error, observability,
partial-identify, decompose, plot.  Exit codes: 0 on success, 2 for
configuration errors, 3 for numerical failures (partial sweep CSVs are
flushed row by row, so whatever completed survives).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import liouvillian, sample_trajectory, write_trajectory_csv, read_trajectory_csv
from .identify import identify_topology
from .linalg import hermitize, load_matrix, matrix_from_json, save_matrix, spectral_norm
from .netmodel import basis_density, erdos_renyi, is_connected
from .partialinfo import (
    diagonal_selector,
    estimate_derivative_stacks,
    exact_derivative_stacks,
    extract_hamiltonian,
    identity_initial_batch,
    observability_rank,
    physical_decomposition,
    physical_initial_batch,
    reconstruct_liouvillian,
    sample_output_stacks,
    simulate_diagonal_outputs,
    write_output_batch,
)
from .sweep import ConfigError, SweepConfig, run_sweep
from .svgplot import emit_plot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnetid",
        description="Coupling-matrix reconstruction for closed quantum networks",
    )
    parser.add_argument("--version", action="version", version=f"qnetid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sample a density-operator trajectory")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--hamiltonian", help="matrix JSON file with the network Hamiltonian")
    src.add_argument("--er-d", type=int, help="draw an Erdos-Renyi graph with this many nodes")
    sim.add_argument("--er-p", type=float, default=0.5, help="link probability for --er-d")
    sim.add_argument("--connected-only", action="store_true",
                     help="redraw --er-d graphs until connected")
    sim.add_argument("--seed", type=int, default=0, help="seed for --er-d")
    state = sim.add_mutually_exclusive_group()
    state.add_argument("--rho0", help="matrix JSON file with the initial state")
    state.add_argument("--excite-node", type=int, default=None,
                       help="start from the basis state of this node (1-based, default 1)")
    sim.add_argument("--tau", type=float, required=True)
    sim.add_argument("--dt", type=float, required=True)
    sim.add_argument("--hbar", type=float, default=1.0)
    sim.add_argument("--out", required=True, help="trajectory CSV to write")
    sim.add_argument("--save-hamiltonian", help="also save the (generated) Hamiltonian")

    ident = sub.add_parser("identify", help="reconstruct the coupling matrix from a trajectory")
    ident.add_argument("--trajectory", required=True, help="trajectory CSV from 'simulate'")
    ident.add_argument("--subsample", type=int, default=1,
                       help="quadrature subsampling divisor of n_s")
    ident.add_argument("--hbar", type=float, default=1.0)
    ident.add_argument("--h0", help="matrix JSON of a known node Hamiltonian to subtract")
    ident.add_argument("--truth", help="matrix JSON of the true coupling matrix (for epsilon)")
    ident.add_argument("--rtol", type=float, default=1e-9)
    ident.add_argument("--label-rtol", type=float, default=None)
    ident.add_argument("--general-coupling", action="store_true",
                       help="solve in the full admissible class instead of real couplings")
    ident.add_argument("--seed", type=int, default=None, help="seed recorded in the report")
    ident.add_argument("--out", help="write the identification report JSON here")

    sw = sub.add_parser("sweep", help="benchmark sweeps over random networks")
    sw.add_argument("target", choices=("solvability", "error"))
    sw.add_argument("--config", help="JSON file with a sweep configuration")
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--d-min", type=int, default=None)
    sw.add_argument("--d-max", type=int, default=None)
    sw.add_argument("--p-link", type=float, default=None)
    sw.add_argument("--tau", type=float, action="append", default=None,
                    help="repeatable; evolution lengths")
    sw.add_argument("--dt", type=float, default=None)
    sw.add_argument("--subsample", type=int, action="append", default=None,
                    help="repeatable; quadrature subsampling divisors")
    sw.add_argument("--trials", type=int, default=None)
    sw.add_argument("--hbar", type=float, default=None)
    sw.add_argument("--rtol", type=float, default=None)
    sw.add_argument("--label-rtol", type=float, default=None)
    sw.add_argument("--jobs", type=int, default=None)
    sw.add_argument("--extended", action="store_true",
                    help="extend the grid to d = 30 (transition region; slower)")
    sw.add_argument("--timing", action="store_true",
                    help="record wall-clock times in the CSV (breaks byte reproducibility)")
    sw.add_argument("--allow-disconnected", action="store_true",
                    help="keep disconnected graph draws instead of redrawing")
    sw.add_argument("--general-coupling", action="store_true",
                    help="identify in the full admissible class")
    sw.add_argument("--out-dir", required=True)

    obs = sub.add_parser("observability", help="rank test of the diagonal-output pair")
    osrc = obs.add_mutually_exclusive_group(required=True)
    osrc.add_argument("--hamiltonian", help="matrix JSON with the Hamiltonian")
    osrc.add_argument("--report", help="identification report JSON; checks its estimate "
                                       "(a-posteriori observability of the reconstruction)")
    obs.add_argument("--hbar", type=float, default=1.0)
    obs.add_argument("--rtol", type=float, default=1e-9)

    part = sub.add_parser("partial-identify",
                          help="recover the generator from diagonal outputs only")
    part.add_argument("--hamiltonian", required=True,
                      help="matrix JSON with the network Hamiltonian to simulate")
    part.add_argument("--hbar", type=float, default=1.0)
    part.add_argument("--rtol", type=float, default=1e-9)
    part.add_argument("--estimate", action="store_true",
                      help="estimate output derivatives by finite differences instead of "
                           "using the exact oracle")
    part.add_argument("--fd-step", type=float, default=1e-3,
                      help="finite-difference step for --estimate")
    part.add_argument("--save-outputs", help="directory for the per-initialization output CSVs")
    part.add_argument("--tau", type=float, default=1.0, help="span of saved output records")
    part.add_argument("--dt", type=float, default=0.01, help="sampling period of saved outputs")
    part.add_argument("--out", help="write a summary JSON here")

    dec = sub.add_parser("decompose", help="physical decomposition of a basis element |k><j|")
    dec.add_argument("--dim", type=int, required=True)
    dec.add_argument("--k", type=int, required=True)
    dec.add_argument("--j", type=int, required=True)
    dec.add_argument("--out-dir", help="write each state as matrix JSON plus coefficients")

    plot = sub.add_parser("plot", help="render a sweep CSV to SVG")
    plot.add_argument("--csv", required=True)
    plot.add_argument("--kind", choices=("solvability", "error"), required=True)
    plot.add_argument("--out", required=True)

    return parser


def _load_hermitian(path) -> np.ndarray:
    return hermitize(load_matrix(path))


def _cmd_simulate(args) -> int:
    if args.hamiltonian:
        h = _load_hermitian(args.hamiltonian)
    else:
        if args.er_d is None or args.er_d < 2:
            raise ConfigError("--er-d must be at least 2")
        rng = np.random.default_rng(args.seed)
        h = erdos_renyi(args.er_d, args.er_p, rng).astype(complex)
        while args.connected_only and not is_connected(h.real):
            h = erdos_renyi(args.er_d, args.er_p, rng).astype(complex)
    d = h.shape[0]
    if args.rho0:
        rho0 = load_matrix(args.rho0)
    else:
        node = 1 if args.excite_node is None else args.excite_node
        rho0 = basis_density(d, node)
    traj = sample_trajectory(h, rho0, args.tau, args.dt, args.hbar)
    write_trajectory_csv(traj, args.out)
    if args.save_hamiltonian:
        save_matrix(args.save_hamiltonian, h)
    print(f"wrote {traj.n_samples + 1} samples (d={d}, tau={args.tau:g}, dt={args.dt:g}) "
          f"to {args.out}")
    return EXIT_OK


def _cmd_identify(args) -> int:
    traj = read_trajectory_csv(args.trajectory)
    h0 = _load_hermitian(args.h0) if args.h0 else None
    truth = _load_hermitian(args.truth) if args.truth else None
    report = identify_topology(
        traj,
        subsample=args.subsample,
        hbar=args.hbar,
        known_h0=h0,
        truth=truth,
        rtol=args.rtol,
        real_coupling=not args.general_coupling,
        label_rtol=args.label_rtol,
    )
    report.seed = args.seed
    print(f"outcome:     {report.outcome}")
    print(f"solvability: {report.solvability} (rank {report.label_rank}/{report.required_rank})")
    print(f"residual:    {report.residual:.3e}")
    if report.epsilon is not None:
        print(f"epsilon:     {report.epsilon:.3e}")
    if args.out:
        report.save(args.out)
        print(f"report written to {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.config:
        with open(args.config) as fh:
            cfg = SweepConfig.from_json(json.load(fh))
    else:
        cfg = SweepConfig()
    overrides = dict(
        seed=args.seed,
        d_min=args.d_min,
        d_max=args.d_max,
        p_link=args.p_link,
        taus=args.tau,
        dt=args.dt,
        subsamples=args.subsample,
        trials=args.trials,
        hbar=args.hbar,
        rtol=args.rtol,
        label_rtol=args.label_rtol,
        jobs=args.jobs,
    )
    cfg = cfg.override(**overrides)
    if args.extended:
        cfg = cfg.override(d_max=max(cfg.d_max, 30))
    if args.timing:
        cfg = cfg.override(timing=True)
    if args.allow_disconnected:
        cfg = cfg.override(connected_only=False)
    if args.general_coupling:
        cfg = cfg.override(real_coupling=False)
    cfg = cfg.validated()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_csv = out_dir / f"{args.target}.csv"
    result = run_sweep(cfg, kind=args.target, out_csv=out_csv)
    print(f"wrote {len(result.records)} cells to {out_csv}")
    for curve, marks in result.critical_sizes().items():
        print(f"  {curve}: last d with mean solvability 1 -> {marks['last_full_d']}, "
              f"first d at 0 -> {marks['first_zero_d']}")
    return EXIT_OK


def _cmd_observability(args) -> int:
    if args.hamiltonian:
        h = _load_hermitian(args.hamiltonian)
        source = args.hamiltonian
    else:
        with open(args.report) as fh:
            report = json.load(fh)
        h = hermitize(matrix_from_json(report["m_hat"]))
        source = f"{args.report} (reconstructed estimate)"
    liouv = liouvillian(h, args.hbar)
    c = diagonal_selector(h.shape[0])
    rank, observable = observability_rank(c, liouv, args.rtol)
    n = liouv.shape[0]
    print(f"source: {source}")
    print(f"observability rank: {rank} of {n}")
    print(f"observable: {'yes' if observable else 'no'}")
    return EXIT_OK


def _cmd_partial_identify(args) -> int:
    h = _load_hermitian(args.hamiltonian)
    d = h.shape[0]
    liouv = liouvillian(h, args.hbar)
    c = diagonal_selector(d)
    rank, observable = observability_rank(c, liouv, args.rtol)
    print(f"observability rank: {rank} of {d * d} ({'observable' if observable else 'NOT observable'})")

    if args.estimate:
        lambda0, _states = physical_initial_batch(d)
        n_half = 2 * ((d * d + 1) // 2)
        outputs = sample_output_stacks(h, lambda0, n_half, args.fd_step, args.hbar)
        stacks = estimate_derivative_stacks(outputs, d * d, args.fd_step)
        mode = f"finite differences (step {args.fd_step:g})"
        extract_rtol = 1e-2  # estimated generators carry differentiation error
    else:
        lambda0 = identity_initial_batch(d)
        stacks = exact_derivative_stacks(liouv, lambda0, d * d)
        mode = "exact derivative oracle"
        extract_rtol = 1e-6

    l_hat = reconstruct_liouvillian(stacks, lambda0, rtol=args.rtol)
    h_hat = extract_hamiltonian(l_hat, hbar=args.hbar, residual_rtol=extract_rtol)
    h_traceless = h - (np.trace(h) / d) * np.eye(d)
    gen_err = spectral_norm(l_hat - liouv) / max(spectral_norm(liouv), 1e-300)
    ham_err = spectral_norm(h_hat - h_traceless) / max(spectral_norm(h_traceless), 1e-300)
    print(f"mode: {mode}")
    print(f"generator relative error:   {gen_err:.3e}")
    print(f"hamiltonian relative error: {ham_err:.3e} (traceless gauge)")

    if args.save_outputs:
        _, states = physical_initial_batch(d)
        runs = []
        for rho, label in states:
            times, ys = simulate_diagonal_outputs(h, rho, args.tau, args.dt, args.hbar)
            runs.append((label, times, ys))
        lambda0_phys, _ = physical_initial_batch(d)
        manifest = write_output_batch(args.save_outputs, runs, lambda0_phys)
        print(f"output batch written to {manifest.parent}")

    if args.out:
        payload = {
            "observability_rank": rank,
            "observable": observable,
            "mode": mode,
            "generator_relative_error": gen_err,
            "hamiltonian_relative_error": ham_err,
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def _cmd_decompose(args) -> int:
    terms = physical_decomposition(args.dim, args.k, args.j)
    print(f"|{args.k}><{args.j}| over {len(terms)} preparable state(s):")
    for idx, (rho, coeff) in enumerate(terms, start=1):
        print(f"  term {idx}: coefficient {coeff.real:+.3f}{coeff.imag:+.3f}i")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        coeffs = []
        for idx, (rho, coeff) in enumerate(terms, start=1):
            name = f"state_{idx:02d}.json"
            save_matrix(out / name, rho)
            coeffs.append({"file": name, "re": coeff.real, "im": coeff.imag})
        with open(out / "coefficients.json", "w") as fh:
            json.dump({"k": args.k, "j": args.j, "terms": coeffs}, fh, indent=2)
            fh.write("\n")
        print(f"states written to {out}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    path = emit_plot(args.csv, args.kind, args.out)
    print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "identify": _cmd_identify,
    "sweep": _cmd_sweep,
    "observability": _cmd_observability,
    "partial-identify": _cmd_partial_identify,
    "decompose": _cmd_decompose,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
