"""Command-line driver.

Exit codes: 0 success, 2 usage/validation error, 3 I/O error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, qstate
from .kernels import BACKEND
from .noise import ExperimentConfig, NoiseConfig, run_experiment
from .protocols import TfdSpec, black_hole_side_entropy, measurement_free_teleport, tfd_state
from .qstate import NotPSDError, StateError
from .report import LN2, atomic_write, complex_vector_to_json, dumps, utc_now
from .variational import OptimizerConfig, optimize

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4
OUT_ENV = "WORMHOLE_TELEPORT_OUT"


class UsageError(Exception):
    pass


def _out_dir(arg: str | None) -> Path:
    return Path(arg or os.environ.get(OUT_ENV) or "results")


def _manifest(command: str, config: dict, seed, outputs: list[Path], started: float) -> dict:
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "kernel_backend": BACKEND,
        "outputs": [str(p) for p in outputs],
        "created": utc_now(),
        "duration_s": round(time.perf_counter() - started, 3),
    }


def _emit(text: str, path: Path | None) -> list[Path]:
    if path is None:
        sys.stdout.write(text)
        return []
    return [atomic_write(path, text)]


def cmd_teleport(args) -> int:
    if args.theta is not None or args.phi is not None:
        if args.state is not None:
            raise UsageError("give either --state or --theta/--phi, not both")
        theta, phi = args.theta or 0.0, args.phi or 0.0
        psi, label = qstate.bloch_state(theta, phi), f"bloch(theta={theta!r},phi={phi!r})"
    else:
        if args.state is None:
            raise UsageError("give --state or --theta/--phi")
        label = args.state
        try:
            psi = qstate.labeled_state(label)
        except StateError as exc:
            raise UsageError(str(exc)) from None
    report = measurement_free_teleport(psi, label)
    report.metadata.update(seed=None, config={"state": label}, created=utc_now(), version=__version__)
    _emit(report.to_json(), Path(args.out) if args.out else None)
    return EXIT_OK


def cmd_experiment(args) -> int:
    started = time.perf_counter()
    try:
        noise = NoiseConfig(epsilon=args.eps, readout_flip_prob=args.readout)
        cfg = ExperimentConfig(runs=args.runs, shots=args.shots, rng_seed=args.seed)
    except StateError as exc:
        raise UsageError(str(exc)) from None
    report = run_experiment(cfg, noise)
    out = _out_dir(args.out)
    written = [
        atomic_write(out / "experiment.json", dumps(report.to_dict())),
        atomic_write(out / "experiment_runs.csv", report.runs_csv()),
        atomic_write(out / "experiment_summary.csv", report.summary_csv()),
    ]
    if args.plot_data:
        written.append(atomic_write(out / "fidelity_plot_data.json", dumps(report.plot_data())))
    config = {"eps": args.eps, "readout": args.readout, "runs": args.runs, "shots": args.shots}
    atomic_write(out / "manifest.json", dumps(_manifest("experiment", config, args.seed, written, started)))
    for label, m in report.summary().items():
        print(f"{label:>6}  F_out={m['output_fidelity']['mean']:.5f}  "
              f"F_H={m['hawking_fidelity']['mean']:.5f}  S_H/ln2={m['hawking_entropy_over_ln2']['mean']:.5f}")
    return EXIT_OK


def cmd_varsearch(args) -> int:
    started = time.perf_counter()
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    reps = args.reps if args.reps is not None else (3 if args.n == 2 else 2)
    if reps < 0:
        raise UsageError("--reps must be >= 0")
    try:
        cfg = OptimizerConfig(max_iters=args.max_iters, restarts=args.restarts, rng_seed=args.seed,
                              method=args.method)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    trace = optimize(args.n, reps, cfg)
    out = _out_dir(args.out)
    written = [
        atomic_write(out / "varsearch.json", dumps(trace.to_dict())),
        atomic_write(out / "varsearch_costs.csv", trace.costs_csv()),
        atomic_write(out / "varsearch_summary.csv", trace.summary_csv()),
    ]
    config = {"n": args.n, "reps": reps, "restarts": args.restarts, "max_iters": args.max_iters,
              "method": args.method}
    atomic_write(out / "manifest.json", dumps(_manifest("varsearch", config, args.seed, written, started)))
    for r in trace.restarts:
        print(f"run {r.restart + 1}: cost={r.best_cost:.3e}  fidelity={r.fidelity:.6f}  "
              f"S_H/ln2={r.entropy_over_ln2:.6f}±{r.entropy_over_ln2_sem:.1e}")
    return EXIT_OK


def _parse_energies(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"cannot parse energies {text!r}") from None


def _parse_beta(text: str) -> float:
    if text.strip().lower() in {"inf", "+inf", "infinity"}:
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"cannot parse beta {text!r}") from None


def cmd_tfd(args) -> int:
    try:
        spec = TfdSpec(_parse_energies(args.energies), _parse_beta(args.beta))
        psi = tfd_state(spec)
    except StateError as exc:
        raise UsageError(str(exc)) from None
    s = black_hole_side_entropy(psi, spec.n_qubits)
    payload = {
        "energies": list(spec.energies),
        "beta": "inf" if math.isinf(spec.beta) else spec.beta,
        "side_qubits": spec.n_qubits,
        "amplitudes": complex_vector_to_json(psi),
        "side_entropy_nats": s,
        "side_entropy_over_ln2": s / LN2,
        "created": utc_now(),
    }
    _emit(dumps(payload), Path(args.out) if args.out else None)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wormhole-teleport", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("teleport", help="run the measurement-free protocol on one state")
    t.add_argument("--state", help=f"one of {', '.join(qstate.STATE_LABELS)}")
    t.add_argument("--theta", type=float, help="Bloch polar angle (radians)")
    t.add_argument("--phi", type=float, help="Bloch azimuth (radians)")
    t.add_argument("--out", help="report JSON path (default: stdout)")
    t.set_defaults(func=cmd_teleport)

    e = sub.add_parser("experiment", help="noisy finite-shot replay with tomography")
    e.add_argument("--eps", type=float, default=0.0, help="pseudo-pure mixing weight in [0, 1]")
    e.add_argument("--readout", type=float, default=0.0, help="per-qubit readout flip probability")
    e.add_argument("--runs", type=int, default=12)
    e.add_argument("--shots", type=int, default=8192)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./results)")
    e.add_argument("--plot-data", action="store_true", help="also write the fidelity bar-chart series")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("varsearch", help="variational search for V with the RY ansatz")
    v.add_argument("--n", type=int, required=True, help="number of shared EPR pairs (>= 2)")
    v.add_argument("--reps", type=int, help="ansatz repetitions (default 3 for N=2, else 2)")
    v.add_argument("--restarts", type=int, default=5)
    v.add_argument("--max-iters", type=int, default=500, help="cost evaluations per restart")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--method", default="cobyla", choices=["cobyla", "nelder-mead"])
    v.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./results)")
    v.set_defaults(func=cmd_varsearch)

    d = sub.add_parser("tfd", help="thermofield double state and one-side entropy")
    d.add_argument("--energies", required=True, help="comma-separated, power-of-two count")
    d.add_argument("--beta", default="0", help="inverse temperature, or 'inf'")
    d.add_argument("--out", help="JSON path (default: stdout)")
    d.set_defaults(func=cmd_tfd)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NotPSDError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
