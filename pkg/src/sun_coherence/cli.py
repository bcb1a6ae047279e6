"""
Command-line front end.

    sun-coherence run CONFIG.toml
    sun-coherence verify --n-max 5 --trials 100 --seed 0

``run`` writes one CSV per propagation method plus ``summary.json`` into the
configured output directory (overridden by ``SUN_COHERENCE_OUTPUT_DIR``).
Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .coherence_map import (
    coherence_to_rho,
    eom_matrix_al,
    eom_matrix_he,
    hamiltonian_to_torque,
    random_hermitian,
    rho_to_coherence,
    rwa_hamiltonian,
    verify_al_he_link,
)
from .constants_of_motion import (
    audit_conserved_norms,
    build_f_frame,
    closed_form_f_solution,
    detect_blocks,
    rotated_eom,
)
from .dynamics import (
    PulseProfile,
    TimeGrid,
    ground_state_rho,
    magnus_propagate,
    propagate_coherence_rk4,
    propagate_liouville,
)
from .exceptions import NonCommutingError, NumericalAbort
from .su_n_algebra import build_generators, commutator_reconstruction_residual, structure_constants
from .wei_norman import wn_propagate

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

OUTPUT_ENV = "SUN_COHERENCE_OUTPUT_DIR"
METHODS = ("liouville", "rk4", "magnus", "weinorman", "closedform")
FMT = "%.17g"

VERIFY_TOL = 1e-10
EQ20_TOL = 1e-14


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n_levels: int
    hamiltonian: dict
    grid: TimeGrid
    methods: list
    initial_state: dict = field(default_factory=lambda: {"kind": "ground"})
    output_path: str = "output"
    output_format: str = "csv"

    @classmethod
    def from_dict(cls, raw):
        try:
            n = raw["n_levels"]
            if isinstance(n, bool) or not isinstance(n, int) or n < 2:
                raise ConfigError(f"n_levels must be an integer >= 2, got {n!r}")
            methods = list(raw.get("methods", []))
            if not methods:
                raise ConfigError("methods must be a nonempty list")
            unknown = [m for m in methods if m not in METHODS]
            if unknown:
                raise ConfigError(f"unknown method(s) {unknown}; choose from {list(METHODS)}")
            g = raw["grid"]
            grid = TimeGrid(float(g["t_start"]), float(g["t_end"]), int(g["n_steps"]))
            ham = dict(raw["hamiltonian"])
            out = dict(raw.get("output", {}))
            fmt = out.get("format", "csv")
            if fmt != "csv":
                raise ConfigError(f"unsupported output format {fmt!r}")
            return cls(
                n_levels=n,
                hamiltonian=ham,
                grid=grid,
                methods=methods,
                initial_state=dict(raw.get("initial_state", {"kind": "ground"})),
                output_path=str(out.get("path", "output")),
                output_format=fmt,
            )
        except KeyError as exc:
            raise ConfigError(f"missing config field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path):
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse config: {exc}") from None
        return cls.from_dict(raw)


class _System:
    """Everything derived from a RunConfig that the propagators need."""

    def __init__(self, cfg: RunConfig):
        n = cfg.n_levels
        self.cfg = cfg
        self.gens = build_generators(n)
        self.f = structure_constants(self.gens)
        ham = cfg.hamiltonian
        kind = ham.get("kind", "rwa")
        self.pulse = None
        if kind == "rwa":
            if n != 2:
                raise ConfigError("an RWA two-level Hamiltonian needs n_levels = 2")
            keys = ("shape", "omega0", "delta0", "detuning_mode", "center", "width", "samples")
            self.pulse = PulseProfile(**{k: ham[k] for k in keys if k in ham})
            self.hamiltonian = self.pulse.hamiltonian
            self.eom = self.pulse.eom
        elif kind in ("matrix", "random"):
            if kind == "matrix":
                h = np.asarray(ham["real"], dtype=float) + 1j * np.asarray(ham.get("imag", 0.0), dtype=float)
            else:
                rng = np.random.default_rng(int(ham.get("seed", 0)))
                h = random_hermitian(n, rng, float(ham.get("scale", 1.0)))
            if h.shape != (n, n):
                raise ConfigError(f"Hamiltonian must be {n}x{n}, got {h.shape}")
            g = eom_matrix_al(h, self.gens)
            self.hamiltonian = lambda t: h
            self.eom = lambda t: g
        else:
            raise ConfigError(f"unknown hamiltonian kind {kind!r}")

        self.rho0, self.v0 = self._initial_state(cfg.initial_state)

        # analysis frame: F frame for a proportional two-level drive, else identity
        p = self.pulse
        self.frame = None
        if p is not None and p.detuning_mode == "proportional" and p.peak_epsilon > 0:
            self.frame = build_f_frame(p.omega0, p.delta0, self.gens)
        self.frame_matrix = np.eye(len(self.gens)) if self.frame is None else self.frame.matrix
        self.blocks = detect_blocks(rotated_eom(self.eom, self.frame_matrix), cfg.grid)

    def _initial_state(self, spec):
        n = self.cfg.n_levels
        kind = spec.get("kind", "ground")
        if kind == "ground":
            rho = ground_state_rho(n)
            return rho, rho_to_coherence(rho, self.gens)
        if kind == "coherence":
            v = np.asarray(spec["vector"], dtype=float)
            if v.shape != (n * n - 1,):
                raise ConfigError(f"coherence vector must have {n * n - 1} entries")
            return coherence_to_rho(v, self.gens), v
        if kind == "density":
            rho = np.asarray(spec["real"], dtype=float) + 1j * np.asarray(spec.get("imag", 0.0), dtype=float)
            if rho.shape != (n, n):
                raise ConfigError(f"density matrix must be {n}x{n}")
            return rho, rho_to_coherence(rho, self.gens)
        raise ConfigError(f"unknown initial_state kind {kind!r}")

    def propagate(self, method):
        grid = self.cfg.grid
        if method == "liouville":
            return propagate_liouville(self.rho0, self.hamiltonian, grid, self.gens)
        if method == "rk4":
            return propagate_coherence_rk4(self.v0, self.eom, grid)
        if method == "magnus":
            return magnus_propagate(self.v0, self.eom, grid)
        if method == "weinorman":
            if self.cfg.n_levels != 2:
                raise ConfigError("weinorman is implemented for two-level systems only")
            return wn_propagate(
                self.v0, lambda t: hamiltonian_to_torque(self.hamiltonian(t), self.gens).components, grid
            )
        if method == "closedform":
            p = self.pulse
            if p is None or p.detuning_mode != "proportional":
                raise ConfigError("closedform needs an RWA pulse with proportional detuning")
            if self.cfg.initial_state.get("kind", "ground") != "ground":
                raise ConfigError("closedform needs the ground initial state")
            traj = closed_form_f_solution(p, grid)
            return traj.rotated(self.frame.matrix.T, "G")
        raise ConfigError(f"unknown method {method!r}")


def _write_trajectory(path, traj, system):
    d = traj.states.shape[1]
    framed = traj.states @ system.frame_matrix.T
    block_norms = system.blocks.norms(framed)
    cols = [traj.times[:, None], traj.states, traj.audits["norm2"][:, None], block_norms]
    names = ["time"] + [f"v{a + 1}" for a in range(d)] + ["norm2"]
    names += [f"block{k + 1}_norm2" for k in range(len(system.blocks))]
    if "trace" in traj.audits:
        cols += [traj.audits["trace"][:, None], traj.audits["purity"][:, None]]
        names += ["trace", "purity"]
    np.savetxt(path, np.hstack(cols), fmt=FMT, delimiter=",", header=",".join(names), comments="")


def _drift(x):
    x = np.asarray(x)
    return float(np.max(np.abs(x - x[0])))


def run(cfg: RunConfig, out_dir=None):
    """Run every requested method and write trajectories plus a summary.

    Returns the summary dict.
    """
    system = _System(cfg)
    out_dir = Path(out_dir or os.environ.get(OUTPUT_ENV) or cfg.output_path)
    trajectories = {m: system.propagate(m) for m in cfg.methods}

    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {
        "n_levels": cfg.n_levels,
        "grid": {"t_start": cfg.grid.t_start, "t_end": cfg.grid.t_end, "n_steps": cfg.grid.n_steps},
        "analysis_frame": "G" if system.frame is None else "F",
        "blocks": [[i + 1 for i in b] for b in system.blocks.blocks],
        "methods": {},
        "pairwise_max_deviation": {},
    }
    for m, traj in trajectories.items():
        _write_trajectory(out_dir / f"{m}.csv", traj, system)
        framed = traj.rotated(system.frame_matrix, "analysis")
        entry = {
            "norm2_drift": traj.norm2_drift(),
            "block_norm2_drift": audit_conserved_norms(framed, system.blocks),
        }
        if "trace" in traj.audits:
            entry["trace_drift"] = _drift(traj.audits["trace"])
            entry["purity_drift"] = _drift(traj.audits["purity"])
        summary["methods"][m] = entry
    for a, b in combinations(cfg.methods, 2):
        dev = float(np.max(np.abs(trajectories[a].states - trajectories[b].states)))
        summary["pairwise_max_deviation"][f"{a}-{b}"] = dev
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def verify(n_max, trials, seed, out=None):
    """AL/HE agreement and algebra checks on seeded random Hamiltonians.

    Returns ``(ok, rows)``.
    """
    out = sys.stdout if out is None else out
    rng = np.random.default_rng(seed)
    rows = []
    for n in range(2, n_max + 1):
        gens = build_generators(n)
        f = structure_constants(gens)
        link = max(verify_al_he_link(random_hermitian(n, rng), gens, f) for _ in range(trials))
        row = {
            "N": n,
            "al_he": link,
            "orthonormality": gens.orthonormality_residual(),
            "antisymmetry": f.antisymmetry_residual(),
            "jacobi": f.jacobi_residual(),
            "commutators": commutator_reconstruction_residual(gens, f),
        }
        if n == 2:
            worst = 0.0
            for _ in range(trials):
                om, de = rng.uniform(-5, 5, size=2)
                literal = np.array([[0, de, 0], [-de, 0, -om], [0, om, 0]])
                h = rwa_hamiltonian(om, de)
                g_he = eom_matrix_he(hamiltonian_to_torque(h, gens), f)
                worst = max(worst, np.max(np.abs(eom_matrix_al(h, gens) - literal)),
                            np.max(np.abs(g_he - literal)))
            row["rwa_literal"] = float(worst)
        rows.append(row)

    ok = True
    cols = ["N", "al_he", "orthonormality", "antisymmetry", "jacobi", "commutators", "rwa_literal"]
    print("  ".join(f"{c:>14}" for c in cols), file=out)
    for row in rows:
        cells = []
        for c in cols:
            v = row.get(c)
            cells.append(f"{'-':>14}" if v is None else f"{v:>14}" if c == "N" else f"{v:>14.3e}")
        print("  ".join(cells), file=out)
        for c in cols[1:]:
            tol = EQ20_TOL if c == "rwa_literal" else VERIFY_TOL
            if c in row and not row[c] < tol:
                ok = False
                print(f"FAIL N={row['N']} {c}={row[c]:.3e} (tolerance {tol:.0e})", file=out)
    print("PASS" if ok else "FAIL", file=out)
    return ok, rows


def _positive_int(minimum):
    def parse(s):
        v = int(s)
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be an integer >= {minimum}")
        return v
    return parse


def build_parser():
    parser = argparse.ArgumentParser(prog="sun-coherence", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="propagate a configured system")
    p_run.add_argument("config", help="TOML run configuration")
    p_ver = sub.add_parser("verify", help="check the AL/HE link on random Hamiltonians")
    p_ver.add_argument("--n-max", type=_positive_int(2), default=5)
    p_ver.add_argument("--trials", type=_positive_int(1), default=100)
    p_ver.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "verify":
        ok, _ = verify(args.n_max, args.trials, args.seed)
        return EXIT_OK if ok else EXIT_VERIFY_FAILED
    try:
        run(RunConfig.load(args.config))
    except (ConfigError, NonCommutingError) as exc:
        print(f"sun-coherence: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        print(f"sun-coherence: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except KeyError as exc:
        print(f"sun-coherence: config error: missing field {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TypeError, ValueError) as exc:
        print(f"sun-coherence: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
