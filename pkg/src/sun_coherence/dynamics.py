"""
Time propagation of the coherence vector.

Three independent routes are provided:

* ``propagate_liouville``: RK4 on ``i drho/dt = [H, rho]`` (the oracle),
* ``propagate_coherence_rk4``: RK4 on ``dv/dt = g(t) v``,
* ``magnus_propagate``: ``v(t) = expm(int_0^t g) v0``, exact only when
  ``g(t)`` commutes with itself at different times.

Pulse envelopes ``q(t)`` are peak-normalised; the two-level RWA drive has
``Omega(t) = omega0 q(t)`` and either a constant detuning ``delta0`` or a
proportional one ``Delta(t) = delta0 q(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid
from scipy.linalg import expm

from .coherence_map import rwa_hamiltonian
from .exceptions import NonCommutingError, NonFiniteStateError, NumericalAbort, TraceDriftError
from .su_n_algebra import build_generators

HERMITIZE_ATOL = 1e-9
TRACE_DRIFT_LIMIT = 1e-6
COMMUTE_ATOL = 1e-10
COMMUTE_SAMPLES = 9

SHAPES = ("constant", "gaussian", "sech", "sin2", "custom")
DETUNING_MODES = ("constant", "proportional")


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")

    @property
    def dt(self):
        return (self.t_end - self.t_start) / self.n_steps

    @property
    def times(self):
        return np.linspace(self.t_start, self.t_end, self.n_steps + 1)

    def refined(self, factor=2):
        return TimeGrid(self.t_start, self.t_end, self.n_steps * factor)

    def coarse_times(self, n_samples=COMMUTE_SAMPLES):
        return np.linspace(self.t_start, self.t_end, max(n_samples, 2))


@dataclass(frozen=True)
class PulseProfile:
    """Two-level RWA drive.

    Parameters
    ----------
    shape : {"constant", "gaussian", "sech", "sin2", "custom"}
        Envelope family.  ``gaussian`` is ``exp(-(t-center)**2 / (2 width**2))``,
        ``sech`` is ``sech((t-center)/width)``, ``sin2`` is
        ``cos(pi (t-center) / (2 width))**2`` on ``|t-center| <= width`` and
        zero outside.  ``custom`` linearly interpolates ``samples``.
    omega0, delta0 : float
        Peak Rabi frequency and peak (or constant) detuning.
    detuning_mode : {"constant", "proportional"}
    samples : array of (t, q) pairs, only for ``custom``.
    """

    shape: str = "constant"
    omega0: float = 1.0
    delta0: float = 0.0
    detuning_mode: str = "constant"
    center: float = 0.0
    width: float = 1.0
    samples: tuple | None = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; choose from {SHAPES}")
        if self.detuning_mode not in DETUNING_MODES:
            raise ValueError(f"unknown detuning mode {self.detuning_mode!r}")
        if self.shape != "constant" and self.shape != "custom" and not self.width > 0:
            raise ValueError("pulse width must be positive")
        if self.shape == "custom":
            if self.samples is None:
                raise ValueError("custom pulse needs (t, q) samples")
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 2 or s.shape[1] != 2 or len(s) < 2:
                raise ValueError("custom samples must be a sequence of at least two (t, q) pairs")
            if np.any(np.diff(s[:, 0]) <= 0):
                raise ValueError("custom sample times must be strictly increasing")
            if s[:, 1].min() < 0 or not np.isclose(s[:, 1].max(), 1.0, rtol=0, atol=1e-12):
                raise ValueError("custom envelope must lie in [0, 1] with peak 1")
            object.__setattr__(self, "samples", tuple(map(tuple, s)))

    def envelope(self, t):
        if isinstance(t, (float, int, np.floating)) and self.shape != "custom":
            return self._scalar_envelope(float(t))
        t = np.asarray(t, dtype=float)
        if self.shape == "constant":
            return np.ones_like(t)
        if self.shape == "custom":
            s = np.asarray(self.samples)
            return np.interp(t, s[:, 0], s[:, 1])
        x = (t - self.center) / self.width
        if self.shape == "gaussian":
            return np.exp(-0.5 * x * x)
        if self.shape == "sech":
            return 1.0 / np.cosh(x)
        return np.where(np.abs(x) <= 1.0, np.cos(0.5 * np.pi * x) ** 2, 0.0)

    def _scalar_envelope(self, t):
        if self.shape == "constant":
            return 1.0
        x = (t - self.center) / self.width
        if self.shape == "gaussian":
            return math.exp(-0.5 * x * x)
        if self.shape == "sech":
            return 1.0 / math.cosh(x) if abs(x) < 700 else 0.0
        return math.cos(0.5 * math.pi * x) ** 2 if abs(x) <= 1.0 else 0.0

    def omega(self, t):
        return self.omega0 * self.envelope(t)

    def delta(self, t):
        if self.detuning_mode == "proportional":
            return self.delta0 * self.envelope(t)
        if np.ndim(t) == 0:
            return float(self.delta0)
        return self.delta0 * np.ones_like(np.asarray(t, dtype=float))

    @property
    def peak_epsilon(self):
        return float(np.hypot(self.omega0, self.delta0))

    def epsilon(self, t):
        """Generalised Rabi frequency ``sqrt(Omega**2 + Delta**2)``."""
        return np.hypot(self.omega(t), self.delta(t))

    def hamiltonian(self, t):
        return rwa_hamiltonian(float(self.omega(t)), float(self.delta(t)))

    def torque(self, t):
        """``(Omega, 0, -Delta)``."""
        return np.array([float(self.omega(t)), 0.0, -float(self.delta(t))])

    def eom(self, t):
        """Equation-of-motion matrix ``Omega L_1 - Delta L_3``."""
        om, de = float(self.omega(t)), float(self.delta(t))
        return np.array([
            [0.0, de, 0.0],
            [-de, 0.0, -om],
            [0.0, om, 0.0],
        ])


@dataclass
class Trajectory:
    """Sampled propagation result.

    ``states[k]`` is the coherence vector at ``grid.times[k]``; ``rho`` is
    only filled by the Liouville propagator.  ``audits`` holds per-step
    columns such as ``norm2``, ``trace`` and ``purity``.
    """

    grid: TimeGrid
    states: np.ndarray
    method: str = ""
    frame: str = "G"
    rho: np.ndarray | None = None
    audits: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.states) != self.grid.n_steps + 1:
            raise ValueError("trajectory must hold n_steps + 1 states")
        self.audits.setdefault("norm2", np.einsum("ka,ka->k", self.states, self.states))

    @property
    def times(self):
        return self.grid.times

    def norm2_drift(self):
        n2 = self.audits["norm2"]
        return float(np.max(np.abs(n2 - n2[0])))

    def rotated(self, r, frame):
        """Same trajectory with every state mapped through the orthogonal ``r``."""
        return Trajectory(self.grid, self.states @ np.asarray(r).T, self.method, frame)


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate_liouville(rho0, hamiltonian, grid: TimeGrid, gens=None) -> Trajectory:
    """RK4 integration of ``i drho/dt = [H(t), rho]``.

    Parameters
    ----------
    rho0 : (N, N) complex array
    hamiltonian : callable ``t -> (N, N)`` Hermitian array
    grid : TimeGrid
    gens : GeneratorSet, optional
        Basis for the reported coherence vectors; su(N) Gell-Mann by default.
    """
    rho = np.array(rho0, dtype=complex)
    n = rho.shape[0]
    gens = build_generators(n) if gens is None else gens

    def rhs(t, r):
        h = hamiltonian(t)
        return -1j * (h @ r - r @ h)

    times = grid.times
    h = grid.dt
    rhos = np.empty((len(times), n, n), dtype=complex)
    rhos[0] = rho
    tr0 = np.trace(rho).real
    for k in range(grid.n_steps):
        rho = _rk4_step(rhs, times[k], rho, h)
        herm = np.abs(rho - rho.conj().T).max()
        if not np.isfinite(herm):
            raise NonFiniteStateError(f"non-finite density matrix at step {k + 1}")
        if herm > HERMITIZE_ATOL:
            raise NumericalAbort(f"density matrix lost Hermiticity ({herm:.2e}) at step {k + 1}")
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - tr0)
        if drift > TRACE_DRIFT_LIMIT:
            raise TraceDriftError(
                f"trace drifted by {drift:.2e} at step {k + 1} (t={times[k + 1]:.6g}); reduce the step size"
            )
        rhos[k + 1] = rho
    states = np.einsum("kij,aji->ka", rhos, gens.matrices)
    residue = float(np.max(np.abs(states.imag)))
    if residue > HERMITIZE_ATOL:
        raise NumericalAbort(f"coherence vectors picked up an imaginary part {residue:.2e}")
    states = states.real
    audits = {
        "trace": np.einsum("kii->k", rhos).real,
        "purity": np.einsum("kij,kji->k", rhos, rhos).real,
    }
    return Trajectory(grid, states, "liouville", rho=rhos, audits=audits)


def propagate_coherence_rk4(v0, eom, grid: TimeGrid) -> Trajectory:
    """Classic RK4 on ``dv/dt = g(t) v`` with ``g`` sampled at the sub-step times."""
    v = np.array(v0, dtype=float)
    times = grid.times
    h = grid.dt
    states = np.empty((len(times), v.size))
    states[0] = v

    def rhs(t, y):
        return eom(t) @ y

    for k in range(grid.n_steps):
        v = _rk4_step(rhs, times[k], v, h)
        if not np.all(np.isfinite(v)):
            raise NonFiniteStateError(f"non-finite coherence vector at step {k + 1}")
        states[k + 1] = v
    return Trajectory(grid, states, "rk4")


def commutator_spread(eom, times) -> float:
    """Max of ``|[g(t_i), g(t_j)]|`` over all sampled pairs."""
    gs = [np.asarray(eom(t)) for t in times]
    worst = 0.0
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            c = gs[i] @ gs[j] - gs[j] @ gs[i]
            worst = max(worst, float(np.max(np.abs(c))))
    return worst


def check_commuting_family(eom, grid: TimeGrid, atol=COMMUTE_ATOL, n_samples=COMMUTE_SAMPLES) -> bool:
    return commutator_spread(eom, grid.coarse_times(max(n_samples, 8))) < atol


def cumulative_integral(values, times):
    """Running integral from ``times[0]`` by composite Simpson (trapezoid for two points)."""
    values = np.asarray(values)
    if len(times) < 3:
        return cumulative_trapezoid(values, times, axis=0, initial=0)
    return cumulative_simpson(values, x=times, axis=0, initial=0)


def magnus_propagate(v0, eom, grid: TimeGrid, check=True) -> Trajectory:
    """First-order Magnus solution ``v(t) = expm(int_0^t g) v0``.

    Raises ``NonCommutingError`` if ``check`` is set and ``g(t)`` does not
    commute with itself at sampled time pairs; the first-order result
    would then be wrong.
    """
    if check:
        spread = commutator_spread(eom, grid.coarse_times())
        if spread >= COMMUTE_ATOL:
            raise NonCommutingError(
                f"equation-of-motion family does not commute (max |[g(t1), g(t2)]| = {spread:.3e})"
            )
    times = grid.times
    v0 = np.asarray(v0, dtype=float)
    omega = cumulative_integral(np.array([eom(t) for t in times]), times)
    states = np.array([expm(w) @ v0 for w in omega])
    return Trajectory(grid, states, "magnus")


def ground_state_rho(n):
    rho = np.zeros((n, n), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def excited_population(traj: Trajectory):
    """Upper-level population ``(1 - v_3)/2`` of a two-level coherence trajectory."""
    return 0.5 * (1.0 - traj.states[:, 2])
