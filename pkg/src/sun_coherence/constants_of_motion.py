"""
Rotated generator frames, block structure of the equation of motion, and
conserved subspace norms.

For a two-level drive whose detuning follows the Rabi envelope,
``Omega(t) = omega0 q(t)`` and ``Delta(t) = delta0 q(t)``, the rotated
generators

    F_1 = (omega0 G_1 - delta0 G_3) / eps0
    F_2 = G_2
    F_3 = (delta0 G_1 + omega0 G_3) / eps0,     eps0 = hypot(omega0, delta0)

put the Hamiltonian on ``F_1`` alone.  The equation-of-motion matrix then
splits into a frozen 1x1 block and a 2x2 rotation at rate ``eps(t)``, so
``F_1**2`` and ``F_2**2 + F_3**2`` are separately conserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .dynamics import PulseProfile, TimeGrid, Trajectory, cumulative_integral
from .su_n_algebra import GeneratorSet, build_generators

BLOCK_ATOL = 1e-10
ORTHOGONAL_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class FrameTransform:
    """Orthogonal change of generator basis, ``v_F = matrix @ v_G``.

    ``generators[a] = sum_b matrix[a, b] G_b``.
    """

    matrix: np.ndarray
    generators: GeneratorSet

    def apply(self, v):
        return np.asarray(v) @ self.matrix.T

    def inverse_apply(self, v):
        return np.asarray(v) @ self.matrix

    def orthogonality_residual(self):
        r = self.matrix
        return float(np.max(np.abs(r @ r.T - np.eye(len(r)))))


def rotate_generators(r, gens: GeneratorSet) -> GeneratorSet:
    return GeneratorSet(gens.dim, np.einsum("ab,bij->aij", r, gens.matrices))


def build_f_frame(omega0: float, delta0: float, gens: GeneratorSet | None = None) -> FrameTransform:
    """Frame in which the two-level proportional-detuning drive lies along ``F_1``."""
    eps0 = float(np.hypot(omega0, delta0))
    if eps0 == 0.0:
        raise ValueError("F frame is undefined for zero Rabi frequency and zero detuning")
    c, s = omega0 / eps0, delta0 / eps0
    r = np.array([
        [c, 0.0, -s],
        [0.0, 1.0, 0.0],
        [s, 0.0, c],
    ])
    gens = build_generators(2) if gens is None else gens
    if gens.dim != 2:
        raise ValueError("the F frame is defined for two-level systems only")
    return FrameTransform(r, rotate_generators(r, gens))


def transform_eom(g, frame) -> np.ndarray:
    """``R g R^T``: the equation-of-motion matrix seen in the rotated frame."""
    r = frame.matrix if isinstance(frame, FrameTransform) else np.asarray(frame)
    return r @ np.asarray(g) @ r.T


def rotated_eom(eom, frame):
    """Wrap ``t -> g(t)`` so it returns the rotated-frame matrix."""
    return lambda t: transform_eom(eom(t), frame)


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple

    def __post_init__(self):
        flat = sorted(i for b in self.blocks for i in b)
        if flat != list(range(len(flat))):
            raise ValueError("blocks must partition the index range")

    def __len__(self):
        return len(self.blocks)

    def norms(self, states):
        """Per-block squared norms; ``states`` may be one vector or a (K, d) array."""
        s = np.asarray(states)
        return np.stack([np.sum(s[..., list(b)] ** 2, axis=-1) for b in self.blocks], axis=-1)


def detect_blocks(eom, grid: TimeGrid, atol=BLOCK_ATOL, n_samples=17) -> BlockDecomposition:
    """Connected components of the union sparsity pattern of ``g(t)``.

    ``eom`` may also be a constant matrix.
    """
    if callable(eom):
        times = grid.coarse_times(n_samples)
        pattern = np.zeros_like(np.asarray(eom(times[0])), dtype=bool)
        for t in times:
            pattern |= np.abs(np.asarray(eom(t))) > atol
    else:
        pattern = np.abs(np.asarray(eom)) > atol
    _, labels = connected_components(csr_matrix(pattern | pattern.T), directed=False)
    # components in order of their smallest index
    order = {}
    for i, lab in enumerate(labels):
        order.setdefault(lab, []).append(i)
    return BlockDecomposition(tuple(tuple(b) for b in order.values()))


def audit_conserved_norms(traj: Trajectory, blocks: BlockDecomposition) -> list:
    """Max drift of each block's squared norm from its initial value."""
    norms = blocks.norms(traj.states)
    return [float(x) for x in np.max(np.abs(norms - norms[0]), axis=0)]


def f_frame_ground_state(omega0, delta0):
    """Ground state ``|0><0|`` expressed in the F frame: ``(-delta0, 0, omega0) / eps0``."""
    eps0 = float(np.hypot(omega0, delta0))
    return np.array([-delta0 / eps0, 0.0, omega0 / eps0])


def rotation_angle(pulse: PulseProfile, grid: TimeGrid):
    """Accumulated angle ``int_0^t eps(t') dt'`` on the grid (Simpson)."""
    times = grid.times
    return cumulative_integral(pulse.epsilon(times), times)


def closed_form_f_solution(pulse: PulseProfile, grid: TimeGrid) -> Trajectory:
    """Analytic F-frame trajectory from the ground state for a proportional drive.

    ``F(t) = (-delta0, -omega0 sin a, omega0 cos a) / eps0`` with
    ``a = int_0^t eps``.
    """
    if pulse.detuning_mode != "proportional":
        raise ValueError("closed-form F solution requires proportional detuning")
    eps0 = pulse.peak_epsilon
    if eps0 == 0.0:
        raise ValueError("closed-form F solution is undefined for a zero drive")
    a = rotation_angle(pulse, grid)
    states = np.column_stack([
        np.full_like(a, -pulse.delta0 / eps0),
        -pulse.omega0 * np.sin(a) / eps0,
        pulse.omega0 * np.cos(a) / eps0,
    ])
    return Trajectory(grid, states, "closedform", frame="F")
