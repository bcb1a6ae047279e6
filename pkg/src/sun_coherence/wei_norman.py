"""
Wei-Norman product-of-exponentials propagator for the SU(2) adjoint dynamics.

The 3x3 super-evolution matrix ``M(t)`` (``v(t) = M(t) v(0)``) solves
``dM/dt = g(t) M`` with ``g = sum_a T_a L_a``, where ``L_a`` are the real
rotation generators about x, y, z.  Writing

    M(t) = exp(u1 L_1) exp(u2 L_2) exp(u3 L_3)

turns the matrix ODE into three scalar ODEs ``W(u1, u2) du/dt = T`` with

    W = [[1, 0,        sin u2         ],
         [0, cos u1,  -cos u2 sin u1  ],
         [0, sin u1,   cos u1 cos u2  ]],      det W = cos u2.

The parametrisation is singular where ``cos u2 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.linalg import expm

from .dynamics import TimeGrid, Trajectory, _rk4_step
from .exceptions import NumericalAbort, SingularityError

SINGULARITY_FLOOR = 1e-6
DELTA_IDENTITY_ATOL = 1e-8


def adjoint_rotation_generators() -> np.ndarray:
    """The three real SU(2) adjoint generators, stacked as (3, 3, 3)."""
    return np.array([
        [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
        [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ])


def axis_rotation(axis: int, angle: float) -> np.ndarray:
    """Closed form of ``expm(angle * L_axis)``: right-handed rotation about x, y or z."""
    c, s = np.cos(angle), np.sin(angle)
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    m = np.eye(3)
    m[i, i] = m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return m


def bch_conjugate(a, b, order: int | None = None) -> np.ndarray:
    """``exp(A) B exp(-A)``.

    With ``order=None`` the conjugation is computed with matrix exponentials;
    otherwise the nested-commutator series is summed through ``order`` terms.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if order is None:
        return expm(a) @ b @ expm(-a)
    if order < 1:
        raise ValueError("series order must be at least 1")
    total = b.copy()
    term = b
    for k in range(1, order + 1):
        term = a @ term - term @ a
        total = total + term / factorial(k)
    return total


def w_matrix(u1, u2) -> np.ndarray:
    c1, s1, c2, s2 = np.cos(u1), np.sin(u1), np.cos(u2), np.sin(u2)
    return np.array([
        [1.0, 0.0, s2],
        [0.0, c1, -c2 * s1],
        [0.0, s1, c1 * c2],
    ])


def w_inverse(u1, u2) -> np.ndarray:
    """Closed-form inverse of ``w_matrix``; requires ``cos u2 != 0``."""
    c1, s1, c2, s2 = np.cos(u1), np.sin(u1), np.cos(u2), np.sin(u2)
    t2 = s2 / c2
    return np.array([
        [1.0, s1 * t2, -c1 * t2],
        [0.0, c1, s1],
        [0.0, -s1 / c2, c1 / c2],
    ])


def wn_rhs(upsilon, torque, floor=SINGULARITY_FLOOR, t=None) -> np.ndarray:
    """Parameter rates ``du/dt = W(u1, u2)^-1 T``."""
    u1, u2, _ = upsilon
    c2 = np.cos(u2)
    if abs(c2) <= floor:
        where = "" if t is None else f" at t={t:.6g}"
        raise SingularityError(
            f"Wei-Norman parametrisation singular{where}: |cos u2| = {abs(c2):.3e} (u2 = {u2:.6g})",
            time=t,
            upsilon2=float(u2),
        )
    return w_inverse(u1, u2) @ np.asarray(torque, dtype=float)


@dataclass
class WNParameters:
    """Wei-Norman angles ``upsilon[k] = (u1, u2, u3)`` at ``grid.times[k]``."""

    grid: TimeGrid
    upsilon: np.ndarray
    rates: np.ndarray
    delta_identity_residual: float = 0.0

    @property
    def min_abs_cos_u2(self):
        return float(np.min(np.abs(np.cos(self.upsilon[:, 1]))))


def integrate_wn(torque, grid: TimeGrid, floor=SINGULARITY_FLOOR) -> WNParameters:
    """RK4 integration of the Wei-Norman angles from ``u = 0``.

    ``torque`` is a callable ``t -> (T_1, T_2, T_3)``.  Along the way the
    magnitude identity ``|T_2, T_3| = sqrt(du2**2 + du3**2 cos(u2)**2)`` is
    checked; for the RWA torque ``(Omega, 0, -Delta)`` this is ``|Delta|``.
    """
    times = grid.times
    h = grid.dt
    u = np.zeros((len(times), 3))
    state = u[0].copy()
    for k in range(grid.n_steps):
        try:
            state = _rk4_step(lambda t, y: wn_rhs(y, torque(t), floor, t), times[k], state, h)
        except SingularityError as exc:
            raise SingularityError(
                f"{exc} (while stepping from t={times[k]:.6g})", exc.time, exc.upsilon2
            ) from None
        # a sign change means the step jumped across cos u2 = 0
        if abs(np.cos(state[1])) <= floor or np.cos(state[1]) * np.cos(u[k, 1]) < 0:
            raise SingularityError(
                f"Wei-Norman parametrisation singular at t={times[k + 1]:.6g}: "
                f"|cos u2| = {abs(np.cos(state[1])):.3e}",
                time=float(times[k + 1]),
                upsilon2=float(state[1]),
            )
        u[k + 1] = state
    torques = np.array([np.asarray(torque(t), dtype=float) for t in times])
    rates = np.array([wn_rhs(uk, tk, floor, t) for uk, tk, t in zip(u, torques, times)])
    lhs = np.hypot(torques[:, 1], torques[:, 2])
    rhs = np.sqrt(rates[:, 1] ** 2 + (rates[:, 2] * np.cos(u[:, 1])) ** 2)
    residual = float(np.max(np.abs(lhs - rhs)))
    if residual > DELTA_IDENTITY_ATOL:
        raise NumericalAbort(f"Wei-Norman detuning identity violated by {residual:.3e}")
    return WNParameters(grid, u, rates, residual)


def reconstruct_m(params) -> np.ndarray:
    """``M = exp(u1 L_1) exp(u2 L_2) exp(u3 L_3)`` for every sample.

    Accepts ``WNParameters`` or a bare (K, 3) / (3,) angle array.
    """
    u = params.upsilon if isinstance(params, WNParameters) else np.asarray(params, dtype=float)
    single = u.ndim == 1
    u = np.atleast_2d(u)
    ms = np.array([
        axis_rotation(0, a) @ axis_rotation(1, b) @ axis_rotation(2, c) for a, b, c in u
    ])
    return ms[0] if single else ms


def wn_propagate(v0, torque, grid: TimeGrid, floor=SINGULARITY_FLOOR) -> Trajectory:
    params = integrate_wn(torque, grid, floor)
    states = np.einsum("kij,j->ki", reconstruct_m(params), np.asarray(v0, dtype=float))
    traj = Trajectory(grid, states, "weinorman")
    traj.audits["cos_u2"] = np.cos(params.upsilon[:, 1])
    return traj
