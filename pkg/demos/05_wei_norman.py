"""
Wei-Norman product of exponentials
==================================

Write the 3x3 evolution matrix as exp(u1 L1) exp(u2 L2) exp(u3 L3) and
integrate the three angles instead of the matrix.
"""

import numpy as np

from sun_coherence import (
    PulseProfile,
    TimeGrid,
    adjoint_rotation_generators,
    bch_conjugate,
    integrate_wn,
    propagate_coherence_rk4,
    reconstruct_m,
    wn_propagate,
)
from sun_coherence.exceptions import SingularityError
from sun_coherence.wei_norman import w_inverse, w_matrix

np.set_printoptions(precision=4, suppress=True)
L = adjoint_rotation_generators()

# Conjugating L2 by a rotation about the first axis mixes L2 and L3.
u1 = 0.6
print("exp(u1 L1) L2 exp(-u1 L1) =\n", bch_conjugate(u1 * L[0], L[1]))
print("cos(u1) L2 + sin(u1) L3 =\n", np.cos(u1) * L[1] + np.sin(u1) * L[2])

# The angle equations W du/dt = T and their inverse.
u1, u2 = 0.7, 0.4
print("W =\n", w_matrix(u1, u2), "\ndet W =", np.linalg.det(w_matrix(u1, u2)), "cos u2 =", np.cos(u2))
print("W^-1 W =\n", w_inverse(u1, u2) @ w_matrix(u1, u2))

grid = TimeGrid(0.0, 10.0, 10_000)

# In the rotated frame of a proportional drive only u1 moves.
prop = PulseProfile("gaussian", 2.0, 0.8, "proportional", 5.0, 1.5)
params = integrate_wn(lambda t: np.array([float(prop.epsilon(t)), 0.0, 0.0]), grid)
print("final angles (F frame):", params.upsilon[-1])
print("M(t_end) =\n", reconstruct_m(params)[-1])

# A general drive with constant detuning: all three angles move.
pulse = PulseProfile("gaussian", 2.0, 0.3, "constant", 5.0, 1.5)
wn = wn_propagate([0, 0, 1], pulse.torque, grid)
rk = propagate_coherence_rk4([0, 0, 1], pulse.eom, grid)
print(f"Wei-Norman vs RK4: {np.max(np.abs(wn.states - rk.states)):.2e}, "
      f"min |cos u2| = {np.min(np.abs(wn.audits['cos_u2'])):.3f}")

# The parametrisation breaks down where cos u2 = 0.
try:
    integrate_wn(lambda t: np.array([0.0, 1.0, 0.0]), TimeGrid(0.0, 3.0, 300))
except SingularityError as exc:
    print("stopped:", exc)
