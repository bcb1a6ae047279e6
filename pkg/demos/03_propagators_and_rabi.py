"""
Three propagators, one answer
=============================

Propagate a driven two-level atom with the Liouville equation for the
density matrix, with RK4 on the coherence vector and, when the drive
commutes with itself at all times, with the first-order Magnus exponential.
"""

import numpy as np

from sun_coherence import (
    PulseProfile,
    TimeGrid,
    check_commuting_family,
    magnus_propagate,
    propagate_coherence_rk4,
    propagate_liouville,
)
from sun_coherence.dynamics import excited_population, ground_state_rho

grid = TimeGrid(0.0, 10.0, 10_000)

# Resonant constant drive: textbook Rabi flopping.
rabi = PulseProfile("constant", omega0=1.7, delta0=0.0)
lio = propagate_liouville(ground_state_rho(2), rabi.hamiltonian, grid)
err = np.max(np.abs(excited_population(lio) - np.sin(1.7 * grid.times / 2) ** 2))
print(f"Rabi flopping: max deviation from sin^2(Omega t / 2) = {err:.2e}")

# Gaussian pulse with constant detuning: g(t) does not commute with itself,
# so only the step-by-step integrators apply.
pulse = PulseProfile("gaussian", omega0=2.0, delta0=0.8, center=5.0, width=1.5)
print("commuting family (constant detuning):", check_commuting_family(pulse.eom, grid))
lio = propagate_liouville(ground_state_rho(2), pulse.hamiltonian, grid)
rk = propagate_coherence_rk4([0, 0, 1], pulse.eom, grid)
print(f"Liouville vs coherence RK4: {np.max(np.abs(lio.states - rk.states)):.2e}")
print(f"final coherence vector: {rk.states[-1]}, |v|^2 drift {rk.norm2_drift():.1e}")

# With the detuning following the same envelope, g(t) = q(t) g0 and the
# Magnus exponential is exact.
prop = PulseProfile("gaussian", 2.0, 0.8, "proportional", 5.0, 1.5)
print("commuting family (proportional detuning):", check_commuting_family(prop.eom, grid))
mag = magnus_propagate([0, 0, 1], prop.eom, grid)
rk = propagate_coherence_rk4([0, 0, 1], prop.eom, grid)
print(f"Magnus vs RK4: {np.max(np.abs(mag.states - rk.states)):.2e}")
