"""
Two routes to the same equation of motion
=========================================

The equation-of-motion matrix ``g`` in ``dv/dt = g v`` can be read off the
commutators ``[H, G_a]`` (the Alhassid-Levine route) or by contracting the
torque vector ``T_a = Tr(H G_a)`` with the structure constants (the
Hioe-Eberly route).  Here we check they agree.
"""

import numpy as np

from sun_coherence import (
    build_generators,
    eom_matrix_al,
    eom_matrix_he,
    hamiltonian_to_torque,
    rwa_hamiltonian,
    structure_constants,
    verify_al_he_link,
)
from sun_coherence.coherence_map import random_hermitian

np.set_printoptions(precision=4, suppress=True)

gens = build_generators(2)
f = structure_constants(gens)

omega, delta = 1.2, 0.5
h = rwa_hamiltonian(omega, delta)
torque = hamiltonian_to_torque(h, gens)
print("torque:", torque.components, "identity part:", torque.trace_offset)
print("g from commutators:\n", eom_matrix_al(h, gens))
print("g from torque x f:\n", eom_matrix_he(torque, f))

# Random Hermitian Hamiltonians for N = 2..5.
rng = np.random.default_rng(1)
for n in range(2, 6):
    gens_n = build_generators(n)
    f_n = structure_constants(gens_n)
    worst = max(verify_al_he_link(random_hermitian(n, rng), gens_n, f_n) for _ in range(100))
    print(f"N={n}: max |g_AL - g_HE| over 100 random H = {worst:.2e}")
