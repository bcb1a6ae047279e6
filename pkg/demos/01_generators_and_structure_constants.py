"""
Generators and structure constants of su(N)
===========================================

Build the generalised Gell-Mann generators, read off the structure
constants from commutator traces and look at the adjoint matrices.
"""

import numpy as np

from sun_coherence import adjoint_real_forms, build_generators, structure_constants
from sun_coherence.su_n_algebra import commutator_reconstruction_residual

np.set_printoptions(precision=4, suppress=True)

# For two levels the generators are the Pauli matrices, in x, y, z order.
su2 = build_generators(2)
for k, g in enumerate(su2, start=1):
    print(f"G_{k} =\n{g}")

# The structure constants of su(2) are the Levi-Civita symbol.
f2 = structure_constants(su2)
print("nonzero f_abc (0-based):", f2.nonzero())

# Larger N: the construction is generic, and the defining identities hold
# to rounding error.
for n in (3, 4, 5):
    gens = build_generators(n)
    f = structure_constants(gens)
    print(
        f"N={n}: {len(gens)} generators, "
        f"orthonormality {gens.orthonormality_residual():.1e}, "
        f"Jacobi {f.jacobi_residual():.1e}, "
        f"commutators {commutator_reconstruction_residual(gens, f):.1e}, "
        f"{len(f.entries)} independent nonzero f"
    )

f3 = structure_constants(build_generators(3))
print("su(3): f_123 =", f3[0, 1, 2], " f_147 =", f3[0, 3, 6], " f_458 =", round(f3[3, 4, 7], 6))

# Real forms of the adjoint matrices.  For su(2) these are the rotation
# generators about x, y and z.
for k, m in enumerate(adjoint_real_forms(f2), start=1):
    print(f"L_{k} =\n{m}")
