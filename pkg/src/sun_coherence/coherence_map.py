"""
Maps between operators and real coherence/torque vectors, and the
equation-of-motion matrix built two ways.

Conventions: hbar = 1 and the Liouville equation is ``i drho/dt = [H, rho]``.
With ``rho = I/N + (1/2) sum_a v_a G_a`` and
``H = c I + (1/2) sum_a T_a G_a`` the coherence vector obeys

    dv/dt = g v,

where ``g`` is real antisymmetric.  ``eom_matrix_al`` extracts ``g`` from the
commutators ``[H, G_a]``; ``eom_matrix_he`` contracts the torque vector with
the structure constants.  The two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .su_n_algebra import (
    HERMITIAN_ATOL,
    IMAG_ATOL,
    GeneratorSet,
    StructureTensor,
    is_hermitian,
)

DENSITY_EIG_ATOL = 1e-10


@dataclass(frozen=True)
class TorqueVector:
    """Coefficients of a Hamiltonian in the generator basis.

    ``H = trace_offset * I + (1/2) sum_a components[a] G_a``.
    """

    components: np.ndarray
    trace_offset: float = 0.0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def __len__(self):
        return len(self.components)


def _real_part(z, what, atol=IMAG_ATOL):
    worst = float(np.max(np.abs(np.imag(z)))) if np.size(z) else 0.0
    if worst > atol:
        raise ValueError(f"{what} has imaginary residue {worst:.3e}")
    return np.real(z).astype(float)


def _check_dim(m, gens):
    m = np.asarray(m)
    if m.shape != (gens.dim, gens.dim):
        raise ValueError(f"expected a {gens.dim}x{gens.dim} matrix, got shape {m.shape}")
    return m


def rwa_hamiltonian(omega, delta):
    """Two-level RWA Hamiltonian ``(1/2) [[0, omega], [omega, 2 delta]]``."""
    return 0.5 * np.array([[0.0, omega], [omega, 2.0 * delta]], dtype=complex)


def rho_to_coherence(rho, gens: GeneratorSet) -> np.ndarray:
    """``v_a = Tr(rho G_a)``."""
    rho = _check_dim(rho, gens)
    v = np.einsum("ij,aji->a", rho, gens.matrices)
    return _real_part(v, "coherence vector", atol=HERMITIAN_ATOL)


def coherence_to_rho(v, gens: GeneratorSet) -> np.ndarray:
    """``rho = I/N + (1/2) sum_a v_a G_a``.  Positivity is not enforced."""
    v = np.asarray(v, dtype=float)
    if v.shape != (len(gens),):
        raise ValueError(f"expected a coherence vector of length {len(gens)}, got shape {v.shape}")
    n = gens.dim
    return np.eye(n, dtype=complex) / n + 0.5 * np.einsum("a,aij->ij", v, gens.matrices)


def hamiltonian_to_torque(h, gens: GeneratorSet) -> TorqueVector:
    """``T_a = Tr(H G_a)``; ``trace_offset = Tr(H)/N``."""
    h = _check_dim(h, gens)
    if not is_hermitian(h):
        raise ValueError("Hamiltonian is not Hermitian")
    t = np.einsum("ij,aji->a", h, gens.matrices)
    return TorqueVector(
        _real_part(t, "torque vector", atol=HERMITIAN_ATOL),
        float(np.real(np.trace(h))) / gens.dim,
    )


def torque_to_hamiltonian(torque, gens: GeneratorSet) -> np.ndarray:
    offset = torque.trace_offset if isinstance(torque, TorqueVector) else 0.0
    t = np.asarray(torque, dtype=float)
    if t.shape != (len(gens),):
        raise ValueError(f"expected a torque vector of length {len(gens)}, got shape {t.shape}")
    return offset * np.eye(gens.dim, dtype=complex) + 0.5 * np.einsum("a,aij->ij", t, gens.matrices)


def eom_matrix_al(h, gens: GeneratorSet) -> np.ndarray:
    """Equation-of-motion matrix from ``[H, G_a] = i sum_b G_b g_ba``.

    Returns ``g`` with ``g[b, a] = Tr([H, G_a] G_b) / 2i`` so that
    ``dv/dt = g @ v``.
    """
    h = _check_dim(h, gens)
    if not is_hermitian(h):
        raise ValueError("Hamiltonian is not Hermitian")
    g = gens.matrices
    comm = np.einsum("ij,ajk->aik", h, g) - np.einsum("aij,jk->aik", g, h)
    m = np.einsum("aij,bji->ba", comm, g) / 2j
    return _real_part(m, "AL equation-of-motion matrix")


def eom_matrix_he(torque, f: StructureTensor) -> np.ndarray:
    """Equation-of-motion matrix ``g[b, a] = sum_c T_c f_{c a b}``."""
    t = np.asarray(torque, dtype=float)
    if t.shape != (f.dim,):
        raise ValueError(f"expected a torque vector of length {f.dim}, got shape {t.shape}")
    return np.einsum("c,cab->ba", t, f.dense)


def verify_al_he_link(h, gens: GeneratorSet, f: StructureTensor) -> float:
    """Max entrywise difference between the AL and HE equation-of-motion matrices."""
    g_al = eom_matrix_al(h, gens)
    g_he = eom_matrix_he(hamiltonian_to_torque(h, gens), f)
    return float(np.max(np.abs(g_al - g_he)))


def density_matrix_report(rho, atol=HERMITIAN_ATOL, eig_atol=DENSITY_EIG_ATOL):
    """Hermiticity, trace and positivity diagnostics for a candidate density matrix."""
    rho = np.asarray(rho)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace_err = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return {
        "hermiticity": herm,
        "trace_error": trace_err,
        "min_eigenvalue": min_eig,
        "valid": herm <= atol and trace_err <= atol and min_eig >= -eig_atol,
    }


def validate_density_matrix(rho):
    report = density_matrix_report(rho)
    if not report["valid"]:
        raise ValueError(
            "invalid density matrix: hermiticity {hermiticity:.2e}, trace error "
            "{trace_error:.2e}, min eigenvalue {min_eigenvalue:.2e}".format(**report)
        )
    return np.asarray(rho)


def random_hermitian(n, rng, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_density_matrix(n, rng, rank=None):
    rank = n if rank is None else rank
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def pure_state_norm2(n):
    """Squared coherence-vector length of any pure state, ``2(N-1)/N``."""
    return 2.0 * (n - 1) / n
