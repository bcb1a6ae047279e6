"""
Generators, structure constants and adjoint matrices of su(N).

Generators are normalised so that ``Tr(G_a G_b) = 2 delta_ab`` and
``[G_a, G_b] = 2i f_abc G_c``.  Indices are zero-based throughout, so the
physicist's ``G_1, G_2, G_3`` of SU(2) are ``gens[0], gens[1], gens[2]``.

The default ordering is the standard (interleaved) Gell-Mann ordering: for
each level ``k = 2..N`` the symmetric and antisymmetric pairs ``(j, k)`` for
``j < k`` followed by the ``k``-th diagonal matrix.  For N = 2 this is
exactly the Pauli triple (sigma_x, sigma_y, sigma_z); for N = 3 it is
lambda_1 .. lambda_8.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

HERMITIAN_ATOL = 1e-12
ORTHONORMAL_ATOL = 1e-12
IMAG_ATOL = 1e-10
JACOBI_ATOL = 1e-10

ORDERINGS = ("gell-mann", "grouped")


def commutator(a, b):
    return a @ b - b @ a


def is_hermitian(m, atol=HERMITIAN_ATOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, rtol=0, atol=atol)


def _symmetric(j, k, n):
    m = np.zeros((n, n), dtype=complex)
    m[j, k] = m[k, j] = 1.0
    return m


def _antisymmetric(j, k, n):
    m = np.zeros((n, n), dtype=complex)
    m[j, k] = -1j
    m[k, j] = 1j
    return m


def _diagonal(l, n):
    # l-th diagonal generator, l = 1..n-1
    d = np.zeros(n)
    d[:l] = 1.0
    d[l] = -l
    return np.diag(np.sqrt(2.0 / (l * (l + 1))) * d).astype(complex)


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """Ordered set of the ``N**2 - 1`` generators of su(N).

    Attributes
    ----------
    dim : int
        Hilbert-space dimension N.
    matrices : ndarray, shape (N**2 - 1, N, N)
        The generators, stacked.
    """

    dim: int
    matrices: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.matrices.setflags(write=False)

    def __len__(self):
        return self.matrices.shape[0]

    def __getitem__(self, idx):
        return self.matrices[idx]

    def __iter__(self):
        return iter(self.matrices)

    @property
    def algebra_dim(self):
        return self.matrices.shape[0]

    def gram(self):
        """Matrix of ``Tr(G_a G_b)``."""
        return np.einsum("aij,bji->ab", self.matrices, self.matrices)

    def orthonormality_residual(self):
        return float(np.max(np.abs(self.gram() - 2.0 * np.eye(len(self)))))

    def trace_residual(self):
        return float(np.max(np.abs(np.einsum("aii->a", self.matrices))))

    def hermiticity_residual(self):
        return float(np.max(np.abs(self.matrices - self.matrices.conj().transpose(0, 2, 1))))

    def validate(self, atol=ORTHONORMAL_ATOL):
        """Raise ``ValueError`` unless the set is traceless, Hermitian and trace-orthonormal."""
        n = self.dim
        if self.matrices.shape != (n * n - 1, n, n):
            raise ValueError(f"expected {n * n - 1} generators of shape {(n, n)}, got {self.matrices.shape}")
        for name, res in (
            ("hermiticity", self.hermiticity_residual()),
            ("trace", self.trace_residual()),
            ("orthonormality", self.orthonormality_residual()),
        ):
            if res > atol:
                raise ValueError(f"generator set fails {name} check (residual {res:.3e})")
        return self


def build_generators(n: int, ordering: str = "gell-mann") -> GeneratorSet:
    """Generalised Gell-Mann generators of su(n).

    Parameters
    ----------
    n : int
        Dimension, ``n >= 2``.
    ordering : {"gell-mann", "grouped"}
        ``"gell-mann"`` interleaves symmetric/antisymmetric/diagonal matrices
        level by level (lambda_1 .. lambda_8 for n = 3).  ``"grouped"`` lists
        all symmetric, then all antisymmetric, then all diagonal matrices.
        Both orderings agree for n = 2.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"su(N) needs an integer N >= 2, got {n!r}")
    n = int(n)
    if ordering == "gell-mann":
        mats = []
        for k in range(1, n):
            for j in range(k):
                mats.append(_symmetric(j, k, n))
                mats.append(_antisymmetric(j, k, n))
            mats.append(_diagonal(k, n))
    elif ordering == "grouped":
        pairs = list(combinations(range(n), 2))
        mats = [_symmetric(j, k, n) for j, k in pairs]
        mats += [_antisymmetric(j, k, n) for j, k in pairs]
        mats += [_diagonal(l, n) for l in range(1, n)]
    else:
        raise ValueError(f"unknown ordering {ordering!r}; choose from {ORDERINGS}")
    return GeneratorSet(n, np.array(mats))


@dataclass(frozen=True, eq=False)
class StructureTensor:
    """Fully antisymmetric structure constants ``f_abc``.

    Only the strictly increasing triples ``a < b < c`` are stored; every
    other entry follows from antisymmetry.
    """

    dim: int
    entries: dict = field(repr=False)

    @classmethod
    def from_dense(cls, f, atol=1e-14):
        d = f.shape[0]
        entries = {
            (a, b, c): float(f[a, b, c])
            for a, b, c in combinations(range(d), 3)
            if abs(f[a, b, c]) > atol
        }
        return cls(d, entries)

    @cached_property
    def dense(self):
        f = np.zeros((self.dim,) * 3)
        for (a, b, c), v in self.entries.items():
            for (i, j, k), s in (
                ((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
                ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1),
            ):
                f[i, j, k] = s * v
        f.setflags(write=False)
        return f

    def __getitem__(self, idx):
        return self.dense[idx]

    def nonzero(self):
        """Dict of every nonzero ``(a, b, c) -> f_abc`` including permutations."""
        f = self.dense
        return {tuple(int(i) for i in idx): float(f[idx]) for idx in zip(*np.nonzero(f))}

    def antisymmetry_residual(self):
        f = self.dense
        return float(max(
            np.max(np.abs(f + f.transpose(1, 0, 2))),
            np.max(np.abs(f + f.transpose(0, 2, 1))),
        ))

    def jacobi_residual(self):
        """Max over (a, b, c, n) of the cyclic Jacobi sum."""
        f = self.dense
        t = np.einsum("abm,mcn->abcn", f, f)
        jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.max(np.abs(jac))) if jac.size else 0.0


def structure_constants(gens: GeneratorSet, imag_atol: float = IMAG_ATOL) -> StructureTensor:
    """``f_abc = Tr([G_a, G_b] G_c) / 4i``, checked to be real."""
    g = gens.matrices
    prod = np.einsum("aij,bjk->abik", g, g)
    comm = prod - prod.transpose(1, 0, 2, 3)
    f = np.einsum("abij,cji->abc", comm, g) / 4j
    worst = float(np.max(np.abs(f.imag)))
    if worst > imag_atol:
        raise ValueError(f"structure constants have imaginary part {worst:.3e}; malformed generator set")
    return StructureTensor.from_dense(f.real)


def commutator_reconstruction_residual(gens: GeneratorSet, f: StructureTensor) -> float:
    """Max entrywise ``|[G_a, G_b] - 2i sum_c f_abc G_c|`` over all pairs."""
    g = gens.matrices
    prod = np.einsum("aij,bjk->abik", g, g)
    comm = prod - prod.transpose(1, 0, 2, 3)
    rebuilt = 2j * np.einsum("abc,cij->abij", f.dense, g)
    return float(np.max(np.abs(comm - rebuilt)))


def adjoint_rep(f: StructureTensor, alpha: int) -> np.ndarray:
    """Adjoint matrix ``(F_alpha)_{bc} = -i f_{alpha b c}`` (purely imaginary)."""
    if not 0 <= alpha < f.dim:
        raise IndexError(f"generator index {alpha} out of range 0..{f.dim - 1}")
    return -1j * f.dense[alpha]


def adjoint_real_forms(f: StructureTensor) -> np.ndarray:
    """Real antisymmetric matrices ``L_a = -f_a`` with ``adjoint_rep(f, a) = i L_a``.

    These obey ``[L_a, L_b] = sum_c f_abc L_c``, and the equation-of-motion
    matrix for a torque vector ``T`` is ``sum_a T_a L_a``.  For SU(2) they
    are the familiar rotation generators about x, y and z.
    """
    return -np.array(f.dense)
