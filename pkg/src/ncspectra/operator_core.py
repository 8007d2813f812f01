"""Dense complex linear algebra used by every truncated operator in the package.

All matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Nothing here mutates its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import math

import numpy as np

__all__ = [
    "BudgetExceeded",
    "CliffordFamily",
    "MAX_DIM",
    "as_matrix",
    "check_dim",
    "clifford_generators",
    "commutator",
    "hermitian_eigenvalues",
    "is_hermitian",
    "kron",
    "operator_norm",
    "pauli",
]

#: Largest square matrix any constructor is allowed to build.
MAX_DIM = 4096


class BudgetExceeded(ValueError):
    """Raised when a construction would exceed the configured size budget."""


def check_dim(n: int, what: str = "matrix", limit: int | None = None) -> None:
    limit = MAX_DIM if limit is None else limit
    if n > limit:
        raise BudgetExceeded(f"{what} of size {n} exceeds budget {limit}")


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def commutator(a, b) -> np.ndarray:
    """Return ``AB - BA``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def operator_norm(a) -> float:
    """Largest singular value.

    Exactly Hermitian or skew-Hermitian input (commutators of self-adjoint
    operators) goes through the cheaper symmetric eigensolver.
    """
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    if a.shape[0] == a.shape[1] and a.shape[0] > 64:
        ah = a.conj().T
        tol = 1e-14 * np.abs(a).max()
        for sign, rot in ((1, 1), (-1, 1j)):
            if np.abs(a - sign * ah).max() <= tol:
                # symmetrising moves singular values by at most tol * n
                h = rot * (a + sign * ah) / 2
                return float(np.abs(np.linalg.eigvalsh(h)[[0, -1]]).max())
        # sqrt of the top eigenvalue of A*A; the largest one keeps full relative accuracy
        return float(math.sqrt(max(np.linalg.eigvalsh(ah @ a)[-1], 0.0)))
    return float(np.linalg.norm(a, 2))


def is_hermitian(a, tol: float = 1e-10) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    scale = 1.0 + (np.abs(a).max() if a.size else 0.0)
    return bool(np.abs(a - a.conj().T).max(initial=0.0) <= tol * scale)


def hermitian_eigenvalues(a, tol: float = 1e-10) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix.

    Raises:
        ValueError: if ``a`` is not Hermitian within ``tol`` (relative to its
            largest entry).
    """
    a = as_matrix(a)
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian")
    # LAPACK heevd is deterministic for a given input and build
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))


def pauli() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    s3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return s1, s2, s3


@dataclass(frozen=True)
class CliffordFamily:
    """Hermitian unitaries ``eps_1..eps_p`` with ``eps_a eps_b + eps_b eps_a = 2 delta_ab``."""

    p: int
    generators: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    def anticommutator_defect(self) -> float:
        """Max entry of ``eps_a eps_b + eps_b eps_a - 2 delta_ab I`` over all pairs."""
        eye = np.eye(self.dim)
        worst = 0.0
        for a, ea in enumerate(self.generators):
            for b, eb in enumerate(self.generators):
                target = 2.0 * eye if a == b else 0.0
                worst = max(worst, float(np.abs(ea @ eb + eb @ ea - target).max()))
        return worst


@lru_cache(maxsize=None)
def _odd_family(p: int) -> tuple[np.ndarray, ...]:
    # p = 2k + 1 generators of size 2^k, built by tensoring with Pauli matrices
    if p == 1:
        return (np.ones((1, 1), dtype=np.complex128),)
    s1, s2, s3 = pauli()
    prev = _odd_family(p - 2)
    eye = np.eye(prev[0].shape[0], dtype=np.complex128)
    gens = [np.kron(s1, g) for g in prev] + [np.kron(s2, eye), np.kron(s3, eye)]
    for g in gens:
        g.setflags(write=False)
    return tuple(gens)


def clifford_generators(p: int) -> CliffordFamily:
    """Clifford generators of size ``2**(p // 2)``.

    Odd ranks are built recursively from rank ``p - 2``; an even rank takes the
    first ``p`` generators of rank ``p + 1``. For ``p = 2`` and ``p = 3`` this
    gives the Pauli matrices.
    """
    if p < 1:
        raise ValueError("Clifford rank must be >= 1")
    if p % 2:
        gens = _odd_family(p)
    else:
        gens = _odd_family(p + 1)[:p]
    return CliffordFamily(p=p, generators=tuple(gens))
