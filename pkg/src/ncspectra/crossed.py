"""Truncated covariant representations and the crossed Dirac operator.

The Hilbert space ``H (x) l2({0..N})`` is ordered with the ``l2`` block index
as the slow coordinate, so block ``n`` is the slice ``n*d : (n+1)*d``. In this
ordering ``W = S (x) I`` and ``pi_hat = diag(blocks)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import block_diag

from . import gasket, rational as rat, rotation, torus, uhf
from .operator_core import as_matrix, check_dim, clifford_generators, commutator, is_hermitian, operator_norm

__all__ = [
    "CovarianceReport",
    "CovariantTruncation",
    "CrossedNorms",
    "LipProbe",
    "ModelSample",
    "build_pi_hat",
    "check_covariance",
    "crossed_dirac",
    "crossed_norms",
    "gasket_sample",
    "interior_projection",
    "lip_probe",
    "rotation_sample",
    "shift_isometry",
    "torus_sample",
    "uhf_sample",
]


def shift_isometry(N: int, base_dim: int) -> np.ndarray:
    """``(W xi)(0) = 0``, ``(W xi)(n) = xi(n-1)``; block ``N`` of the input is dropped."""
    if N < 1:
        raise ValueError("N must be >= 1")
    check_dim((N + 1) * base_dim, "shift isometry")
    S = np.eye(N + 1, k=-1, dtype=np.complex128)
    return np.kron(S, np.eye(base_dim, dtype=np.complex128))


def build_pi_hat(blocks: Sequence[np.ndarray]) -> np.ndarray:
    if not blocks:
        raise ValueError("need at least one block")
    blocks = [as_matrix(b) for b in blocks]
    d = blocks[0].shape
    if any(b.shape != d or d[0] != d[1] for b in blocks):
        raise ValueError("blocks must be square and of one size")
    check_dim(len(blocks) * d[0], "pi_hat")
    return block_diag(*blocks).astype(np.complex128)


def interior_projection(N: int, base_dim: int) -> np.ndarray:
    """Projection onto block coordinates ``1..N-1``."""
    p = np.zeros(N + 1)
    p[1:N] = 1.0
    return np.kron(np.diag(p), np.eye(base_dim))


@dataclass
class CovariantTruncation:
    """``blocks[n] = pi(alpha^-n(a))`` for ``n = 0..N`` together with the shift ``W``."""

    blocks: list[np.ndarray]
    N: int = field(init=False)
    base_dim: int = field(init=False)
    shift: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.blocks = [as_matrix(b) for b in self.blocks]
        self.N = len(self.blocks) - 1
        self.base_dim = self.blocks[0].shape[0]
        if self.N < 1:
            raise ValueError("need at least two blocks")
        if any(b.shape != (self.base_dim, self.base_dim) for b in self.blocks):
            raise ValueError("blocks must be square and of one size")
        self.shift = shift_isometry(self.N, self.base_dim)

    @property
    def pi_hat(self) -> np.ndarray:
        return build_pi_hat(self.blocks)


@dataclass(frozen=True)
class CovarianceReport:
    defect: float
    commutant_defect: float

    def passed(self, tol: float = 1e-10) -> bool:
        return self.defect < tol and self.commutant_defect < tol


def check_covariance(T: CovariantTruncation, blocks_alpha: Sequence[np.ndarray]) -> CovarianceReport:
    """Interior defect of ``pi(alpha(a)) W = W pi(a)`` and of ``[W^k W*^k, pi(a)] = 0``."""
    if len(blocks_alpha) != T.N + 1:
        raise ValueError("blocks_alpha must have N + 1 entries")
    P = interior_projection(T.N, T.base_dim)
    W = T.shift
    A, Aa = T.pi_hat, build_pi_hat(blocks_alpha)
    defect = operator_norm(P @ (Aa @ W - W @ A) @ P)
    comm = 0.0
    Wk = np.eye(W.shape[0], dtype=np.complex128)
    for _ in range(1, T.N + 1):
        Wk = Wk @ W
        comm = max(comm, operator_norm(P @ commutator(Wk @ Wk.conj().T, A) @ P))
    return CovarianceReport(defect, comm)


def _check_grading(D: np.ndarray, gamma: np.ndarray, tol: float = 1e-10) -> None:
    eye = np.eye(D.shape[0])
    if gamma.shape != D.shape:
        raise ValueError("grading and D differ in size")
    if np.abs(gamma @ gamma - eye).max() > tol or not is_hermitian(gamma, tol):
        raise ValueError("grading must be a self-adjoint involution")
    if np.abs(gamma @ D + D @ gamma).max() > tol * (1 + np.abs(D).max()):
        raise ValueError("grading does not anticommute with D")


def crossed_dirac(D, N: int, parity: str = "odd", gamma=None) -> np.ndarray:
    """``D (x) I + Gamma (x) D_N`` (even) or ``D (x) I (x) eps1 + I (x) D_N (x) eps2`` (odd).

    ``D_N = diag(0..N)``; factors are laid out with the block index first.
    """
    D = as_matrix(D)
    if not is_hermitian(D):
        raise ValueError("D must be Hermitian")
    d = D.shape[0]
    DN = np.diag(np.arange(N + 1, dtype=np.float64))
    IN = np.eye(N + 1)
    if parity == "even":
        if gamma is None:
            raise ValueError("even parity needs a grading")
        gamma = as_matrix(gamma)
        _check_grading(D, gamma)
        check_dim((N + 1) * d, "crossed Dirac")
        return np.kron(IN, D) + np.kron(DN, gamma)
    if parity != "odd":
        raise ValueError("parity must be 'even' or 'odd'")
    check_dim(2 * (N + 1) * d, "crossed Dirac")
    e1, e2 = clifford_generators(2).generators
    return np.kron(np.kron(IN, D), e1) + np.kron(np.kron(DN, np.eye(d)), e2)


@dataclass(frozen=True)
class CrossedNorms:
    shift_commutator: float
    pi_commutator: float
    block_max: float
    block_norms: list[float]


def crossed_norms(T: CovariantTruncation, D, parity: str = "odd", gamma=None) -> CrossedNorms:
    """``||[Gamma (x) D_N, W]||``, ``||[D (x) I, pi_hat]||`` and the blockwise maximum."""
    D = as_matrix(D)
    d, N = T.base_dim, T.N
    DN = np.diag(np.arange(N + 1, dtype=np.float64))
    if parity == "even":
        gamma = as_matrix(gamma)
        _check_grading(D, gamma)
        grad, W, A, Dx = np.kron(DN, gamma), T.shift, T.pi_hat, np.kron(np.eye(N + 1), D)
    else:
        # [X (x) e, Y (x) I] = [X, Y] (x) e and a Clifford unitary e preserves norms
        grad, W, A, Dx = np.kron(DN, np.eye(d)), T.shift, T.pi_hat, np.kron(np.eye(N + 1), D)
    norms = [operator_norm(commutator(D, b)) for b in T.blocks]
    return CrossedNorms(operator_norm(commutator(grad, W)), operator_norm(commutator(Dx, A)), max(norms), norms)


@dataclass(frozen=True)
class LipProbe:
    model: str
    element: str
    norms: list[float]
    envelope: list[float] | None
    rtol: float = 1e-9

    @property
    def horizon(self) -> int:
        return len(self.norms) - 1

    @property
    def sup(self) -> float:
        return max(self.norms)

    @property
    def bounded(self) -> bool | None:
        if self.envelope is None:
            return None
        return all(v <= e * (1 + self.rtol) + 1e-300 for v, e in zip(self.norms, self.envelope))

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "element": self.element,
            "horizon": self.horizon,
            "norms": list(self.norms),
            "sup": self.sup,
            "envelope": None if self.envelope is None else list(self.envelope),
            "bounded": self.bounded,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def lip_probe(
    norms_fn: Callable[[int], float],
    N: int,
    envelope_fn: Callable[[int], float] | None = None,
    model: str = "",
    element: str = "",
) -> LipProbe:
    """``||[D, alpha^-n(a)]||`` for ``n = 0..N`` against an optional envelope."""
    if N < 1:
        raise ValueError("horizon must be >= 1")
    norms = [float(norms_fn(n)) for n in range(N + 1)]
    env = None if envelope_fn is None else [float(envelope_fn(n)) for n in range(N + 1)]
    return LipProbe(model, element, norms, env)


# sample covariant truncations, one per model


@dataclass
class ModelSample:
    name: str
    truncation: CovariantTruncation
    blocks_alpha: list[np.ndarray]
    D: np.ndarray | None = None


def torus_sample(B, k: Sequence[int], N: int, points: int = 24, seed: int = 0) -> ModelSample:
    """Mode ``e_k`` represented by point evaluation at random points of ``R^p``."""
    cov = B if isinstance(B, torus.CoveringMatrix) else torus.CoveringMatrix.from_rows(B)
    t = np.random.default_rng(seed).uniform(0, 4, size=(points, cov.p))
    Bt = rat.transpose(rat.to_rat_matrix(cov.B))

    def ev(freq) -> np.ndarray:
        f = np.array([float(x) for x in freq])
        return np.diag(np.exp(2j * np.pi * (t @ f)))

    k = tuple(Fraction(x) for x in k)
    ak = rat.matvec(Bt, k)  # alpha(e_k) = e_k o B has frequency B^T k
    blocks = [ev(rat.matvec(cov.A_power(n), k)) for n in range(N + 1)]
    alpha = [ev(rat.matvec(cov.A_power(n), ak)) for n in range(N + 1)]
    return ModelSample("torus", CovariantTruncation(blocks), alpha)


def rotation_sample(p_theta: int, q: int, B, m: int, n: int, N: int, points: int = 6, seed: int = 0) -> ModelSample:
    """Matrix-valued field ``t -> e((m t1 + n t2)/q) U0^m V0^n`` evaluated at points, pulled back by ``B``."""
    params = rotation.build_generators(p_theta, q)
    rotation._det_gate(B, q)
    Bf = np.array(B, dtype=np.float64)
    Binv = np.linalg.inv(Bf)
    mono = rotation.Monomial(m, n).matrix(params)
    t = np.random.default_rng(seed).uniform(0, 1, size=(points, 2))

    def field_at(s: np.ndarray) -> np.ndarray:
        return block_diag(*[np.exp(2j * np.pi * (m * x[0] + n * x[1]) / q) * mono for x in s])

    pulled = [t @ np.linalg.matrix_power(Binv, j).T for j in range(N + 1)]
    blocks = [field_at(s) for s in pulled]
    alpha = [field_at(s @ Bf.T) for s in pulled]  # (alpha f)(s) = f(B s)
    return ModelSample("rotation", CovariantTruncation(blocks), alpha)


def uhf_sample(r: int = 2, s: float = 1.0, K: int = 2, L: int = 1, N: int = 2, position: int = 0) -> ModelSample:
    """``e_11`` at ``position``; ``alpha`` shifts one position to the right."""
    params = uhf.UHFParams(r, s, K, L)
    a = uhf.WindowElement(position, uhf.matrix_unit(r, 0, 0), r)
    aa = uhf.shift_element(a, -1)
    blocks = [uhf.left_mult(params, uhf.shift_element(a, j, params)) for j in range(N + 1)]
    alpha = [uhf.left_mult(params, uhf.shift_element(aa, j, params)) for j in range(N + 1)]
    return ModelSample("uhf", CovariantTruncation(blocks), alpha, uhf.window_dirac(params))


def gasket_sample(N: int = 4, M: int | None = None, axis: int = 0, vertex_depth: int = 0) -> ModelSample:
    """Coordinate function on the vertices of ``K_M``.

    ``alpha^-n f = f o w0^n`` lives on ``K_n`` and acts on ``x in K_M`` through
    ``p_(n+1) o ... o p_M``; ``alpha f = f o phi``.
    """
    M = N if M is None else M
    if M < N:
        raise ValueError("need M >= N")
    E = gasket.enumerate_edges(M, vertex_depth)
    x = np.unique(np.concatenate([E.src_exact, E.dst_exact]), axis=0)
    x = np.stack([x[:, 0] / 2.0 ** (vertex_depth + 1), x[:, 1] * math.sqrt(3) / 2.0 ** (vertex_depth + 1)], axis=1)
    f = gasket.GasketFunction.coordinate(axis)
    blocks, alpha = [], []
    for n in range(N + 1):
        y = gasket.w0_power(gasket.p_chain(x, n, M), n)
        blocks.append(np.diag(f(y)).astype(np.complex128))
        alpha.append(np.diag(f(gasket.covering_phi(y))).astype(np.complex128))
    return ModelSample("gasket", CovariantTruncation(blocks), alpha)
