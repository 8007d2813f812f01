"""Rational rotation algebra ``A_theta`` with ``theta = p/q``.

Elements are finite sums of monomials ``U^m V^n``. Phases are roots of unity
``e(x) = exp(2 pi i x)`` with ``x`` tracked as an exact ``Fraction`` mod 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import rational as rat
from .operator_core import clifford_generators, operator_norm

__all__ = [
    "EndoFrequency",
    "Monomial",
    "NCMonomialSum",
    "RotationParams",
    "build_generators",
    "cocycle_sign",
    "endo_frequency",
    "monomial_commutator_norm",
    "phase",
    "regular_rep_commutator_norm",
    "rotation_lip_sequence",
    "twisted_product",
]

TWO_PI = 2.0 * math.pi


def phase(x: Fraction) -> complex:
    """``exp(2 pi i x)``, exact at multiples of 1/4."""
    x = Fraction(x) % 1
    exact = {Fraction(0): 1, Fraction(1, 4): 1j, Fraction(1, 2): -1, Fraction(3, 4): -1j}
    if x in exact:
        return complex(exact[x])
    return cmath.exp(2j * math.pi * float(x))


@dataclass(frozen=True)
class RotationParams:
    p_theta: int
    q: int
    U0: np.ndarray
    V0: np.ndarray
    sigma: int

    @property
    def theta(self) -> Fraction:
        return Fraction(self.p_theta, self.q)

    @property
    def lam(self) -> complex:
        return phase(self.theta)


def _check_coprime(p_theta: int, q: int) -> None:
    if q < 1:
        raise ValueError("q must be >= 1")
    if math.gcd(p_theta, q) != 1:
        raise ValueError(f"p_theta={p_theta} and q={q} are not coprime")


def build_generators(p_theta: int, q: int) -> RotationParams:
    """``U0 = diag(e((k-1) theta))`` and the cyclic shift ``V0`` in ``M_q``.

    The commutation sign ``sigma`` in ``V0 U0 = lambda^sigma U0 V0`` is read off
    by direct multiplication; for ``q <= 2`` both signs agree and ``+1`` is kept.
    """
    _check_coprime(p_theta, q)
    theta = Fraction(p_theta, q)
    U0 = np.diag([phase(k * theta) for k in range(q)]).astype(np.complex128)
    V0 = np.zeros((q, q), dtype=np.complex128)
    for h in range(q - 1):
        V0[h, h + 1] = 1.0
    V0[q - 1, 0] = 1.0
    lam = phase(theta)
    lhs = V0 @ U0
    sigma = None
    for s in (1, -1):
        if np.abs(lhs - lam**s * (U0 @ V0)).max() < 1e-12:
            sigma = s
            break
    if sigma is None:  # pragma: no cover - would mean the construction is wrong
        raise RuntimeError("generators do not satisfy a commutation relation")
    return RotationParams(p_theta, q, U0, V0, sigma)


@lru_cache(maxsize=None)
def cocycle_sign() -> int:
    """Sign ``s`` in ``V U = e(s theta) U V`` calibrated on ``theta = 1/5``."""
    return build_generators(1, 5).sigma


@dataclass(frozen=True)
class Monomial:
    """``e(ph) U^m V^n`` with ``ph`` an exact fraction mod 1."""

    m: int
    n: int
    ph: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "ph", Fraction(self.ph) % 1)

    def times(self, other: "Monomial", theta: Fraction) -> "Monomial":
        # V^n U^m' = e(s n m' theta) U^m' V^n
        c = cocycle_sign() * self.n * other.m * Fraction(theta)
        return Monomial(self.m + other.m, self.n + other.n, self.ph + other.ph + c)

    def matrix(self, params: RotationParams) -> np.ndarray:
        U = np.linalg.matrix_power(params.U0, self.m % params.q)
        V = np.linalg.matrix_power(params.V0, self.n % params.q)
        return phase(self.ph) * (U @ V)


@dataclass(frozen=True)
class NCMonomialSum:
    """``sum c_mn U^m V^n`` over finitely many frequencies."""

    coeffs: Mapping[tuple[int, int], complex]
    theta: Fraction

    def __post_init__(self):
        clean = {}
        for (m, n), c in self.coeffs.items():
            c = complex(c)
            if c != 0:
                clean[(int(m), int(n))] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "theta", Fraction(self.theta))

    @classmethod
    def monomial(cls, m: int, n: int, theta, coeff: complex = 1.0) -> "NCMonomialSum":
        return cls({(m, n): coeff}, theta)

    @classmethod
    def one(cls, theta) -> "NCMonomialSum":
        return cls({(0, 0): 1.0}, theta)

    @property
    def max_frequency(self) -> int:
        return max((max(abs(m), abs(n)) for m, n in self.coeffs), default=0)

    def __add__(self, other: "NCMonomialSum") -> "NCMonomialSum":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return NCMonomialSum(out, self.theta)

    def __mul__(self, other: "NCMonomialSum") -> "NCMonomialSum":
        return twisted_product(self, other)

    def matrix(self, params: RotationParams) -> np.ndarray:
        out = np.zeros((params.q, params.q), dtype=np.complex128)
        for (m, n), c in self.coeffs.items():
            out += c * Monomial(m, n).matrix(params)
        return out


def twisted_product(x: NCMonomialSum, y: NCMonomialSum) -> NCMonomialSum:
    """Bilinear extension of ``U^m V^n . U^m' V^n' = lambda^(s n m') U^(m+m') V^(n+n')``."""
    if x.theta != y.theta:
        raise ValueError("factors have different theta")
    out: dict[tuple[int, int], complex] = {}
    for (m, n), c in x.coeffs.items():
        for (m2, n2), d in y.coeffs.items():
            prod = Monomial(m, n).times(Monomial(m2, n2), x.theta)
            key = (prod.m, prod.n)
            out[key] = out.get(key, 0) + c * d * phase(prod.ph)
    return NCMonomialSum(out, x.theta)


def monomial_commutator_norm(m: int, n: int) -> float:
    """``||[D0, U^m V^n]|| = 2 pi |(m, n)|``."""
    return TWO_PI * math.hypot(m, n)


def regular_rep_commutator_norm(x: NCMonomialSum, K: int) -> float:
    """``||[D0, L_x]||`` on monomials ``|a|, |b| <= K``, compressed to the interior.

    ``D0`` acts on ``C^2 (x) span{U^a V^b}`` as ``2 pi (a eps1 + b eps2)``;
    columns are restricted to ``|a|, |b| <= K - max_frequency(x)`` so that the
    image never leaves the truncation.
    """
    F = x.max_frequency
    if 2 * F > K:
        raise ValueError(f"cutoff K={K} too small for frequencies up to {F}")
    if not x.coeffs:
        return 0.0
    e1, e2 = clifford_generators(2).generators
    side = 2 * K + 1

    def idx(a, b):
        return (a + K) * side + (b + K)

    rows, cols, vals = [], [], []
    inner = K - F
    col_of = {}
    for a in range(-inner, inner + 1):
        for b in range(-inner, inner + 1):
            col_of[(a, b)] = len(col_of)
    s = cocycle_sign()
    for (a, b), j in col_of.items():
        for (m, n), c in x.coeffs.items():
            amp = c * phase(s * n * a * x.theta)
            block = TWO_PI * amp * (m * e1 + n * e2)
            i = idx(a + m, b + n)
            for u in range(2):
                for v in range(2):
                    if block[u, v] != 0:
                        rows.append(2 * i + u)
                        cols.append(2 * j + v)
                        vals.append(block[u, v])
    C = sp.csr_matrix((vals, (rows, cols)), shape=(2 * side * side, 2 * len(col_of)))
    if C.nnz == 0:
        return 0.0
    if min(C.shape) <= 64:
        return operator_norm(C.toarray())
    G = (C.conj().T @ C).tocsc()
    top = spla.eigsh(G, k=1, which="LA", return_eigenvectors=False, tol=1e-12)
    return float(math.sqrt(max(top[0].real, 0.0)))


@dataclass(frozen=True)
class EndoFrequency:
    """``A^steps (m, n)``; ``expanding`` says whether the Lip bound theorem applies."""

    freq: rat.RatVec
    norm: float
    expanding: bool


def _det_gate(B, q: int) -> tuple[rat.RatMat, int]:
    Bq = rat.to_rat_matrix(B)
    if len(Bq) != 2:
        raise ValueError("B must be 2x2")
    if any(x.denominator != 1 for row in Bq for x in row):
        raise ValueError("B must have integer entries")
    _, det = rat.inverse_and_det(Bq)
    det = int(det)
    if (det - 1) % q:
        raise ValueError(f"det B = {det} is not congruent to 1 mod {q}")
    return Bq, det


def endo_frequency(B, m: int, n: int, steps: int, q: int) -> EndoFrequency:
    """Frequency transport ``(m, n) -> A^steps (m, n)`` with ``A = (B^T)^-1``."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    Bq, _ = _det_gate(B, q)
    A = rat.transpose(rat.inverse_and_det(Bq)[0])
    f = rat.matvec(rat.matpow(A, steps), (m, n))
    eig = np.abs(np.linalg.eigvals(rat.to_float(Bq)))
    return EndoFrequency(f, TWO_PI * math.sqrt(rat.sqnorm(f)), bool(np.all(eig > 1 + 1e-6)))


def rotation_lip_sequence(B, m: int, n: int, steps: int, q: int) -> tuple[list[float], list[float]]:
    """``2 pi |A^s (m, n)|`` for ``s = 0..steps`` and the envelope ``||B^-s|| 2 pi |(m, n)|``."""
    Bq, _ = _det_gate(B, q)
    Binv = rat.inverse_and_det(Bq)[0]
    norms, env = [], []
    base = monomial_commutator_norm(m, n)
    for s in range(steps + 1):
        norms.append(endo_frequency(B, m, n, s, q).norm)
        env.append(operator_norm(rat.to_float(rat.matpow(Binv, s))) * base)
    return norms, env
