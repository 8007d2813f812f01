"""Self-coverings of the p-torus ``t -> Bt`` and their Dirac data.

Functions on the level-``n`` cover ``R^p / B^n Z^p`` are finite Fourier sums
whose frequencies lie in ``A^n Z^p`` with ``A = (B^T)^-1``. Frequencies are
kept as exact ``Fraction`` vectors so pullbacks compose without rounding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import rational as rat
from .operator_core import BudgetExceeded, clifford_generators, operator_norm
from .spectral import MAX_PAIRS, WeightedSpectrum

__all__ = [
    "CoveringMatrix",
    "GridNorm",
    "LipCheck",
    "SectionMap",
    "TorusElement",
    "clifford_symbol_norm",
    "endo_forward",
    "endo_pullback",
    "grid_commutator_norm",
    "lip_inequality_check",
    "mode_commutator_norm",
    "section_map",
    "solenoid_spectrum",
    "torus_spectrum",
]

TWO_PI = 2.0 * math.pi
GRID_BUDGET = 1 << 22


@dataclass(frozen=True)
class CoveringMatrix:
    """Integer matrix ``B`` with ``A = (B^T)^-1`` and ``r = |det B|``."""

    B: tuple[tuple[int, ...], ...]
    A: rat.RatMat = field(repr=False)
    r: int

    @classmethod
    def from_rows(cls, rows, require_expanding: bool = True) -> "CoveringMatrix":
        B = tuple(tuple(int(x) for x in row) for row in (rows.tolist() if hasattr(rows, "tolist") else rows))
        Bq = rat.to_rat_matrix(B)
        try:
            Binv, det = rat.inverse_and_det(Bq)
        except ZeroDivisionError:
            raise ValueError("B is singular") from None
        if det.denominator != 1:
            raise ValueError("B must have integer entries")
        r = abs(int(det))
        if require_expanding:
            if r < 2:
                raise ValueError(f"|det B| = {r}; a proper covering needs r >= 2")
            eig = np.abs(np.linalg.eigvals(np.array(B, dtype=float)))
            if np.any(eig <= 1 + 1e-6):
                raise ValueError(f"B is not purely expanding (|eigenvalues| = {eig.tolist()})")
        return cls(B=B, A=rat.transpose(Binv), r=r)

    @property
    def p(self) -> int:
        return len(self.B)

    def A_power(self, n: int) -> rat.RatMat:
        return _cached_pow(self.A, n)

    def inverse_power_norm(self, n: int) -> float:
        """``||B^-n||``, equal to ``||A^n||`` since the spectral norm is transpose invariant."""
        return operator_norm(rat.to_float(rat.transpose(self.A_power(n))))


@lru_cache(maxsize=512)
def _cached_pow(A: rat.RatMat, n: int) -> rat.RatMat:
    return rat.matpow(A, n)


@dataclass(frozen=True)
class TorusElement:
    """Finite Fourier sum ``sum_k c_k exp(2 pi i k.t)`` on the level-``level`` cover."""

    level: int
    coeffs: Mapping[rat.RatVec, complex]

    def __post_init__(self):
        clean = {}
        dims = set()
        for k, c in self.coeffs.items():
            k = tuple(Fraction(x) for x in k)
            dims.add(len(k))
            if self.level == 0 and any(x.denominator != 1 for x in k):
                raise ValueError("level-0 elements need integer frequencies")
            c = complex(c)
            if c != 0:
                clean[k] = clean.get(k, 0) + c
        if len(dims) > 1:
            raise ValueError("mixed frequency dimensions")
        object.__setattr__(self, "coeffs", {k: c for k, c in clean.items() if c != 0})

    @classmethod
    def mode(cls, k: Sequence, coeff: complex = 1.0, level: int = 0) -> "TorusElement":
        return cls(level, {tuple(Fraction(x) for x in k): coeff})

    @property
    def is_single_mode(self) -> bool:
        return len(self.coeffs) == 1

    @property
    def p(self) -> int:
        return len(next(iter(self.coeffs))) if self.coeffs else 0


def torus_spectrum(p: int, K: int) -> WeightedSpectrum:
    """``|D_0|`` on Fourier modes ``|k|_inf <= K``: values ``2 pi |k|``, weight ``2**(p // 2)``."""
    if K < 1 or p < 1:
        raise ValueError("need p >= 1 and K >= 1")
    n = (2 * K + 1) ** p
    if n > MAX_PAIRS:
        raise BudgetExceeded(f"{n} lattice points exceed budget")
    axis = np.arange(-K, K + 1, dtype=np.float64)
    grids = np.meshgrid(*([axis] * p), indexing="ij")
    sq = sum(g.reshape(-1) ** 2 for g in grids)
    return WeightedSpectrum(TWO_PI * np.sqrt(sq), np.full(n, float(2 ** (p // 2))), f"torus(p={p},K={K})")


def mode_commutator_norm(k: Sequence) -> float:
    """``||[D_0, e_k]|| = 2 pi |k|_2`` for a single Fourier mode."""
    return TWO_PI * math.sqrt(rat.sqnorm(k))


def clifford_symbol_norm(k: Sequence) -> float:
    """Operator norm of ``2 pi sum_a eps_a k_a``, computed from the Clifford matrices."""
    k = [float(x) for x in k]
    fam = clifford_generators(len(k))
    return operator_norm(TWO_PI * sum(x * g for x, g in zip(k, fam.generators)))


@dataclass(frozen=True)
class GridNorm:
    lower: float
    upper: float


def grid_commutator_norm(f: TorusElement, g: int, B: CoveringMatrix | None = None) -> GridNorm:
    """Bounds on ``||[D_0, f]||``.

    ``lower`` is ``max |grad f|`` over a uniform ``g**p`` grid of the
    fundamental domain ``B^level [0,1)^p``; ``upper`` is
    ``2 pi sum |c_k| |k|``.
    """
    if g < 16:
        raise ValueError("grid resolution must be >= 16")
    if not f.coeffs:
        return GridNorm(0.0, 0.0)
    p = f.p
    if g**p > GRID_BUDGET:
        raise BudgetExceeded(f"grid of {g**p} points exceeds budget")
    if f.level and B is None:
        raise ValueError("a covering matrix is needed for level > 0")
    # on t = B^L u the phase k.t equals m.u with integer m = (B^L)^T k
    BLt = rat.identity(p) if not f.level else rat.transpose(rat.matpow(rat.to_rat_matrix(B.B), f.level))
    axis = np.arange(g) / g
    u = np.stack([x.reshape(-1) for x in np.meshgrid(*([axis] * p), indexing="ij")])
    grad = np.zeros((p, u.shape[1]), dtype=np.complex128)
    upper = 0.0
    for k, c in f.coeffs.items():
        m = rat.matvec(BLt, k)
        if any(x.denominator != 1 for x in m):
            raise ValueError(f"frequency {k} does not live on level {f.level}")
        mi = np.array([int(x) for x in m], dtype=np.int64)
        frac = np.mod(mi @ np.rint(u * g).astype(np.int64), g) / g
        wave = c * np.exp(2j * np.pi * frac)
        kf = np.array([float(x) for x in k])
        grad += (2j * np.pi) * kf[:, None] * wave[None, :]
        upper += abs(c) * mode_commutator_norm(k)
    lower = float(np.sqrt((np.abs(grad) ** 2).sum(axis=0)).max())
    return GridNorm(lower, upper)


def endo_pullback(B: CoveringMatrix, f: TorusElement, n: int) -> TorusElement:
    """``f o B^-n``: every frequency ``k`` goes to ``A^n k``; level rises by ``n``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return f
    An = B.A_power(n)
    return TorusElement(f.level + n, {rat.matvec(An, k): c for k, c in f.coeffs.items()})


def endo_forward(B: CoveringMatrix, f: TorusElement) -> TorusElement:
    """``f o B``: frequency ``k`` goes to ``B^T k``; level drops by one (not below 0)."""
    Bt = rat.transpose(rat.to_rat_matrix(B.B))
    return TorusElement(max(f.level - 1, 0), {rat.matvec(Bt, k): c for k, c in f.coeffs.items()})


@dataclass(frozen=True)
class LipCheck:
    """Per-step values of ``||[D, alpha^-n f]||`` against ``||B^-n|| ||[D, f]||``."""

    norms: list[float]
    envelope: list[float]
    upper: list[float]
    holds: list[bool]
    exact: bool

    @property
    def sup(self) -> float:
        return max(self.norms)

    @property
    def passed(self) -> bool:
        return all(self.holds)


def lip_inequality_check(B: CoveringMatrix, f: TorusElement, n_max: int, g: int = 64, rtol: float = 1e-9) -> LipCheck:
    """Check ``||[D_0, f o B^-n]|| <= ||B^-n|| ||[D_0, f]||`` for ``n = 0..n_max``.

    Single modes use the exact value ``2 pi |A^n k|``. Sums use the grid lower
    bound on both sides (the grids correspond under ``B^-n``, so the pointwise
    inequality carries over) and also against the certified upper bound.
    """
    exact = f.is_single_mode or not f.coeffs
    norms, env, upper, holds = [], [], [], []
    if exact:
        base = mode_commutator_norm(next(iter(f.coeffs))) * abs(next(iter(f.coeffs.values()))) if f.coeffs else 0.0
        base_upper = base
    else:
        g0 = grid_commutator_norm(f, g, B)
        base, base_upper = g0.lower, g0.upper
    for n in range(n_max + 1):
        fn = endo_pullback(B, f, n)
        scale = B.inverse_power_norm(n)
        if exact:
            val = base * 0.0
            if fn.coeffs:
                k, c = next(iter(fn.coeffs.items()))
                val = mode_commutator_norm(k) * abs(c)
            up = val
        else:
            gn = grid_commutator_norm(fn, g, B)
            val, up = gn.lower, gn.upper
        bound = scale * base
        ok = val <= bound * (1 + rtol) + 1e-300 and val <= scale * base_upper * (1 + rtol) + 1e-300
        norms.append(val)
        env.append(bound)
        upper.append(up)
        holds.append(bool(ok))
    return LipCheck(norms, env, upper, holds, exact)


@dataclass(frozen=True)
class SectionMap:
    """Coset representatives of ``A Z^p / Z^p`` inside ``[0,1)^p``."""

    B: CoveringMatrix
    reps: tuple[rat.RatVec, ...]


def section_map(B: CoveringMatrix) -> SectionMap:
    """Enumerate ``A Z^p`` intersected with ``[0,1)^p``.

    ``A m`` lies in the unit cube iff ``m`` lies in ``B^T [0,1)^p``, so the
    integer points of that parallelepiped's bounding box are scanned.
    """
    p = B.p
    Bt = np.array(B.B, dtype=np.int64).T
    corners = np.array([Bt @ np.array(c) for c in itertools.product((0, 1), repeat=p)])
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    reps = []
    for m in itertools.product(*[range(int(a), int(b) + 1) for a, b in zip(lo, hi)]):
        x = rat.matvec(B.A, m)
        if all(0 <= xi < 1 for xi in x):
            reps.append(x)
    reps.sort()
    if len(reps) != B.r:
        raise RuntimeError(f"found {len(reps)} section representatives, expected {B.r}")
    return SectionMap(B, tuple(reps))


def solenoid_spectrum(B: CoveringMatrix, H: int, K: int, budget: int = MAX_PAIRS) -> WeightedSpectrum:
    """``|D_inf|`` truncated to depth ``H`` and Fourier cutoff ``K``.

    Values ``2 pi |k + sum_h A^(h-1) s(x_h)|`` over ``|k|_inf <= K`` and all
    ``x in Z_B^H``; each carries weight ``2**(p//2) / r**H`` (normalised trace).
    """
    if H < 0 or K < 0:
        raise ValueError("need H >= 0 and K >= 0")
    p = B.p
    n = B.r**H * (2 * K + 1) ** p
    if n > budget:
        raise BudgetExceeded(f"solenoid spectrum with {n} points exceeds budget {budget}")
    reps = section_map(B).reps if H else ()
    offsets = [tuple(Fraction(0) for _ in range(p))]
    for h in range(1, H + 1):
        Ah = B.A_power(h - 1)
        shifted = [rat.matvec(Ah, s) for s in reps]
        offsets = [tuple(a + b for a, b in zip(o, s)) for o in offsets for s in shifted]
    off = np.array([[float(x) for x in o] for o in offsets])  # (r^H, p)
    axis = np.arange(-K, K + 1, dtype=np.float64)
    lattice = np.stack([g.reshape(-1) for g in np.meshgrid(*([axis] * p), indexing="ij")], axis=1)
    pts = lattice[:, None, :] + off[None, :, :]
    vals = TWO_PI * np.sqrt((pts**2).sum(axis=-1)).reshape(-1)
    w = float(2 ** (p // 2)) / float(B.r**H)
    return WeightedSpectrum(vals, np.full(vals.size, w), f"solenoid(B={B.B},H={H},K={K})")
