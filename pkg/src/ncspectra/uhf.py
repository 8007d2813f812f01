"""``UHF_r`` with the Christensen-Ivan Dirac operator and the tensor shift.

The GNS space of ``M_r`` for the normalised trace is ``C^(r*r)`` with the
rescaled matrix units as orthonormal basis; a leg index ``i * r + j`` stands
for ``e_ij``. Windows of consecutive tensor positions ``[-K, L]`` are ordered
with position ``-K`` as the slowest Kronecker factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .operator_core import BudgetExceeded, MAX_DIM, as_matrix, commutator, operator_norm
from .spectral import WeightedSpectrum

__all__ = [
    "ScalingReport",
    "UHFParams",
    "WindowElement",
    "ci_spectrum",
    "ci_weights_exact",
    "left_mult",
    "level_projection",
    "matrix_unit",
    "scaling_check",
    "shift_element",
    "window_dirac",
]


def ci_weights_exact(r: int, N: int) -> list[tuple[int, int]]:
    """``(level, multiplicity)`` pairs as exact integers; level ``-1`` is the vacuum.

    Level 0 is ``L2(M_r)`` minus the vacuum and level ``n`` adds the
    ``r**(2n+2) - r**(2n)`` new dimensions of ``L2(M_r^(n+1))``.
    """
    if r < 2 or N < 1:
        raise ValueError("need r >= 2 and N >= 1")
    out = [(-1, 1), (0, r * r - 1)]
    out += [(n, r ** (2 * n + 2) - r ** (2 * n)) for n in range(1, N + 1)]
    return out


def ci_spectrum(r: int, s: float, N: int) -> WeightedSpectrum:
    """Spectrum of ``D0 = sum_n r^(n s) Q_n`` up to level ``N`` with vacuum at 0."""
    if not s > 0:
        raise ValueError("s must be > 0")
    pairs = [(0.0 if n < 0 else float(r) ** (n * s), float(m)) for n, m in ci_weights_exact(r, N)]
    return WeightedSpectrum.from_pairs(pairs, f"ci(r={r},s={s},N={N})")


@dataclass(frozen=True)
class UHFParams:
    r: int
    s: float
    K: int
    L: int

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("r must be >= 2")
        if self.K < 0 or self.L < -self.K:
            raise ValueError("window [-K, L] is empty")
        if self.dim > MAX_DIM:
            raise BudgetExceeded(f"GNS dimension {self.dim} exceeds budget {MAX_DIM}")

    @property
    def legs(self) -> int:
        return self.K + self.L + 1

    @property
    def dim(self) -> int:
        return self.r ** (2 * self.legs)

    @property
    def positions(self) -> range:
        return range(-self.K, self.L + 1)

    @cached_property
    def _vacuum_leg(self) -> np.ndarray:
        one = np.eye(self.r).reshape(-1) / math.sqrt(self.r)
        return np.outer(one, one).astype(np.complex128)


@dataclass(frozen=True)
class WindowElement:
    """Matrix acting on positions ``start .. start + legs - 1`` (identity elsewhere)."""

    start: int
    matrix: np.ndarray
    r: int

    def __post_init__(self):
        m = as_matrix(self.matrix)
        legs = round(math.log(m.shape[0], self.r)) if m.shape[0] > 1 else 0
        if m.shape[0] != m.shape[1] or self.r**legs != m.shape[0] or legs < 1:
            raise ValueError(f"matrix of shape {m.shape} is not a tensor power of M_{self.r}")
        object.__setattr__(self, "matrix", m)

    @property
    def legs(self) -> int:
        return round(math.log(self.matrix.shape[0], self.r))

    @property
    def positions(self) -> range:
        return range(self.start, self.start + self.legs)

    def is_scalar(self) -> bool:
        d = self.matrix[0, 0]
        return bool(np.abs(self.matrix - d * np.eye(self.matrix.shape[0])).max() < 1e-14)


def matrix_unit(r: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((r, r), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def level_projection(params: UHFParams, h: int) -> np.ndarray:
    """``P_h``: identity on positions ``<= h`` and vacuum on positions ``> h``."""
    out = np.ones((1, 1), dtype=np.complex128)
    eye = np.eye(params.r**2, dtype=np.complex128)
    for pos in params.positions:
        out = np.kron(out, eye if pos <= h else params._vacuum_leg)
    return out


def window_dirac(params: UHFParams) -> np.ndarray:
    """``sum_{h=-K}^{L} r^(h s) (P_h - P_{h-1})`` with ``P_{-K-1}`` the vacuum projection."""
    D = np.zeros((params.dim, params.dim), dtype=np.complex128)
    prev = level_projection(params, -params.K - 1)
    for h in params.positions:
        cur = level_projection(params, h)
        D += float(params.r) ** (h * params.s) * (cur - prev)
        prev = cur
    return D


def left_mult(params: UHFParams, f: WindowElement) -> np.ndarray:
    """Matrix of ``x -> f x`` on the GNS space of the window."""
    if f.r != params.r:
        raise ValueError("element and window use different r")
    if f.start < -params.K or f.start + f.legs - 1 > params.L:
        raise ValueError(f"element positions {list(f.positions)} leave window [{-params.K}, {params.L}]")
    r, k = params.r, f.legs
    # f (x) I on (i_1..i_k, j_1..j_k), then interleave to (i_1, j_1, ..., i_k, j_k)
    M = np.kron(f.matrix, np.eye(r**k)).reshape([r] * (4 * k))
    perm_out = [x for a in range(k) for x in (a, k + a)]
    perm = perm_out + [2 * k + p for p in perm_out]
    M = M.transpose(perm).reshape(r ** (2 * k), r ** (2 * k))
    before = f.start + params.K
    after = params.legs - before - k
    return np.kron(np.kron(np.eye(r ** (2 * before)), M), np.eye(r ** (2 * after)))


def shift_element(f: WindowElement, k: int, params: UHFParams | None = None) -> WindowElement:
    """``alpha^-k``: translate the support ``k`` positions to the left."""
    g = WindowElement(f.start - k, f.matrix, f.r)
    if params is not None and (g.start < -params.K or g.start + g.legs - 1 > params.L):
        raise ValueError(f"shifted support {list(g.positions)} overflows window [{-params.K}, {params.L}]")
    return g


@dataclass(frozen=True)
class ScalingReport:
    norm_f: float
    norm_shifted: float
    ratio: float
    expected: float
    status: str  # "ok", "fail", "degenerate", "inconclusive"
    boundary_weight: float

    @property
    def passed(self) -> bool:
        return self.status in ("ok", "degenerate")


def _boundary_weight(params: UHFParams, C: np.ndarray) -> float:
    lo = level_projection(params, -params.K) - level_projection(params, -params.K - 1)
    hi = level_projection(params, params.L) - level_projection(params, params.L - 1)
    return max(operator_norm(lo @ C), operator_norm(C @ lo), operator_norm(hi @ C), operator_norm(C @ hi))


def scaling_check(params: UHFParams, f: WindowElement, k: int, rtol: float = 1e-9) -> ScalingReport:
    """Compare ``||[D, alpha^-k f]||`` with ``r^(-k s) ||[D, f]||``.

    ``boundary_weight`` measures how much of either commutator sits on the
    extreme window levels; it is reported but does not change the verdict.
    """
    expected = float(params.r) ** (-k * params.s)
    try:
        g = shift_element(f, k, params)
        Lf, Lg = left_mult(params, f), left_mult(params, g)
    except ValueError:
        return ScalingReport(math.nan, math.nan, math.nan, expected, "inconclusive", math.nan)
    D = window_dirac(params)
    Cf, Cg = commutator(D, Lf), commutator(D, Lg)
    nf, ng = operator_norm(Cf), operator_norm(Cg)
    bw = max(_boundary_weight(params, Cf), _boundary_weight(params, Cg))
    if nf < 1e-13:
        return ScalingReport(nf, ng, math.nan, expected, "degenerate", bw)
    ratio = ng / nf
    status = "ok" if abs(ratio - expected) <= rtol * expected else "fail"
    return ScalingReport(nf, ng, ratio, expected, status, bw)
