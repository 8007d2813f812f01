"""Sierpinski gasket ``K``, its blow-ups ``K_n = 2^n K`` and the covering maps.

Points are ``(..., 2)`` float arrays in the plane. Lattice work uses the skew
coordinates ``(u, v)`` with ``x = u + v/2`` and ``y = v sqrt(3)/2``, so the
vertices ``v0, v1, v2`` become ``(0,0), (0,1), (1,0)`` and every cell corner
of depth ``d`` is an integer multiple of ``2^-d``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .operator_core import BudgetExceeded
from .spectral import WeightedSpectrum

__all__ = [
    "EDGE_BUDGET",
    "Edge",
    "EdgeList",
    "GasketAddress",
    "GasketFunction",
    "VERTICES",
    "ScalingReport",
    "covering_p",
    "covering_phi",
    "edge_commutator_norm",
    "enumerate_edges",
    "gasket_spectrum",
    "ifs_maps",
    "in_gasket",
    "p_chain",
    "p_n",
    "phi_n",
    "pullback_scaling_check",
    "sample_points",
    "w0_power",
]

SQ3 = math.sqrt(3.0)
VERTICES = np.array([[0.0, 0.0], [0.5, SQ3 / 2], [1.0, 0.0]])
EDGE_BUDGET = 20_000_000
_PAIRS = [(i, j) for i in range(3) for j in range(3) if i != j]
# vertex j in skew coordinates
_SKEW_V = np.array([[0, 0], [0, 1], [1, 0]], dtype=np.int64)


def ifs_maps() -> list[Callable[[np.ndarray], np.ndarray]]:
    """``w_j(x) = v_j + (x - v_j) / 2``."""
    return [lambda x, v=v: v + (np.asarray(x, dtype=np.float64) - v) / 2 for v in VERTICES]


def w0_power(x, n: int) -> np.ndarray:
    """``w0^n`` for any integer ``n`` (``w0`` is the halving map about the origin)."""
    return np.asarray(x, dtype=np.float64) * 2.0 ** (-n)


def _to_skew(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v = x[..., 1] * (2.0 / SQ3)
    return x[..., 0] - v / 2, v


def in_gasket(x, level: int = 0, tol: float = 1e-9) -> np.ndarray:
    """Membership in ``K_level`` by following cell addresses down to scale ``tol``."""
    x = np.asarray(x, dtype=np.float64) * 2.0 ** (-level)
    u, v = _to_skew(x)
    ok = (u >= -tol) & (v >= -tol) & (u + v <= 1 + tol)
    eps = tol
    while eps < 0.05:
        # choose the sub-cell: lower-left, top (v >= 1/2) or right (u >= 1/2)
        top = v >= 0.5 - eps
        right = ~top & (u >= 0.5 - eps)
        low = ~top & ~right
        ok &= ~low | (u + v <= 0.5 + eps)
        u = np.where(right, u - 0.5, u)
        v = np.where(top, v - 0.5, v)
        u, v = 2 * u, 2 * v
        eps *= 2
    return ok


def _rotate(x: np.ndarray, center, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    d = x - center
    return np.asarray(center) + np.stack([c * d[..., 0] - s * d[..., 1], s * d[..., 0] + c * d[..., 1]], axis=-1)


# the top and right copies of K inside K_1 are rotated onto K about v1 and v2
def _R01(x):
    return _rotate(x, VERTICES[1], 4 * math.pi / 3)


def _R02(x):
    return _rotate(x, VERTICES[2], -4 * math.pi / 3)


def _branch_select(x: np.ndarray, members: list[np.ndarray], images: list[np.ndarray], what: str) -> np.ndarray:
    """Lowest applicable branch wins after checking overlapping branches agree."""
    members = np.stack(members)
    if not members.any(axis=0).all():
        bad = x[~members.any(axis=0)][0]
        raise ValueError(f"{what}: point {bad.tolist()} outside the domain")
    out = np.empty_like(x)
    chosen = np.zeros(x.shape[0], dtype=bool)
    for mem, img in zip(members, images):
        take = mem & ~chosen
        out[take] = img[take]
        chosen |= mem
    for mem, img in zip(members, images):
        clash = mem & (np.linalg.norm(img - out, axis=-1) > 1e-12)
        if clash.any():
            raise RuntimeError(f"{what}: branches disagree at {x[clash][0].tolist()}")
    return out


def _points(x) -> tuple[np.ndarray, tuple]:
    a = np.asarray(x, dtype=np.float64)
    return a.reshape(-1, 2), a.shape


def _copy_membership(y: np.ndarray, tol: float) -> list[np.ndarray]:
    # y in K; which of w0 K, w1 K, w2 K contains it
    return [in_gasket(2 * y - v, tol=tol) for v in VERTICES]


def covering_p(x, tol: float = 1e-9) -> np.ndarray:
    """``p : K_1 -> K``: identity on ``K``, rotations by ``4 pi/3`` on the other two copies."""
    x, shape = _points(x)
    if not in_gasket(x, level=1, tol=tol).all():
        raise ValueError("covering_p: point outside K_1")
    mem = _copy_membership(x / 2, tol)
    return _branch_select(x, mem, [x, _R01(x), _R02(x)], "covering_p").reshape(shape)


def covering_phi(x, n: int = 0, tol: float = 1e-9) -> np.ndarray:
    """``phi_n = w0^-n phi w0^n`` on ``K_n``; ``phi`` doubles a point and folds it back onto ``K``."""
    x, shape = _points(x)
    y = w0_power(x, n)
    if not in_gasket(y, tol=tol).all():
        raise ValueError("covering_phi: point outside K_n")
    z = w0_power(y, -1)
    out = _branch_select(y, _copy_membership(y, tol), [z, _R01(z), _R02(z)], "covering_phi")
    return w0_power(out, -n).reshape(shape)


def p_n(x, n: int, tol: float = 1e-9) -> np.ndarray:
    """``p_n = w0^-(n-1) p w0^(n-1) : K_n -> K_(n-1)``."""
    if n < 1:
        raise ValueError("p_n needs n >= 1")
    return w0_power(covering_p(w0_power(x, n - 1), tol), -(n - 1))


phi_n = covering_phi


def p_chain(x, n: int, M: int, tol: float = 1e-9) -> np.ndarray:
    """``p_(n+1) o ... o p_M : K_M -> K_n`` (identity when ``M == n``)."""
    if M < n:
        raise ValueError("need M >= n")
    y = np.asarray(x, dtype=np.float64)
    for j in range(M, n, -1):
        y = p_n(y, j, tol)
    return y


def sample_points(count: int, level: int = 0, depth: int = 40, seed: int = 0) -> np.ndarray:
    """Pseudo-random points of ``K_level``: random address of length ``depth`` applied to a vertex."""
    rng = np.random.default_rng(seed)
    words = rng.integers(0, 3, size=(count, depth))
    x = VERTICES[rng.integers(0, 3, size=count)].copy()
    for k in range(depth - 1, -1, -1):
        v = VERTICES[words[:, k]]
        x = v + (x - v) / 2
    return x * 2.0**level


@dataclass(frozen=True)
class GasketAddress:
    out_level: int
    word: tuple[int, ...]

    @property
    def size(self) -> float:
        return 2.0 ** (self.out_level - len(self.word))


@dataclass(frozen=True)
class Edge:
    cell: GasketAddress
    pair: tuple[int, int]
    src: tuple[float, float]
    dst: tuple[float, float]

    @property
    def length(self) -> float:
        return self.cell.size

    def reverse(self) -> "Edge":
        return Edge(self.cell, self.pair[::-1], self.dst, self.src)


class EdgeList:
    """Oriented edges of ``K_N`` of length ``>= 2^-m`` held as flat arrays.

    ``src_exact`` and ``dst_exact`` hold ``(2x, 2y/sqrt3) * 2^m`` as integers.
    """

    def __init__(self, N: int, m: int, depth, code, pair, src_exact, dst_exact):
        self.N, self.m = N, m
        self.depth, self.code, self.pair = depth, code, pair
        self.src_exact, self.dst_exact = src_exact, dst_exact
        self.lengths = 2.0 ** (N - depth.astype(np.float64))
        self.src = _exact_to_plane(src_exact, m)
        self.dst = _exact_to_plane(dst_exact, m)

    def __len__(self) -> int:
        return self.depth.size

    def word(self, i: int) -> tuple[int, ...]:
        d, c = int(self.depth[i]), int(self.code[i])
        return tuple((c // 3 ** (d - 1 - k)) % 3 for k in range(d))

    def __getitem__(self, i: int) -> Edge:
        return Edge(
            GasketAddress(self.N, self.word(i)),
            (int(self.pair[i, 0]), int(self.pair[i, 1])),
            tuple(self.src[i].tolist()),
            tuple(self.dst[i].tolist()),
        )

    def reversed(self) -> "EdgeList":
        return EdgeList(self.N, self.m, self.depth, self.code, self.pair[:, ::-1], self.dst_exact, self.src_exact)

    def length_counts(self) -> dict[float, int]:
        vals, counts = np.unique(self.lengths, return_counts=True)
        return {float(v): int(c) for v, c in zip(vals, counts)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", "i", "j", "x_src", "y_src", "x_dst", "y_dst", "length"])
        for i in range(len(self)):
            w.writerow(
                ["".join(map(str, self.word(i))), int(self.pair[i, 0]), int(self.pair[i, 1])]
                + [f"{float(t):.17g}" for t in (*self.src[i], *self.dst[i], self.lengths[i])]
            )
        return buf.getvalue()


def _exact_to_plane(e: np.ndarray, m: int) -> np.ndarray:
    scale = 2.0 ** (m + 1)
    return np.stack([e[:, 0] / scale, e[:, 1] * (SQ3 / scale)], axis=1)


def enumerate_edges(N: int, m: int, budget: int = EDGE_BUDGET) -> EdgeList:
    """All oriented edges of ``K_N`` with length in ``2^-m .. 2^N``."""
    if N < 0 or m < -N:
        raise ValueError("need N >= 0 and m >= -N")
    total = sum(6 * 3**d for d in range(N + m + 1))
    if total > budget:
        raise BudgetExceeded(f"{total} edges exceed budget {budget}")
    depths, codes, srcs, dsts, pairs = [], [], [], [], []
    # corners in skew coordinates, unit 2^-m
    corner = np.zeros((1, 2), dtype=np.int64)
    code = np.zeros(1, dtype=np.int64)
    for d in range(N + m + 1):
        size = 2 ** (N + m - d)
        verts = [corner + size * _SKEW_V[j] for j in range(3)]
        for i, j in _PAIRS:
            depths.append(np.full(code.size, d))
            codes.append(code)
            srcs.append(verts[i])
            dsts.append(verts[j])
            pairs.append(np.tile([i, j], (code.size, 1)))
        half = size // 2
        corner = np.concatenate([corner + half * _SKEW_V[j] for j in range(3)]) if d < N + m else corner
        code = np.concatenate([3 * code + j for j in range(3)]) if d < N + m else code

    def to_exact(s):  # skew (u, v) -> (2x, 2y/sqrt3) = (2u + v, v)
        return np.stack([2 * s[:, 0] + s[:, 1], s[:, 1]], axis=1)

    return EdgeList(
        N,
        m,
        np.concatenate(depths),
        np.concatenate(codes),
        np.concatenate(pairs),
        to_exact(np.concatenate(srcs)),
        to_exact(np.concatenate(dsts)),
    )


@dataclass(frozen=True)
class GasketFunction:
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(x, dtype=np.float64)))

    def compose(self, g: Callable[[np.ndarray], np.ndarray], label: str = "") -> "GasketFunction":
        return GasketFunction(lambda x: self.evaluator(g(x)), label or f"{self.label}o?")

    @classmethod
    def coordinate(cls, axis: int) -> "GasketFunction":
        return cls(lambda x: x[..., axis], "xy"[axis])


def edge_commutator_norm(f: Callable, edges: EdgeList) -> float:
    """``max |f(e+) - f(e-)| / length(e)``."""
    return kernels.edge_quotient_max(np.asarray(f(edges.src)), np.asarray(f(edges.dst)), edges.lengths)


@dataclass(frozen=True)
class ScalingReport:
    k: int
    norm_pullback: float
    norm_f: float
    ratio: float
    expected: float

    @property
    def deviation(self) -> float:
        return abs(self.ratio - self.expected)

    @property
    def direction(self) -> str:
        """``"equal"``, ``"below"`` or ``"above"`` the expected ratio (relative tolerance 1e-12).

        Equality holds when the sup is attained inside the image of ``w0^k``;
        for other functions only the direction is informative.
        """
        if math.isnan(self.ratio):
            return "undefined"
        if self.deviation <= 1e-12 * self.expected:
            return "equal"
        return "below" if self.ratio < self.expected else "above"


def pullback_scaling_check(f: Callable, k: int, N: int, m: int) -> ScalingReport:
    """``||[D, f o w0^k]||`` on edges(N, m) against ``||[D, f]||`` on edges(N, m - k)."""
    if not 0 <= k <= m:
        raise ValueError("need 0 <= k <= m")
    pulled = edge_commutator_norm(lambda x: f(w0_power(x, k)), enumerate_edges(N, m))
    base = edge_commutator_norm(f, enumerate_edges(N, m - k))
    ratio = pulled / base if base > 0 else math.nan
    return ScalingReport(k, pulled, base, ratio, 2.0**-k)


def gasket_spectrum(N: int, m: int) -> WeightedSpectrum:
    """``|D|`` on edges of ``K_N`` down to length ``2^-m``: value ``2^-j`` with weight ``6 * 3^(N-j)``."""
    if N < 0 or m < -N:
        raise ValueError("need N >= 0 and m >= -N")
    pairs = [(2.0 ** (-j), 6.0 * 3.0 ** (N - j)) for j in range(-m, N + 1)]
    return WeightedSpectrum.from_pairs(pairs, f"gasket(N={N},m={m})")
