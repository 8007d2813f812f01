"""Weighted spectra, eigenvalue counting functions and dimension estimates.

A :class:`WeightedSpectrum` stands in for ``|D|`` together with a trace: each
point is an eigenvalue of ``|D|`` and the trace of its spectral projection.
The counting function ``counting(S, t)`` sums the weights of the values
strictly below ``t``; its log-log growth rate estimates the metric dimension.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

import numpy as np

from . import kernels
from .operator_core import BudgetExceeded

__all__ = [
    "DimensionFit",
    "MAX_PAIRS",
    "NatCounting",
    "ProductSpectrum",
    "SandwichReport",
    "WeightedSpectrum",
    "counting",
    "dimension_fit",
    "dyadic_grid",
    "nat_spectrum",
    "sandwich_check",
    "tensor_counting",
    "tensor_spectrum",
    "valid_range",
]

#: Largest number of points ``tensor_spectrum`` may materialise.
MAX_PAIRS = 20_000_000


@dataclass(frozen=True, eq=False)
class WeightedSpectrum:
    """Finite list of ``(value, weight)`` pairs, kept sorted by value."""

    values: np.ndarray
    weights: np.ndarray
    label: str = ""
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if v.shape != w.shape:
            raise ValueError("values and weights differ in length")
        if v.size == 0:
            raise ValueError("empty spectrum")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("spectrum values must be finite and >= 0")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("spectrum weights must be finite and > 0")
        order = np.argsort(v, kind="stable")
        v = v[order]
        w = w[order]
        v.setflags(write=False)
        w.setflags(write=False)
        cum = np.concatenate(([0.0], np.cumsum(w)))
        cum.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], label: str = "") -> "WeightedSpectrum":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs], label)

    def __len__(self) -> int:
        return self.values.size

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.weights.tolist()))

    @property
    def total_weight(self) -> float:
        return float(self._cum[-1])

    @property
    def max_value(self) -> float:
        return float(self.values[-1])

    @property
    def min_positive(self) -> float:
        pos = self.values[self.values > 0]
        return float(pos[0]) if pos.size else math.inf

    def counts(self, grid) -> np.ndarray:
        """Vectorised counting function over ``grid``."""
        idx = np.searchsorted(self.values, np.asarray(grid, dtype=np.float64), side="left")
        return self._cum[idx]

    def same_points(self, other: "WeightedSpectrum") -> bool:
        return np.array_equal(self.values, other.values) and np.array_equal(self.weights, other.weights)

    # serialisation

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("value,weight\n")
        for v, w in zip(self.values.tolist(), self.weights.tolist()):
            buf.write(f"{v:.17g},{w:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "WeightedSpectrum":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if [h.strip() for h in header] != ["value", "weight"]:
            raise ValueError(f"bad CSV header {header!r}")
        rows = [(float(a), float(b)) for a, b in reader]
        return cls.from_pairs(rows, label)

    def to_json(self) -> str:
        return json.dumps([[v, w] for v, w in self.points])

    @classmethod
    def from_json(cls, text: str, label: str = "") -> "WeightedSpectrum":
        return cls.from_pairs([(float(a), float(b)) for a, b in json.loads(text)], label)


class SpectrumLike(Protocol):
    max_value: float
    min_positive: float

    def counts(self, grid) -> np.ndarray: ...


def counting(S: SpectrumLike, t: float) -> float:
    """Trace weight of the values strictly below ``t``."""
    if not t > 0:
        raise ValueError("counting needs t > 0")
    return float(S.counts([t])[0])


def nat_spectrum(N: int) -> WeightedSpectrum:
    """Spectrum of the number operator on ``l2({0..N})``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return WeightedSpectrum(np.arange(N + 1, dtype=np.float64), np.ones(N + 1), f"nat(N={N})")


def tensor_spectrum(S1: WeightedSpectrum, S2: WeightedSpectrum, budget: int = MAX_PAIRS) -> WeightedSpectrum:
    """All pairs ``(hypot(v, u), w * w')``: ``|D|`` for ``D^2 = D1^2 x I + I x D2^2``."""
    n = len(S1) * len(S2)
    if n > budget:
        raise BudgetExceeded(f"tensor spectrum with {n} points exceeds budget {budget}")
    vals = np.hypot.outer(S1.values, S2.values).reshape(-1)
    wts = np.multiply.outer(S1.weights, S2.weights).reshape(-1)
    return WeightedSpectrum(vals, wts, f"({S1.label})x({S2.label})")


class NatCounting:
    """Counting interface of ``nat_spectrum(N)`` in closed form, for very large ``N``."""

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("N must be >= 1")
        self.N = int(N)
        self.label = f"nat(N={N})"

    def counts(self, grid) -> np.ndarray:
        # values 0..N with weight 1: #{n < t} = ceil(t) clipped to [0, N+1]
        return np.clip(np.ceil(np.asarray(grid, dtype=np.float64)), 0, self.N + 1)

    @property
    def max_value(self) -> float:
        return float(self.N)

    @property
    def min_positive(self) -> float:
        return 1.0

    @property
    def total_weight(self) -> float:
        return float(self.N + 1)

    def materialize(self) -> WeightedSpectrum:
        return nat_spectrum(self.N)


def tensor_counting(S1: WeightedSpectrum, S2: "WeightedSpectrum | NatCounting", grid) -> np.ndarray:
    """Counting function of ``tensor_spectrum(S1, S2)`` without materialising it.

    Uses ``sum_{v < t} w * counting(S2, sqrt(t^2 - v^2))``.
    """
    if isinstance(S2, NatCounting):
        grid = np.asarray(grid, dtype=np.float64)
        out = np.empty(grid.shape)
        for i, t in enumerate(grid.tolist()):
            k = np.searchsorted(S1.values, t, side="left")
            inner = S2.counts(np.sqrt(t * t - S1.values[:k] ** 2))
            out[i] = float(np.dot(S1.weights[:k], inner))
        return out
    return kernels.tensor_counts(S1.values, S1.weights, S2.values, S2._cum, grid)


class ProductSpectrum:
    """Lazy ``tensor_spectrum(S1, S2)``: only the counting interface."""

    def __init__(self, S1: WeightedSpectrum, S2: "WeightedSpectrum | NatCounting", label: str | None = None):
        self.S1 = S1
        self.S2 = S2
        self.label = label if label is not None else f"({S1.label})x({S2.label})"

    def counts(self, grid) -> np.ndarray:
        return tensor_counting(self.S1, self.S2, grid)

    @property
    def max_value(self) -> float:
        return math.hypot(self.S1.max_value, self.S2.max_value)

    @property
    def min_positive(self) -> float:
        a = float(self.S1.values[0])
        b = 0.0 if isinstance(self.S2, NatCounting) else float(self.S2.values[0])
        if math.hypot(a, b) > 0:
            return math.hypot(a, b)
        return min(math.hypot(a, self.S2.min_positive), math.hypot(self.S1.min_positive, b))

    @property
    def total_weight(self) -> float:
        return self.S1.total_weight * self.S2.total_weight

    def materialize(self, budget: int = MAX_PAIRS) -> WeightedSpectrum:
        S2 = self.S2.materialize() if isinstance(self.S2, NatCounting) else self.S2
        return tensor_spectrum(self.S1, S2, budget)


@dataclass(frozen=True)
class SandwichReport:
    t: float
    lower: float
    middle: float
    upper: float

    @property
    def passed(self) -> bool:
        # weight products are summed in different orders: allow rounding slack
        slack = 1e-12 * max(abs(self.upper), 1.0)
        return self.lower <= self.middle + slack and self.middle <= self.upper + slack

    def __bool__(self) -> bool:
        return self.passed


def sandwich_check(S1: WeightedSpectrum, S2: "WeightedSpectrum | NatCounting", t: float) -> SandwichReport:
    """Square/disc/square bounds on the product counting function at ``t``."""
    if not t > 0:
        raise ValueError("t must be > 0")
    h = t / math.sqrt(2.0)
    lower = counting(S1, h) * counting(S2, h)
    middle = float(ProductSpectrum(S1, S2).counts([t])[0])
    upper = counting(S1, t) * counting(S2, t)
    return SandwichReport(t, lower, middle, upper)


@dataclass(frozen=True)
class DimensionFit:
    slope: float
    intercept: float
    max_tail_slope: float
    grid: list[tuple[float, float]]
    valid_range: tuple[float, float]

    def to_json(self) -> str:
        return json.dumps(
            {
                "slope": self.slope,
                "intercept": self.intercept,
                "max_tail_slope": self.max_tail_slope,
                "grid": [list(p) for p in self.grid],
                "valid_range": list(self.valid_range),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DimensionFit":
        d = json.loads(text)
        return cls(
            slope=d["slope"],
            intercept=d["intercept"],
            max_tail_slope=d["max_tail_slope"],
            grid=[(float(a), float(b)) for a, b in d["grid"]],
            valid_range=(float(d["valid_range"][0]), float(d["valid_range"][1])),
        )


def valid_range(S: SpectrumLike) -> tuple[float, float]:
    """Bulk window ``[4 * smallest nonzero value, largest value / 2]``."""
    return 4.0 * S.min_positive, S.max_value / 2.0


def dyadic_grid(t_min: float, t_max: float, per_octave: int = 1) -> np.ndarray:
    """Geometric grid ``t_min * 2**(j / per_octave)`` up to ``t_max`` inclusive."""
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    n = int(math.floor(per_octave * math.log2(t_max / t_min) + 1e-9))
    return t_min * 2.0 ** (np.arange(n + 1) / per_octave)


def dimension_fit(S: SpectrumLike, grid: Sequence[float]) -> DimensionFit:
    """Least-squares slope of ``log counting`` against ``log t`` over ``grid``.

    ``max_tail_slope`` is the largest secant slope from a grid point to the
    last one, a finite stand-in for the limsup.

    Raises:
        ValueError: if the grid is not strictly increasing, leaves the valid
            range, or has fewer than three points with nonzero count.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    lo, hi = valid_range(S)
    eps = 1e-12
    if grid[0] < lo * (1 - eps) or grid[-1] > hi * (1 + eps):
        raise ValueError(f"grid [{grid[0]:g}, {grid[-1]:g}] leaves valid range [{lo:g}, {hi:g}]")
    lam = np.asarray(S.counts(grid), dtype=np.float64)
    keep = lam > 0
    if keep.sum() < 3:
        raise ValueError("fewer than 3 usable grid points")
    x = np.log(grid[keep])
    y = np.log(lam[keep])
    slope, intercept = np.polyfit(x, y, 1)
    tails = (y[-1] - y[:-1]) / (x[-1] - x[:-1])
    return DimensionFit(
        slope=float(slope),
        intercept=float(intercept),
        max_tail_slope=float(tails.max()),
        grid=[(float(t), float(c)) for t, c in zip(grid, lam)],
        valid_range=(float(lo), float(hi)),
    )
