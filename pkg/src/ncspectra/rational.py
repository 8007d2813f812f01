"""Exact rational matrix helpers (``fractions.Fraction`` entries, tuples of rows)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

RatVec = tuple[Fraction, ...]
RatMat = tuple[RatVec, ...]


def to_rat_matrix(m) -> RatMat:
    rows = [tuple(Fraction(x) for x in row) for row in (m.tolist() if hasattr(m, "tolist") else m)]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("expected a nonempty square matrix")
    return tuple(rows)


def identity(p: int) -> RatMat:
    return tuple(tuple(Fraction(int(i == j)) for j in range(p)) for i in range(p))


def transpose(m: RatMat) -> RatMat:
    return tuple(zip(*m))


def matmul(a: RatMat, b: RatMat) -> RatMat:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: RatMat, v: Sequence) -> RatVec:
    return tuple(sum((x * Fraction(y) for x, y in zip(row, v)), Fraction(0)) for row in a)


def matpow(a: RatMat, n: int) -> RatMat:
    if n < 0:
        raise ValueError("negative power")
    out = identity(len(a))
    base = a
    while n:
        if n & 1:
            out = matmul(out, base)
        base = matmul(base, base)
        n >>= 1
    return out


def inverse_and_det(m: RatMat) -> tuple[RatMat, Fraction]:
    """Gauss-Jordan inverse with exact determinant."""
    p = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(p)] for i, row in enumerate(m)]
    det = Fraction(1)
    for col in range(p):
        piv = next((r for r in range(col, p) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
            det = -det
        pv = aug[col][col]
        det *= pv
        aug[col] = [x / pv for x in aug[col]]
        for r in range(p):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[p:]) for row in aug), det


def to_float(m: RatMat) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=np.float64)


def sqnorm(v: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(x) * Fraction(x) for x in v), Fraction(0))
