"""Words in a unitary ``U`` and an isometry ``V`` with ``UV = e(theta) VU``.

``e(x)`` denotes ``exp(2 pi i x)``. Every word rewrites to a single monomial
``e(c) U^j V^m V*^n``; with ``theta`` a ``Fraction`` the phase ``c`` is exact.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .operator_core import check_dim, operator_norm
from .rotation import phase

__all__ = [
    "LETTERS",
    "RULE_SIGNS",
    "CrossedWord",
    "RawWord",
    "WordSyntaxError",
    "calibrate_rules",
    "eval_word",
    "eval_word_sparse",
    "format_word",
    "interior_norm",
    "normalize_word",
    "parse_theta",
    "parse_word",
    "random_word",
]

LETTERS = ("U", "U*", "V", "V*")

#: ``pair -> s`` for the rule ``a b -> e(s theta) b a``; checked by :func:`calibrate_rules`.
RULE_SIGNS = {("V", "U"): -1, ("V", "U*"): 1, ("V*", "U"): 1, ("V*", "U*"): -1}
_CANCEL = {("V*", "V"), ("U", "U*"), ("U*", "U")}


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class RawWord:
    letters: tuple[str, ...]
    phase: Fraction = Fraction(0)

    def __post_init__(self):
        bad = [x for x in self.letters if x not in LETTERS]
        if bad:
            raise ValueError(f"unknown letters {bad}")
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "phase", Fraction(self.phase) % 1)

    @property
    def scalar(self) -> complex:
        return phase(self.phase)

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class CrossedWord:
    """``e(phase) U^j V^m V*^n`` (negative ``j`` means ``U*``)."""

    j: int
    m: int
    n: int
    phase: Fraction
    theta: Fraction

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("V powers must be >= 0")
        object.__setattr__(self, "phase", Fraction(self.phase) % 1)

    @property
    def terms(self) -> dict[tuple[int, int, int], complex]:
        return {(self.j, self.m, self.n): phase(self.phase)}

    def __str__(self) -> str:
        return format_word(self)


_TOKEN = re.compile(r"\s*(?:(e\()|(U\*|V\*|U|V|1)(?:\^(\d+))?)")


def parse_theta(text: str) -> Fraction:
    """``"1/5"`` or ``"0.2"`` as an exact fraction (decimals are taken literally)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad angle {text!r}") from exc


def parse_word(text: str) -> RawWord:
    """Parse ``SCALAR? FACTOR+`` with ``SCALAR = e(p/q)`` and ``FACTOR = (U|U*|V|V*)(^INT)?``.

    A bare ``1`` is accepted as the empty product, so formatted normal forms parse back.
    """
    pos = 0
    factors = 0
    ph = Fraction(0)
    letters: list[str] = []
    seen_scalar = False
    text_len = len(text.rstrip())
    while pos < text_len:
        mt = _TOKEN.match(text, pos)
        if not mt:
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise WordSyntaxError(f"unexpected {text[at]!r}", at)
        if mt.group(1):
            if seen_scalar or factors:
                raise WordSyntaxError("scalar must come first", mt.start(1))
            close = text.find(")", mt.end())
            if close < 0:
                raise WordSyntaxError("unclosed scalar", mt.start(1))
            try:
                ph = Fraction(text[mt.end():close].strip())
            except (ValueError, ZeroDivisionError):
                raise WordSyntaxError("scalar needs a rational", mt.end()) from None
            seen_scalar = True
            pos = close + 1
            continue
        if mt.group(2) != "1":
            letters.extend([mt.group(2)] * (int(mt.group(3)) if mt.group(3) else 1))
        factors += 1
        pos = mt.end()
    if not factors and not seen_scalar:
        raise WordSyntaxError("empty word", 0)
    if not factors:
        raise WordSyntaxError("expected a factor", pos)
    return RawWord(tuple(letters), ph)


def _redexes(letters: list[str]) -> list[int]:
    return [i for i in range(len(letters) - 1) if (letters[i], letters[i + 1]) in RULE_SIGNS or (letters[i], letters[i + 1]) in _CANCEL]


def normalize_word(w: RawWord, theta, rng: random.Random | None = None, stats: dict | None = None) -> CrossedWord:
    """Rewrite to ``e(c) U^j V^m V*^n``.

    Without ``rng`` the leftmost redex is contracted first; with ``rng`` a
    random redex is chosen at every step. ``stats['steps']`` receives the
    number of rule applications.
    """
    theta = Fraction(theta)
    letters = list(w.letters)
    ph = w.phase
    steps = 0
    while True:
        red = _redexes(letters)
        if not red:
            break
        i = rng.choice(red) if rng is not None else red[0]
        pair = (letters[i], letters[i + 1])
        if pair in _CANCEL:
            del letters[i : i + 2]
        else:
            ph += RULE_SIGNS[pair] * theta
            letters[i], letters[i + 1] = letters[i + 1], letters[i]
        steps += 1
    if stats is not None:
        stats["steps"] = steps
    j = letters.count("U") - letters.count("U*")
    return CrossedWord(j, letters.count("V"), letters.count("V*"), ph, theta)


def format_word(w: CrossedWord) -> str:
    ph = w.phase
    parts = [f"e({ph.numerator}/{ph.denominator})"]

    def power(sym, k):
        return sym if k == 1 else f"{sym}^{k}"

    if w.j:
        parts.append(power("U" if w.j > 0 else "U*", abs(w.j)))
    if w.m:
        parts.append(power("V", w.m))
    if w.n:
        parts.append(power("V*", w.n))
    if len(parts) == 1:
        parts.append("1")
    return " ".join(parts)


@lru_cache(maxsize=32)
def _generators(theta: Fraction, N: int, M: int) -> dict[str, sp.csr_matrix]:
    n = np.arange(N + 1)
    S = sp.eye(N + 1, k=-1, format="csr")  # (V xi)(n) = xi(n - 1)
    F = sp.eye(2 * M + 1, k=-1, format="csr")  # Fourier mode k -> k + 1
    U = sp.kron(sp.diags(np.exp(2j * np.pi * float(theta) * n)), F, format="csr")
    V = sp.kron(S, sp.eye(2 * M + 1), format="csr").astype(np.complex128)
    return {"U": U, "U*": U.conj().T.tocsr(), "V": V, "V*": V.conj().T.tocsr()}


def _letters(w: RawWord | CrossedWord) -> list[str]:
    if isinstance(w, CrossedWord):
        return ["U" if w.j > 0 else "U*"] * abs(w.j) + ["V"] * w.m + ["V*"] * w.n
    return list(w.letters)


def eval_word_sparse(w: RawWord | CrossedWord, theta, N: int, M: int) -> sp.csr_matrix:
    if N < 2 or M < 2:
        raise ValueError("cutoffs must be >= 2")
    g = _generators(Fraction(theta), N, M)
    out = sp.eye((N + 1) * (2 * M + 1), dtype=np.complex128, format="csr")
    for x in _letters(w):
        out = out @ g[x]
    return (phase(w.phase) * out).tocsr()


def eval_word(w: RawWord | CrossedWord, theta, N: int, M: int) -> np.ndarray:
    """Matrix on ``C^(N+1) (x) C^(2M+1)``; letters multiply left to right.

    ``U`` multiplies level ``n`` by ``e(n theta)`` and raises the Fourier mode;
    ``V`` raises ``n``. Both are truncated at the cutoffs.
    """
    check_dim((N + 1) * (2 * M + 1), "word evaluation space")
    return eval_word_sparse(w, theta, N, M).toarray()


def interior_projection(N: int, M: int, margin: int = 1) -> np.ndarray:
    """Coordinates ``margin <= n <= N - margin`` and ``|k| <= M - margin``."""
    pn = np.zeros(N + 1)
    pn[margin : N - margin + 1] = 1
    pk = np.zeros(2 * M + 1)
    pk[margin : 2 * M + 1 - margin] = 1
    return np.kron(pn, pk)


def interior_norm(A, N: int, M: int, margin: int = 1) -> float:
    """Operator norm of ``P A P`` for the interior projection ``P``.

    Sparse input gets the bound ``sqrt(||X||_1 ||X||_inf)``, which is never
    below the operator norm.
    """
    P = sp.diags(interior_projection(N, M, margin))
    if sp.issparse(A):
        X = abs(P @ A @ P)
        if X.nnz == 0:
            return 0.0
        return float(np.sqrt(X.sum(axis=0).max() * X.sum(axis=1).max()))
    return operator_norm(P @ np.asarray(A) @ P)


def calibrate_rules(theta=Fraction(1, 5), N: int = 16, M: int = 16) -> dict[tuple[str, str], int]:
    """For each phase rule pick the sign that the matrix model satisfies."""
    out = {}
    for a, b in RULE_SIGNS:
        lhs = eval_word(RawWord((a, b)), theta, N, M)
        rhs = eval_word(RawWord((b, a)), theta, N, M)
        errs = {s: interior_norm(lhs - phase(s * Fraction(theta)) * rhs, N, M, 2) for s in (1, -1)}
        best = min(errs, key=errs.get)
        if errs[best] > 1e-10:
            raise RuntimeError(f"no phase fits {a} {b}")
        out[(a, b)] = best
    return out


def random_word(rng: random.Random, max_len: int = 12) -> RawWord:
    n = rng.randint(1, max_len)
    return RawWord(tuple(rng.choice(LETTERS) for _ in range(n)), Fraction(rng.randint(0, 9), 10))
