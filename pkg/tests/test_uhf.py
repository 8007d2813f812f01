import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncspectra.operator_core import BudgetExceeded, commutator, operator_norm
from ncspectra.spectral import NatCounting, ProductSpectrum, counting, dimension_fit, dyadic_grid, valid_range
from ncspectra.uhf import (
    UHFParams,
    WindowElement,
    ci_spectrum,
    ci_weights_exact,
    left_mult,
    level_projection,
    matrix_unit,
    scaling_check,
    shift_element,
    window_dirac,
)


def translation_unitary(params: UHFParams) -> np.ndarray:
    """Moves the content of position j to j + 1; the top leg wraps to the bottom."""
    n, legs, d = params.dim, params.legs, params.r**2
    eye = np.eye(n).reshape([d] * legs + [n])
    return np.moveaxis(eye, legs - 1, 0).reshape(n, n)


# Christensen-Ivan counting data


def test_ci_spectrum_example():
    S = ci_spectrum(2, 1.7, 1)
    assert S.points == [(0.0, 1.0), (1.0, 3.0), (2**1.7, 12.0)]


@given(st.integers(2, 5), st.integers(1, 12))
def test_ci_multiplicities_telescope(r, N):
    w = ci_weights_exact(r, N)
    assert sum(m for _, m in w) == r ** (2 * N + 2)
    for n in range(-1, N + 1):  # cumulative = dim L2(M_n)
        assert sum(m for lvl, m in w if lvl <= n) == r ** (2 * n + 2)


def test_ci_counting_telescopes():
    S = ci_spectrum(2, 2.0, 3)
    assert counting(S, 64) == 1 + 3 + 12 + 48
    assert counting(S, 64 * (1 + 1e-12)) == S.total_weight == 2**8


@pytest.mark.parametrize("r,s", [(2, 1.5), (2, 2.0), (3, 1.5), (3, 2.0)])
def test_ci_dimension_and_crossed(r, s):
    S = ci_spectrum(r, s, 12)
    grid = dyadic_grid(*valid_range(S), 4)
    assert abs(dimension_fit(S, grid).slope - 2 / s) < 0.05
    M = math.ceil(S.max_value)
    P = ProductSpectrum(S, NatCounting(M))
    grid = dyadic_grid(valid_range(P)[0], min(M, S.max_value) / 2, 4)
    assert abs(dimension_fit(P, grid).slope - (1 + 2 / s)) < 0.1


# window Dirac operator


def test_window_dirac_examples():
    D = window_dirac(UHFParams(2, 1.0, 0, 0))
    assert np.allclose(np.linalg.eigvalsh(D), [0, 1, 1, 1], atol=1e-12)
    D = window_dirac(UHFParams(2, 1.0, 1, 0))
    assert np.allclose(np.linalg.eigvalsh(D), [0] + [0.5] * 3 + [1] * 12, atol=1e-12)


@pytest.mark.parametrize("r,K,L", [(2, 1, 1), (3, 0, 1), (2, 2, 0)])
def test_level_projections_form_a_resolution(r, K, L):
    p = UHFParams(r, 1.0, K, L)
    Ps = [level_projection(p, h) for h in range(-K - 1, L + 1)]
    Qs = [b - a for a, b in zip(Ps, Ps[1:])]
    for i, Q in enumerate(Qs):
        assert np.allclose(Q @ Q, Q, atol=1e-12) and np.allclose(Q, Q.conj().T, atol=1e-15)
        for Q2 in Qs[i + 1 :]:
            assert np.abs(Q @ Q2).max() < 1e-12
    ranks = [round(np.trace(Q).real) for Q in Qs]
    assert sum(ranks) == p.dim - 1
    assert np.allclose(sum(Qs) + Ps[0], np.eye(p.dim), atol=1e-12)
    assert round(np.trace(Ps[0]).real) == 1


@pytest.mark.parametrize("r,s,K,L", [(2, 1.0, 2, 1), (2, 2.0, 1, 1), (3, 1.5, 1, 0)])
def test_window_dirac_phi_covariance(r, s, K, L):
    p = UHFParams(r, s, K, L)
    D = window_dirac(p)
    T = translation_unitary(p)
    vacuum = level_projection(p, -K - 1)
    Pi0 = np.kron(p._vacuum_leg, np.eye(p.dim // r**2))  # vacuum on the slack leg -K
    assert np.abs(Pi0 @ D - D @ Pi0).max() < 1e-12
    lhs = T @ D @ T.conj().T @ Pi0
    assert np.abs(lhs - float(r) ** (-s) * D @ Pi0).max() < 1e-12
    assert np.abs(vacuum @ lhs).max() < 1e-12


# left multiplication and shifts


def test_left_mult_examples():
    p = UHFParams(2, 1.0, 1, 1)
    assert np.array_equal(left_mult(p, WindowElement(0, np.eye(2), 2)), np.eye(p.dim))
    L = left_mult(p, WindowElement(0, matrix_unit(2, 0, 0), 2))
    assert np.allclose(L @ L, L) and round(np.trace(L).real) == p.dim // 2
    with pytest.raises(ValueError):
        left_mult(p, WindowElement(2, np.eye(2), 2))


@given(st.integers(0, 2**31 - 1), st.integers(1, 2), st.integers(-1, 0))
def test_left_mult_is_isometric_representation(seed, legs, start):
    rng = np.random.default_rng(seed)
    p = UHFParams(2, 1.0, 1, 1)
    n = 2**legs
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    fa, fb = WindowElement(start, a, 2), WindowElement(start, b, 2)
    La, Lb = left_mult(p, fa), left_mult(p, fb)
    assert operator_norm(La) == pytest.approx(operator_norm(a), rel=1e-10)
    assert np.allclose(La @ Lb, left_mult(p, WindowElement(start, a @ b, 2)), atol=1e-10)
    assert np.allclose(La.conj().T, left_mult(p, WindowElement(start, a.conj().T, 2)), atol=1e-12)


def test_shift_examples():
    f = WindowElement(0, matrix_unit(2, 0, 0), 2)
    g = shift_element(f, 0)
    assert g.start == 0 and np.array_equal(g.matrix, f.matrix)
    assert shift_element(f, 1).start == -1
    assert shift_element(shift_element(f, 1), 1).start == shift_element(f, 2).start == -2
    with pytest.raises(ValueError):
        shift_element(f, 3, UHFParams(2, 1.0, 2, 1))


# scaling law


@pytest.mark.parametrize("s", [1.0, 2.0])
@pytest.mark.parametrize("k", [1, 2])
def test_scaling_law_examples(s, k):
    rep = scaling_check(UHFParams(2, s, 2, 1), WindowElement(0, matrix_unit(2, 0, 0), 2), k)
    assert rep.status == "ok" and rep.passed
    assert abs(rep.ratio - 2.0 ** (-k * s)) <= 1e-9 * 2.0 ** (-k * s)


def test_scaling_degenerate_and_inconclusive():
    p = UHFParams(2, 1.0, 2, 1)
    rep = scaling_check(p, WindowElement(0, np.eye(2), 2), 1)
    assert rep.status == "degenerate" and rep.norm_f < 1e-13 and rep.norm_shifted < 1e-13
    assert scaling_check(p, WindowElement(0, matrix_unit(2, 0, 1), 2), 3).status == "inconclusive"


def test_commutator_norms_independent_of_window():
    f = WindowElement(0, matrix_unit(2, 0, 0), 2)
    vals = []
    for K, L in [(0, 0), (1, 0), (0, 1), (2, 1), (1, 2)]:
        p = UHFParams(2, 1.0, K, L)
        vals.append(operator_norm(commutator(window_dirac(p), left_mult(p, f))))
    assert vals == pytest.approx([0.5] * len(vals), rel=1e-12)


@given(st.integers(0, 2**31 - 1), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_scalars_commute_with_dirac(seed, c):
    p = UHFParams(2, 1.5, 1, 1)
    f = WindowElement(int(np.random.default_rng(seed).integers(-1, 2)), c * np.eye(2), 2)
    assert np.abs(commutator(window_dirac(p), left_mult(p, f))).max() < 1e-12


def test_budget():
    with pytest.raises(BudgetExceeded):
        UHFParams(2, 1.0, 3, 3)
