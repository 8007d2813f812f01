import math
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncspectra import rational as rat
from ncspectra.spectral import dimension_fit, dyadic_grid
from ncspectra.torus import (
    CoveringMatrix,
    TorusElement,
    clifford_symbol_norm,
    endo_forward,
    endo_pullback,
    grid_commutator_norm,
    lip_inequality_check,
    mode_commutator_norm,
    section_map,
    solenoid_spectrum,
    torus_spectrum,
)

TWO_PI = 2 * math.pi
B2 = CoveringMatrix.from_rows([[2, 0], [0, 2]])
BROT = CoveringMatrix.from_rows([[1, 1], [-1, 1]])
BSHEAR = CoveringMatrix.from_rows([[2, 1], [0, 2]])
EXPANDING = [B2, BROT, BSHEAR, CoveringMatrix.from_rows([[3]]), CoveringMatrix.from_rows([[0, 2], [-3, 1]])]


def test_covering_matrix_fields():
    assert B2.r == 4 and B2.p == 2
    assert BROT.A == ((F(1, 2), F(1, 2)), (F(-1, 2), F(1, 2)))
    with pytest.raises(ValueError):
        CoveringMatrix.from_rows([[1, 0], [0, 2]])  # eigenvalue 1 is not expanding
    with pytest.raises(ValueError):
        CoveringMatrix.from_rows([[1, 2], [2, 4]])  # singular
    assert CoveringMatrix.from_rows([[4, 1], [3, 1]], require_expanding=False).r == 1


def test_inverse_power_norm_matches_float():
    for B in EXPANDING:
        for n in range(6):
            Binv = np.linalg.matrix_power(np.linalg.inv(np.array(B.B, float)), n)
            assert B.inverse_power_norm(n) == pytest.approx(np.linalg.norm(Binv, 2), rel=1e-12)


# spectrum


def test_torus_spectrum_examples():
    S = torus_spectrum(1, 1)
    assert np.allclose(S.values, [0, TWO_PI, TWO_PI]) and np.all(S.weights == 1)
    S = torus_spectrum(2, 1)
    c = Counter(np.round(S.values / TWO_PI, 12).tolist())
    assert c == {0.0: 1, 1.0: 4, round(math.sqrt(2), 12): 4}
    assert np.all(S.weights == 2)


@pytest.mark.parametrize("p,K", [(1, 512), (2, 64), (3, 24)])
def test_torus_dimension(p, K):
    S = torus_spectrum(p, K)
    fit = dimension_fit(S, dyadic_grid(4 * S.min_positive, math.pi * K, 4))
    assert abs(fit.slope - p) < 0.1


# commutator norms


def test_mode_commutator_norm_examples():
    assert mode_commutator_norm((3, 4)) == pytest.approx(TWO_PI * 5, rel=1e-15)
    assert mode_commutator_norm((0, 0)) == 0
    assert mode_commutator_norm((1, 0, 0)) == pytest.approx(TWO_PI, rel=1e-15)


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5))
def test_mode_norm_matches_clifford_symbol(k):
    assert clifford_symbol_norm(k) == pytest.approx(mode_commutator_norm(k), rel=1e-10, abs=1e-12)


def test_grid_norm_examples():
    g = grid_commutator_norm(TorusElement.mode((2, -1)), 32)
    assert g.lower == pytest.approx(TWO_PI * math.sqrt(5), rel=1e-12)
    assert g.upper == pytest.approx(g.lower, rel=1e-12)
    const = grid_commutator_norm(TorusElement.mode((0, 0), 3.0), 16)
    assert const.lower == 0 and const.upper == 0
    f = TorusElement(0, {(1, 0): 1, (0, 1): 1})
    g = grid_commutator_norm(f, 256)
    assert abs(g.lower - TWO_PI * math.sqrt(2)) < 1e-6
    assert g.upper == pytest.approx(4 * math.pi, rel=1e-12)
    with pytest.raises(ValueError):
        grid_commutator_norm(f, 8)


def test_grid_lower_bound_oracle_refinement():
    # |grad f|^2 = 4 pi^2 (|c1|^2 + 4|c2|^2 + 4 Re(c1 conj(c2) e(-t1)) ...) maximised on a fine grid
    rng = np.random.default_rng(5)
    for _ in range(5):
        ks = [tuple(int(x) for x in rng.integers(-3, 4, 2)) for _ in range(3)]
        f = TorusElement(0, {k: complex(*rng.normal(size=2)) for k in ks})
        coarse, fine = grid_commutator_norm(f, 32), grid_commutator_norm(f, 512)
        assert coarse.lower <= fine.lower * (1 + 1e-12) <= fine.upper * (1 + 1e-12)


# endomorphism


def test_pullback_examples():
    f = TorusElement.mode((1, 0))
    assert list(endo_pullback(B2, f, 1).coeffs) == [(F(1, 2), F(0))]
    assert endo_pullback(B2, f, 0) is f
    g = endo_pullback(BROT, f, 1)
    (k,) = g.coeffs
    assert k == (F(1, 2), F(-1, 2)) and g.level == 1
    assert mode_commutator_norm(k) == pytest.approx(TWO_PI / math.sqrt(2), rel=1e-15)


@given(st.sampled_from(EXPANDING), st.integers(0, 6), st.integers(0, 6), st.data())
def test_pullback_composes_exactly(B, m, n, data):
    k = tuple(data.draw(st.integers(-5, 5)) for _ in range(B.p))
    f = TorusElement.mode(k, 2.0)
    assert endo_pullback(B, endo_pullback(B, f, n), m) == endo_pullback(B, f, m + n)


@given(st.sampled_from(EXPANDING), st.data())
def test_forward_inverts_pullback(B, data):
    k = tuple(data.draw(st.integers(-5, 5)) for _ in range(B.p))
    f = TorusElement.mode(k)
    assert endo_forward(B, endo_pullback(B, f, 1)).coeffs == f.coeffs


@given(st.sampled_from(EXPANDING), st.integers(0, 12), st.data())
def test_mode_norm_bounded_by_operator_norm(B, n, data):
    k = tuple(data.draw(st.integers(-5, 5)) for _ in range(B.p))
    Ank = rat.matvec(B.A_power(n), k)
    assert mode_commutator_norm(Ank) <= B.inverse_power_norm(n) * mode_commutator_norm(k) * (1 + 1e-12) + 1e-300


def test_grid_norm_of_pullback_matches_exact_mode():
    f = endo_pullback(BSHEAR, TorusElement.mode((1, 1)), 3)
    (k,) = f.coeffs
    g = grid_commutator_norm(f, 16, BSHEAR)
    assert g.lower == pytest.approx(mode_commutator_norm(k), rel=1e-12)
    with pytest.raises(ValueError):
        grid_commutator_norm(f, 16)


# Lip inequality


@pytest.mark.parametrize("B", [B2, BROT])
def test_lip_single_modes_exact(B):
    for k in [(a, b) for a in range(-3, 4) for b in range(-3, 4)]:
        chk = lip_inequality_check(B, TorusElement.mode(k), 20)
        assert chk.exact and chk.passed
        for n, val in enumerate(chk.norms):
            kn = rat.matvec(B.A_power(n), k)
            assert val == TWO_PI * math.sqrt(rat.sqnorm(kn))
        if B is B2 and k != (0, 0):
            assert chk.norms == pytest.approx(chk.envelope, rel=1e-12)  # equality for 2I


def test_lip_constant_is_zero():
    chk = lip_inequality_check(B2, TorusElement.mode((0, 0), 5.0), 6)
    assert chk.norms == [0.0] * 7 and chk.passed


def test_lip_random_multimode():
    rng = np.random.default_rng(1)
    coeffs = {tuple(int(x) for x in rng.integers(-3, 4, 2)): complex(*rng.normal(size=2)) for _ in range(5)}
    chk = lip_inequality_check(BSHEAR, TorusElement(0, coeffs), 12, g=32)
    assert not chk.exact and chk.passed
    assert all(lo <= up * (1 + 1e-12) for lo, up in zip(chk.norms, chk.upper))
    bound = chk.norms[0] * max(BSHEAR.inverse_power_norm(n) for n in range(13))
    assert chk.sup <= bound * (1 + 1e-9)


# sections and solenoid


def test_section_map_examples():
    assert section_map(CoveringMatrix.from_rows([[2]])).reps == ((F(0),), (F(1, 2),))
    assert set(section_map(B2).reps) == {(F(a, 2), F(b, 2)) for a in (0, 1) for b in (0, 1)}
    assert section_map(CoveringMatrix.from_rows([[3]])).reps == ((F(0),), (F(1, 3),), (F(2, 3),))


@pytest.mark.parametrize("B", EXPANDING)
def test_section_map_invariants(B):
    reps = section_map(B).reps
    assert len(reps) == B.r
    assert all(0 <= x < 1 for v in reps for x in v)
    # distinct modulo Z^p and inside A Z^p
    assert len({tuple(x % 1 for x in v) for v in reps}) == B.r
    Bt = rat.transpose(rat.to_rat_matrix(B.B))
    assert all(all(x.denominator == 1 for x in rat.matvec(Bt, v)) for v in reps)


def test_solenoid_examples():
    assert solenoid_spectrum(B2, 0, 3).same_points(torus_spectrum(2, 3))
    S = solenoid_spectrum(CoveringMatrix.from_rows([[2]]), 1, 0)
    assert S.points == [(0.0, 0.5), (math.pi, 0.5)]
    S = solenoid_spectrum(CoveringMatrix.from_rows([[2]]), 4, 64)
    fit = dimension_fit(S, dyadic_grid(4 * S.min_positive, 64 * math.pi, 4))
    assert abs(fit.slope - 1) < 0.12


@pytest.mark.parametrize("B,K", [(B2, 2), (BROT, 3), (CoveringMatrix.from_rows([[3]]), 5)])
def test_solenoid_total_weight_independent_of_depth(B, K):
    expected = (2 * K + 1) ** B.p * 2 ** (B.p // 2)
    for H in range(4):
        assert solenoid_spectrum(B, H, K).total_weight == pytest.approx(expected, rel=1e-12)
