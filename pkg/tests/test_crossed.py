import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncspectra import crossed, torus
from ncspectra.crossed import (
    CovariantTruncation,
    build_pi_hat,
    check_covariance,
    crossed_dirac,
    crossed_norms,
    lip_probe,
    shift_isometry,
)
from ncspectra.operator_core import commutator, operator_norm, pauli
from ncspectra.spectral import WeightedSpectrum, nat_spectrum, tensor_spectrum

from conftest import random_hermitian

E1, E2, E3 = pauli()


def test_shift_isometry_examples():
    W = shift_isometry(2, 1)
    assert np.array_equal(W, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    assert np.array_equal(W.conj().T @ W, np.diag([1, 1, 0]))
    assert np.array_equal(W @ [1, 0, 0], [0, 1, 0])
    with pytest.raises(ValueError):
        shift_isometry(0, 2)


def test_shift_block_layout():
    W = shift_isometry(3, 2)
    xi = np.arange(8.0)
    assert np.array_equal(W @ xi, [0, 0, 0, 1, 2, 3, 4, 5])


def test_build_pi_hat_examples():
    assert np.array_equal(build_pi_hat([np.eye(2)] * 3), np.eye(6))
    A, B = np.array([[0, 3], [0, 0]]), np.diag([1, -2])
    P = build_pi_hat([A, B])
    assert np.array_equal(P[:2, :2], A) and np.array_equal(P[2:, 2:], B) and not P[:2, 2:].any()
    assert operator_norm(P) == pytest.approx(max(operator_norm(A), operator_norm(B)))
    with pytest.raises(ValueError):
        build_pi_hat([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        build_pi_hat([])


def test_uhf_blockwise_commutator_norms():
    smp = crossed.uhf_sample(N=2)
    cn = crossed_norms(smp.truncation, smp.D)
    assert cn.block_norms == pytest.approx([0.5, 0.25, 0.125], rel=1e-12)
    assert cn.pi_commutator == pytest.approx(cn.block_max, rel=1e-9)


# covariance


@pytest.mark.parametrize(
    "smp",
    [
        crossed.torus_sample([[2, 0], [0, 2]], (1, 2), 16),
        crossed.torus_sample([[1, 1], [-1, 1]], (3, -1), 12),
        crossed.torus_sample([[3]], (2,), 8),
        crossed.rotation_sample(1, 3, [[2, 0], [0, 2]], 1, 1, 4),
        crossed.rotation_sample(2, 5, [[2, 0], [0, 3]], 1, 2, 3),
        crossed.uhf_sample(N=2),
        crossed.uhf_sample(r=2, s=2.0, K=1, L=2, N=1, position=1),
        crossed.gasket_sample(4),
        crossed.gasket_sample(3, axis=1),
    ],
    ids=lambda s: s.name,
)
def test_covariance_all_models(smp):
    rep = check_covariance(smp.truncation, smp.blocks_alpha)
    assert rep.defect < 1e-10 and rep.commutant_defect < 1e-10 and rep.passed()


def test_covariance_unit_is_exact():
    T = CovariantTruncation([np.eye(3)] * 5)
    rep = check_covariance(T, [np.eye(3)] * 5)
    assert rep.defect == 0 and rep.commutant_defect == 0


def test_covariance_detects_wrong_alpha():
    smp = crossed.torus_sample([[2, 0], [0, 2]], (1, 0), 6)
    wrong = smp.truncation.blocks  # alpha replaced by the identity map
    assert check_covariance(smp.truncation, wrong).defect > 0.1
    with pytest.raises(ValueError):
        check_covariance(smp.truncation, wrong[:-1])


# crossed Dirac


def test_crossed_dirac_even_zero_D():
    Dx = crossed_dirac(np.zeros((2, 2)), 2, "even", E3)
    assert np.allclose(np.linalg.eigvalsh(Dx), [-2, -1, 0, 0, 1, 2])


def test_crossed_dirac_odd_scalar():
    Dx = crossed_dirac(np.diag([3.0]), 4, "odd")
    expected = sorted(s * math.sqrt(9 + n * n) for n in range(5) for s in (1, -1))
    assert np.allclose(np.linalg.eigvalsh(Dx), expected, atol=1e-12)


def test_crossed_dirac_errors():
    with pytest.raises(ValueError):
        crossed_dirac(np.diag([1.0, 2.0]), 2, "even", np.eye(2))  # does not anticommute
    with pytest.raises(ValueError):
        crossed_dirac(np.diag([1.0, 2.0]), 2, "even")
    with pytest.raises(ValueError):
        crossed_dirac(np.array([[0, 1], [0, 0]]), 2)
    with pytest.raises(ValueError):
        crossed_dirac(np.eye(2), 2, "sideways")


def abs_spectrum(D: np.ndarray) -> np.ndarray:
    return np.sort(np.abs(np.linalg.eigvalsh(D)))


@given(st.integers(0, 2**31 - 1), st.integers(1, 4), st.integers(1, 5))
def test_odd_crossed_spectrum_matches_tensor(seed, d, N):
    D = random_hermitian(np.random.default_rng(seed), d)
    S = WeightedSpectrum(np.abs(np.linalg.eigvalsh(D)), np.ones(d))
    T = tensor_spectrum(S, nat_spectrum(N))
    assert np.allclose(abs_spectrum(crossed_dirac(D, N)), np.repeat(T.values, 2), atol=1e-9)


@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 5))
def test_even_crossed_spectrum_matches_tensor(seed, d, N):
    h = random_hermitian(np.random.default_rng(seed), d)
    D = np.kron(np.array([[0, 1], [0, 0]]), h) + np.kron(np.array([[0, 0], [1, 0]]), h.conj().T)
    gamma = np.kron(E3, np.eye(d))
    S = WeightedSpectrum(np.abs(np.linalg.eigvalsh(D)), np.ones(2 * d))
    T = tensor_spectrum(S, nat_spectrum(N))
    assert np.allclose(abs_spectrum(crossed_dirac(D, N, "even", gamma)), T.values, atol=1e-9)


# commutator structure


@given(st.integers(0, 2**31 - 1), st.integers(1, 4), st.integers(1, 6), st.sampled_from(["odd", "even"]))
def test_commutator_structure_random(seed, d, N, parity):
    rng = np.random.default_rng(seed)
    blocks = [random_hermitian(rng, d) for _ in range(N + 1)]
    T = CovariantTruncation(blocks)
    D = random_hermitian(rng, d)
    gamma = None
    if parity == "even":
        # graded doubling so a grading exists
        z = np.zeros((d, d))
        D = np.block([[z, D], [D.conj().T, z]])
        gamma = np.kron(E3, np.eye(d))
        T = CovariantTruncation([np.kron(np.eye(2), b) for b in blocks])
    cn = crossed_norms(T, D, parity, gamma)
    assert cn.shift_commutator <= 1 + 1e-12
    assert cn.pi_commutator == pytest.approx(cn.block_max, rel=1e-9)
    assert cn.block_max == max(cn.block_norms)


def test_shift_commutator_is_exactly_one():
    T = CovariantTruncation([np.eye(2)] * 4)
    assert crossed_norms(T, np.diag([1.0, -1.0])).shift_commutator == pytest.approx(1, abs=1e-12)
    assert crossed_norms(T, E1, "even", E3).shift_commutator == pytest.approx(1, abs=1e-12)


# Lip probes


def test_lip_probe_examples():
    k = (1, 2)
    B = torus.CoveringMatrix.from_rows([[2, 0], [0, 2]])
    base = torus.mode_commutator_norm(k)
    probe = lip_probe(
        lambda n: torus.lip_inequality_check(B, torus.TorusElement.mode(k), n).norms[-1],
        8,
        lambda n: B.inverse_power_norm(n) * base,
        "torus",
        "e_(1,2)",
    )
    assert probe.norms == pytest.approx([base * 2.0**-n for n in range(9)], rel=1e-12)
    assert probe.sup == pytest.approx(base) and probe.bounded
    d = json.loads(probe.to_json())
    assert set(d) == {"model", "element", "horizon", "norms", "sup", "envelope", "bounded"}
    assert d["horizon"] == 8
    with pytest.raises(ValueError):
        lip_probe(lambda n: 1.0, 0)


def test_lip_probe_without_envelope_and_violation():
    assert lip_probe(lambda n: 1.0, 3).bounded is None
    assert lip_probe(lambda n: 2.0**n, 3, lambda n: 1.0).bounded is False


def test_lip_probe_uhf_ratio():
    smp = crossed.uhf_sample(s=2.0, K=2, L=1, N=2)
    norms = [operator_norm(commutator(smp.D, b)) for b in smp.truncation.blocks]
    probe = lip_probe(lambda n: norms[n], 2)
    assert [probe.norms[i + 1] / probe.norms[i] for i in range(2)] == pytest.approx([0.25, 0.25], rel=1e-12)
