"""Density-matrix algebra: validation, reductions, entropies, purification."""

import math

import numpy as np
import pytest

from discordkit import (
    InvalidStateError,
    PureStateVector,
    QState,
    conditional_entropy,
    partial_trace,
    permute_subsystems,
    purify,
    purity,
    spectrum,
    state_from_json,
    state_to_json,
    tensor,
    validate,
    von_neumann_entropy,
)
from discordkit.states import example3_state, random_mixed, werner_2qubit_example4

from conftest import bell_state, bell_vector, ghz_vector, haar_unitary


def test_validate_flags_residuals():
    diag = validate(np.eye(2) / 2.0, (2,))
    assert diag.ok and diag.hermiticity_error < 1e-12

    trace2 = validate(np.eye(2), (2,))
    assert not trace2.trace_ok and trace2.hermitian_ok

    bad_psd = validate(np.diag([1.0 + 1e-6, -1e-6]), (2,))
    assert not bad_psd.psd_ok and bad_psd.trace_ok

    bell = validate(bell_state().matrix, (2, 2))
    assert bell.hermiticity_error < 1e-12
    assert bell.trace_error < 1e-12
    assert bell.min_eigenvalue > -1e-12


def test_validate_dimension_mismatch():
    with pytest.raises(ValueError):
        validate(np.eye(4) / 4.0, (2, 3))


def test_qstate_rejects_invalid():
    with pytest.raises(InvalidStateError):
        QState((2,), np.array([[0.5, 0.5], [-0.5, 0.5]]))  # not Hermitian
    with pytest.raises(InvalidStateError):
        QState((2,), np.eye(2))  # trace 2
    with pytest.raises(InvalidStateError):
        QState((2,), np.diag([1.0 + 1e-6, -1e-6]))  # eigenvalue -1e-6


def test_qstate_matrix_is_immutable():
    state = bell_state()
    with pytest.raises(ValueError):
        state.matrix[0, 0] = 1.0


def test_pure_vector_norm_check():
    with pytest.raises(InvalidStateError):
        PureStateVector((2,), np.array([1.0, 1.0]))
    vec = bell_vector()
    assert purity(vec.to_density()) == pytest.approx(1.0, abs=1e-9)


def test_tensor_identity_and_embedding(rng):
    half = QState((2,), np.eye(2) / 2.0)
    prod = tensor(half, half)
    assert prod.dims == (2, 2)
    np.testing.assert_allclose(prod.matrix, np.eye(4) / 4.0, atol=1e-15)

    sigma = random_mixed((2,), 2, 5)
    p0 = QState((2,), np.diag([1.0, 0.0]))
    embedded = tensor(p0, sigma)
    np.testing.assert_allclose(embedded.matrix[:2, :2], sigma.matrix, atol=1e-15)
    np.testing.assert_allclose(embedded.matrix[2:, 2:], 0.0, atol=1e-15)


def test_tensor_partial_trace_roundtrip():
    # tracing out the second factor recovers the first for random pairs
    for i in range(100):
        a = random_mixed((2,), 2, 100 + i)
        b = random_mixed((3,), 3, 200 + i)
        joint = tensor(a, b)
        back = partial_trace(joint, (0,))
        np.testing.assert_allclose(back.matrix, a.matrix, atol=1e-12)
        np.testing.assert_allclose(
            partial_trace(joint, (1,)).matrix, b.matrix, atol=1e-12
        )


def test_partial_trace_reference_values():
    assert np.allclose(partial_trace(bell_state(), (0,)).matrix, np.eye(2) / 2.0)
    ex3 = example3_state()
    np.testing.assert_allclose(partial_trace(ex3, (1,)).matrix, np.eye(2) / 2.0, atol=1e-12)
    np.testing.assert_allclose(partial_trace(ex3, (0,)).matrix, np.eye(4) / 4.0, atol=1e-12)


def test_partial_trace_preserves_trace_and_rejects_bad_keep():
    state = random_mixed((2, 2, 2), 8, 3)
    reduced = partial_trace(state, (0, 2))
    assert reduced.dims == (2, 2)
    assert np.trace(reduced.matrix) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        partial_trace(state, ())
    with pytest.raises(ValueError):
        partial_trace(state, (3,))


def test_entropy_reference_values():
    assert von_neumann_entropy(QState((2,), np.eye(2) / 2.0)) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(bell_state()) == pytest.approx(0.0, abs=1e-12)
    ex3 = example3_state()
    assert von_neumann_entropy(partial_trace(ex3, (0,))) == pytest.approx(2.0, abs=1e-12)
    assert von_neumann_entropy(ex3) == pytest.approx(1.0, abs=1e-12)
    # hand eigendecomposition: {1/6, 1/6, 1/6, 1/2}
    expected = -3.0 * (1.0 / 6.0) * math.log2(1.0 / 6.0) - 0.5 * math.log2(0.5)
    assert von_neumann_entropy(werner_2qubit_example4()) == pytest.approx(expected, abs=1e-12)
    assert abs(expected - 1.7925) < 1e-4


def test_entropy_range():
    for i in range(20):
        state = random_mixed((2, 3), 4, 400 + i)
        s = von_neumann_entropy(state)
        assert 0.0 <= s <= math.log2(6) + 1e-12


def test_conditional_entropy():
    g = np.random.Generator(np.random.Philox(key=np.array([9, 0], dtype=np.uint64)))
    sigma_a = random_mixed((2,), 2, 11)
    sigma_b = random_mixed((2,), 2, 12)
    prod = tensor(sigma_a, sigma_b)
    assert conditional_entropy(prod, 1, 0) == pytest.approx(
        von_neumann_entropy(sigma_b), abs=1e-10
    )
    assert conditional_entropy(bell_state(), 1, 0) == pytest.approx(-1.0, abs=1e-10)
    assert conditional_entropy(example3_state(), 1, 0) == pytest.approx(-1.0, abs=1e-10)
    with pytest.raises(ValueError):
        conditional_entropy(bell_state(), 0, 0)


def test_purity_values():
    assert purity(bell_state()) == pytest.approx(1.0, abs=1e-12)
    assert purity(QState((2, 2), np.eye(4) / 4.0)) == pytest.approx(0.25, abs=1e-12)
    assert purity(example3_state()) == pytest.approx(0.5, abs=1e-12)


def test_spectrum_descending_and_reconstruction():
    for i in range(20):
        state = random_mixed((2, 2), 3, 500 + i)
        sp = spectrum(state)
        assert np.all(np.diff(sp.eigenvalues) <= 1e-15)
        assert sp.eigenvalues.sum() == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(sp.reconstruct(), state.matrix, atol=1e-8)
        assert sp.rank == 3
        # canonical phase: first sizable component real positive
        for k in range(sp.eigenvectors.shape[1]):
            col = sp.eigenvectors[:, k]
            pivot = col[np.flatnonzero(np.abs(col) > 1e-8)[0]]
            assert abs(pivot.imag) < 1e-12 and pivot.real > 0


def test_purify_pure_state_has_trivial_environment():
    pure = bell_state()
    vec = purify(pure)
    assert vec.dims == (2, 2, 1)
    np.testing.assert_allclose(
        partial_trace(vec.to_density(), (0, 1)).matrix, pure.matrix, atol=1e-9
    )


def test_purify_maximally_mixed_qubit_is_maximally_entangled():
    vec = purify(QState((2,), np.eye(2) / 2.0))
    assert vec.dims == (2, 2)
    rho = vec.to_density()
    np.testing.assert_allclose(partial_trace(rho, (0,)).matrix, np.eye(2) / 2.0, atol=1e-12)
    assert von_neumann_entropy(partial_trace(rho, (1,))) == pytest.approx(1.0, abs=1e-9)


def test_purify_example3_matches_reference_up_to_environment_unitary():
    # reference purification (psi_0 |0> + psi_1 |1>)/sqrt(2), environment last
    psi0 = np.zeros(8, dtype=complex)
    psi0[0] = psi0[5] = 1.0 / np.sqrt(2.0)
    psi1 = np.zeros(8, dtype=complex)
    psi1[2] = psi1[7] = 1.0 / np.sqrt(2.0)
    ref = np.zeros(16, dtype=complex)
    ref[0::2] = psi0 / np.sqrt(2.0)
    ref[1::2] = psi1 / np.sqrt(2.0)
    ref_vec = PureStateVector((4, 2, 2), ref)

    mine = purify(example3_state())
    assert mine.dims == (4, 2, 2)
    m1 = mine.amplitudes.reshape(8, 2)
    m2 = ref_vec.amplitudes.reshape(8, 2)
    u = np.linalg.pinv(m2) @ m1
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-9)
    np.testing.assert_allclose(m2 @ u, m1, atol=1e-9)
    for keep in [(0, 1), (0,), (1,), (2,)]:
        np.testing.assert_allclose(
            partial_trace(mine.to_density(), keep).matrix,
            partial_trace(ref_vec.to_density(), keep).matrix,
            atol=1e-9,
        )


def test_purify_roundtrip_on_random_states():
    for i in range(200):
        dims = ((2, 2), (2, 3))[i % 2]
        rank = 1 + i % 4
        state = random_mixed(dims, rank, 700 + i)
        vec = purify(state)
        assert vec.dims == dims + (rank,)
        back = partial_trace(vec.to_density(), tuple(range(len(dims))))
        assert np.max(np.abs(back.matrix - state.matrix)) <= 1e-9


def test_permute_subsystems():
    state = random_mixed((2, 3, 2), 6, 17)
    phi = permute_subsystems(state, (2, 0, 1))
    assert phi.dims == (2, 2, 3)
    assert von_neumann_entropy(phi) == pytest.approx(von_neumann_entropy(state), abs=1e-12)
    back = permute_subsystems(phi, (1, 2, 0))
    np.testing.assert_allclose(back.matrix, state.matrix, atol=1e-14)
    np.testing.assert_allclose(
        partial_trace(phi, (0,)).matrix, partial_trace(state, (2,)).matrix, atol=1e-12
    )
    with pytest.raises(ValueError):
        permute_subsystems(state, (0, 0, 1))


def test_entropy_unitary_invariance(rng):
    for i in range(20):
        state = random_mixed((2, 2), 4, 900 + i)
        u = haar_unitary(rng, 4)
        rotated = QState((2, 2), u @ state.matrix @ u.conj().T)
        assert von_neumann_entropy(rotated) == pytest.approx(
            von_neumann_entropy(state), abs=1e-9
        )


def test_araki_lieb_and_subadditivity():
    for i in range(50):
        state = random_mixed((2, 2), 1 + i % 4, 1000 + i)
        s_a = von_neumann_entropy(partial_trace(state, (0,)))
        s_b = von_neumann_entropy(partial_trace(state, (1,)))
        s_ab = von_neumann_entropy(state)
        assert s_ab <= s_a + s_b + 1e-9
        assert abs(s_a - s_b) <= s_ab + 1e-9


def test_pure_state_complementarity_and_conditional_identity():
    for i in range(30):
        base = random_mixed((2, 2), 2, 1100 + i)
        abc = purify(base).to_density()
        s = {
            key: von_neumann_entropy(partial_trace(abc, keep))
            for key, keep in {
                "a": (0,), "b": (1,), "c": (2,),
                "ab": (0, 1), "ac": (0, 2), "bc": (1, 2),
            }.items()
        }
        assert s["ab"] == pytest.approx(s["c"], abs=1e-9)
        assert s["ac"] == pytest.approx(s["b"], abs=1e-9)
        assert s["bc"] == pytest.approx(s["a"], abs=1e-9)
        # strong-subadditivity saturation on pure states
        lhs = conditional_entropy(abc, 1, 0) + conditional_entropy(abc, 1, 2)
        assert abs(lhs) <= 1e-9


def test_state_json_roundtrip():
    state = random_mixed((2, 2), 3, 77)
    again = state_from_json(state_to_json(state))
    assert again.dims == state.dims
    np.testing.assert_allclose(again.matrix, state.matrix, atol=0)


def test_state_json_errors():
    with pytest.raises(InvalidStateError, match="dims"):
        state_from_json({"matrix": []})
    with pytest.raises(InvalidStateError, match="matrix"):
        state_from_json({"dims": [2]})
    with pytest.raises(InvalidStateError):
        state_from_json({"dims": [2], "matrix": [[1.0, 0.0], [0.0, 0.0]]})
