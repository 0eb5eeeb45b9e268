import math

import numpy as np
import pytest

from qsentiment import qsim
from qsentiment.errors import DatasetError, StructureError
from qsentiment.featmap import FeatureMapConfig, feature_state
from qsentiment.qml import (AdamState, VqcModel, adam_step, build_real_amplitudes, load_kernel_csv,
                            n_ansatz_params, quantum_kernel_matrix, save_kernel_csv, vqc_expectations,
                            vqc_forward, vqc_gradient, vqc_loss, vqc_predict, vqc_predict_batch, vqc_train)

from oracles import adam_reference, circuit_matrix, parity_operator


# --- kernel -------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 4])
def test_gram_properties(n, backend):
    rng = np.random.default_rng(n)
    cfg = FeatureMapConfig(n)
    for _ in range(3):
        X = rng.uniform(0, 2 * math.pi, size=(8, n))
        K = quantum_kernel_matrix(X, cfg=cfg)
        np.testing.assert_allclose(K, K.T, atol=1e-12)
        np.testing.assert_allclose(np.diag(K), 1.0, atol=1e-12)
        assert np.linalg.eigvalsh(K).min() >= -1e-8
        assert (K >= 0).all() and (K <= 1).all()


def test_gram_matches_explicit_overlaps(backend):
    rng = np.random.default_rng(2)
    cfg = FeatureMapConfig(3, entanglement="full")
    A = rng.uniform(0, 2 * math.pi, size=(4, 3))
    B = rng.uniform(0, 2 * math.pi, size=(5, 3))
    K = quantum_kernel_matrix(A, B, cfg)
    assert K.shape == (4, 5)
    for i in range(4):
        for j in range(5):
            assert K[i, j] == pytest.approx(abs(np.vdot(feature_state(A[i], cfg), feature_state(B[j], cfg))) ** 2,
                                            abs=1e-12)


def test_single_qubit_cosine_closed_form(backend):
    cfg = FeatureMapConfig(1, reps=1)
    a = np.linspace(0, 2 * math.pi, 9)[:, None]
    b = np.linspace(0.3, 6.0, 7)[:, None]
    K = quantum_kernel_matrix(a, b, cfg)
    np.testing.assert_allclose(K, np.cos(a - b.T) ** 2, atol=1e-12)


def test_kernel_permutation_equivariance():
    rng = np.random.default_rng(9)
    cfg = FeatureMapConfig(2)
    X = rng.uniform(0, 2 * math.pi, size=(6, 2))
    perm = rng.permutation(6)
    np.testing.assert_allclose(quantum_kernel_matrix(X[perm], cfg=cfg),
                               quantum_kernel_matrix(X, cfg=cfg)[np.ix_(perm, perm)], atol=1e-12)


def test_kernel_ignores_global_phase():
    cfg = FeatureMapConfig(2)
    a, b = feature_state([0.4, 1.3], cfg), feature_state([2.0, 5.1], cfg)
    k = abs(np.vdot(a, b)) ** 2
    assert abs(np.vdot(np.exp(0.7j) * a, np.exp(-2.1j) * b)) ** 2 == pytest.approx(k, abs=1e-14)
    assert quantum_kernel_matrix([[0.4, 1.3]], [[2.0, 5.1]], cfg)[0, 0] == pytest.approx(k, abs=1e-12)


def test_shot_kernel_is_unbiased_and_seeded():
    rng = np.random.default_rng(4)
    cfg = FeatureMapConfig(2)
    X = rng.uniform(0, 2 * math.pi, size=(5, 2))
    exact = quantum_kernel_matrix(X, cfg=cfg)
    noisy = quantum_kernel_matrix(X, cfg=cfg, shots=20000, seed=1)
    np.testing.assert_array_equal(noisy, quantum_kernel_matrix(X, cfg=cfg, shots=20000, seed=1))
    np.testing.assert_array_equal(noisy, noisy.T)
    np.testing.assert_array_equal(np.diag(noisy), 1.0)
    sigma = np.sqrt(exact * (1 - exact) / 20000)
    assert (np.abs(noisy - exact) <= 5 * sigma + 1e-12).all()


def test_kernel_csv_round_trip(tmp_path):
    K = quantum_kernel_matrix(np.random.default_rng(0).uniform(0, 6, size=(4, 2)), cfg=FeatureMapConfig(2))
    save_kernel_csv(K, tmp_path / "k.csv")
    np.testing.assert_array_equal(load_kernel_csv(tmp_path / "k.csv"), K)


def test_kernel_requires_config():
    with pytest.raises(StructureError):
        quantum_kernel_matrix(np.zeros((2, 2)))


# --- ansatz and expectations ----------------------------------------------------

def test_ansatz_structure():
    assert n_ansatz_params(3, 2) == 9
    circ = build_real_amplitudes(3, 2, np.arange(9.0))
    kinds = [op.kind for op in circ.ops]
    assert kinds == ["RY"] * 3 + ["CNOT"] * 2 + ["RY"] * 3 + ["CNOT"] * 2 + ["RY"] * 3
    with pytest.raises(StructureError):
        build_real_amplitudes(3, 2, np.zeros(8))


def test_ansatz_amplitudes_are_real():
    theta = np.random.default_rng(1).uniform(-3, 3, 12)
    psi = qsim.run(build_real_amplitudes(3, 3, theta))
    np.testing.assert_allclose(psi.imag, 0.0, atol=1e-14)


def _dense_expectation(x, model):
    cfg = model.feature_map
    psi = feature_state(x, cfg)
    gates = [(op.kind, op.target, op.control, op.angle)
             for op in build_real_amplitudes(cfg.n_qubits, model.layers, model.theta).ops]
    psi = circuit_matrix(cfg.n_qubits, gates) @ psi
    return np.vdot(psi, parity_operator(cfg.n_qubits) @ psi).real


@pytest.mark.parametrize("n", [1, 2, 3])
def test_expectation_matches_dense_oracle(n, backend):
    rng = np.random.default_rng(n)
    model = VqcModel(rng.uniform(-math.pi, math.pi, n_ansatz_params(n, 2)), FeatureMapConfig(n), layers=2)
    X = rng.uniform(0, 2 * math.pi, size=(4, n))
    e = vqc_expectations(X, model)
    for x, got in zip(X, e):
        assert got == pytest.approx(_dense_expectation(x, model), abs=1e-12)
        assert vqc_forward(x, model) == pytest.approx(got, abs=1e-12)


def test_forward_with_shots_is_close():
    model = VqcModel(np.full(6, 0.4), FeatureMapConfig(2), layers=2)
    x = np.array([1.0, 2.5])
    exact = vqc_forward(x, model)
    est = vqc_forward(x, model, shots=40000, seed=3)
    assert abs(est - exact) < 5 * math.sqrt((1 - exact ** 2) / 40000) + 1e-9


# --- gradients and ADAM ---------------------------------------------------------

def _central_difference(X, y, model, h=1e-4):
    g = np.zeros_like(model.theta)
    for i in range(g.shape[0]):
        up, down = model.theta.copy(), model.theta.copy()
        up[i] += h
        down[i] -= h
        g[i] = (vqc_loss(X, y, model.with_theta(up)) - vqc_loss(X, y, model.with_theta(down))) / (2 * h)
    return g


@pytest.mark.parametrize("n", [1, 2, 3])
def test_parameter_shift_matches_finite_differences(n, backend):
    rng = np.random.default_rng(30 + n)
    for _ in range(3):
        model = VqcModel(rng.uniform(-math.pi, math.pi, n_ansatz_params(n, 2)), FeatureMapConfig(n), layers=2)
        X = rng.uniform(0, 2 * math.pi, size=(3, n))
        y = rng.integers(0, 2, 3)
        ps = vqc_gradient(X, y, model)
        fd = _central_difference(X, y, model)
        assert np.linalg.norm(ps - fd) / np.linalg.norm(fd) < 1e-6


def test_adam_matches_reference():
    rng = np.random.default_rng(0)
    theta0 = rng.normal(size=5)
    grads = rng.normal(size=(20, 5))
    expected = adam_reference(theta0, grads, lr=0.05)
    theta, state = theta0, AdamState.zeros(5)
    for t, g in enumerate(grads):
        theta, state = adam_step(theta, g, state, lr=0.05)
        np.testing.assert_allclose(theta, expected[t], rtol=0, atol=1e-14)
    assert state.t == 20


def test_adam_first_step_moves_by_lr():
    # bias correction makes the first step lr * sign(g) up to eps
    theta, state = adam_step(np.zeros(3), np.array([2.0, -0.5, 1e-3]), AdamState.zeros(3), lr=0.01)
    np.testing.assert_allclose(theta, [-0.01, 0.01, -0.01], rtol=1e-4)
    assert state.t == 1


def test_adam_does_not_mutate():
    st = AdamState.zeros(2)
    theta = np.ones(2)
    adam_step(theta, np.ones(2), st)
    assert (theta == 1).all() and (st.m == 0).all()


def test_adam_shape_mismatch():
    with pytest.raises(ValueError):
        adam_step(np.zeros(2), np.zeros(3), AdamState.zeros(2))


# --- training and prediction -----------------------------------------------------

def _teacher_task(seed, n=2, points=40):
    rng = np.random.default_rng(seed)
    cfg = FeatureMapConfig(n)
    teacher = VqcModel(rng.uniform(-math.pi, math.pi, n_ansatz_params(n, 3)), cfg, layers=3)
    X = rng.uniform(0, 2 * math.pi, size=(points, n))
    return X, vqc_predict_batch(X, teacher), cfg


def test_teacher_student_learnable(backend):
    X, y, cfg = _teacher_task(0)
    model = vqc_train(X, y, cfg, layers=3, iterations=200, seed=1, lr=0.05)
    assert np.mean(vqc_predict_batch(X, model) == y) >= 0.9
    assert model.best_so_far[-1] <= model.loss_history[0]


def test_training_is_deterministic():
    X, y, cfg = _teacher_task(3, points=10)
    a = vqc_train(X, y, cfg, iterations=5, seed=7)
    b = vqc_train(X, y, cfg, iterations=5, seed=7)
    np.testing.assert_array_equal(a.theta, b.theta)
    assert a.loss_history == b.loss_history


def test_zero_iterations_returns_initial_theta():
    X, y, cfg = _teacher_task(4, points=6)
    model = vqc_train(X, y, cfg, layers=3, iterations=0, seed=11)
    np.testing.assert_array_equal(model.theta, np.random.default_rng(11).uniform(-math.pi, math.pi, 8))
    assert model.loss_history == []
    assert set(vqc_predict_batch(X, model)) <= {0, 1}


def test_returned_theta_has_lowest_recorded_loss():
    X, y, cfg = _teacher_task(5, points=12)
    seen = []
    model = vqc_train(X, y, cfg, iterations=15, seed=2, callback=lambda it, loss: seen.append(loss))
    assert seen == model.loss_history
    assert vqc_loss(X, y, model) == pytest.approx(min(seen), abs=1e-12)


def test_prediction_tie_goes_to_one():
    # theta = 0 on one qubit with x = pi/4: state is (|0> + i|1>)/sqrt2 up to phase, so <Z> = 0
    model = VqcModel(np.zeros(2), FeatureMapConfig(1, reps=1), layers=1)
    x = np.array([math.pi / 4])
    assert abs(vqc_forward(x, model)) < 1e-15
    assert vqc_predict(x, model) == 1
    assert vqc_predict_batch(x[None, :], model)[0] == 1


def test_labels_validated():
    cfg = FeatureMapConfig(1)
    with pytest.raises(DatasetError):
        vqc_train(np.zeros((2, 1)), [0, 2], cfg, iterations=1)
    with pytest.raises(DatasetError):
        vqc_train(np.zeros((2, 1)), [0, 1, 1], cfg, iterations=1)


def test_model_round_trip():
    X, y, cfg = _teacher_task(6, points=6)
    model = vqc_train(X, y, cfg, iterations=3, seed=0)
    again = VqcModel.from_dict(model.to_dict())
    np.testing.assert_array_equal(again.theta, model.theta)
    assert again.loss_history == model.loss_history and again.feature_map == cfg
