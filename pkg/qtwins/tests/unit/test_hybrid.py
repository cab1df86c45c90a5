"""Unit tests for the hybrid model, its gradients and training."""

import pickle

import numpy as np
import pytest
import torch
from hybrid import (
    PARAMETER_NAMES,
    Dataset,
    DatasetError,
    DivergenceError,
    HybridModel,
    LossMode,
    ParameterShift,
    QuantumLayer,
    TrainConfig,
    forward,
    generate_dataset,
    init_model,
    load_checkpoint,
    load_dataset,
    loss_and_gradients,
    predict,
    quantum_gradient,
    save_checkpoint,
    save_dataset,
    train,
)

H = 1e-5


def _zero_model(hidden=4, m=3, loss=LossMode.MSE):
    model = HybridModel(hidden, m, loss=loss)
    return model.with_arrays({name: np.zeros_like(value) for name, value in model.parameter_arrays().items()})


def _assert_same_parameters(a: HybridModel, b: HybridModel):
    theirs = b.parameter_arrays()
    for name, value in a.parameter_arrays().items():
        np.testing.assert_array_equal(value, theirs[name], err_msg=name)


def _reference_loss(model, xs, ys, layer):
    """Loss computed directly from a forward pass."""
    mean, variance = predict(model, xs, layer=layer)
    residual = mean - ys
    if model.loss is LossMode.MSE:
        return float(np.mean(residual**2))
    return float(np.mean(0.5 * (np.log(variance) + residual**2 / variance)))


def _finite_difference(model, xs, ys, layer):
    grads = {}
    for name, value in model.parameter_arrays().items():
        grad = np.zeros_like(value)
        for idx in np.ndindex(value.shape):
            plus, minus = value.copy(), value.copy()
            plus[idx] += H
            minus[idx] -= H
            grad[idx] = (
                _reference_loss(model.with_arrays({name: plus}), xs, ys, layer)
                - _reference_loss(model.with_arrays({name: minus}), xs, ys, layer)
            ) / (2 * H)
        grads[name] = grad
    return grads


class TestGenerateDataset:
    """Tests for the synthetic cubic dataset."""

    def test_noiseless_is_cubic(self):
        """sigma = 0 gives y = x^3 exactly."""
        dataset = generate_dataset(50, (-4.0, 4.0), 0.0, seed=1)
        assert all(y == x**3 for x, y in zip(dataset.x, dataset.y, strict=True))
        assert all(-4.0 <= x <= 4.0 for x in dataset.x)

    def test_deterministic(self):
        """Same seed, same dataset."""
        assert generate_dataset(20, seed=5) == generate_dataset(20, seed=5)
        assert generate_dataset(20, seed=5) != generate_dataset(20, seed=6)

    def test_scales(self):
        """Scales are max|x| and max|y|."""
        dataset = generate_dataset(20, seed=2)
        assert dataset.x_scale == max(abs(x) for x in dataset.x)
        assert dataset.y_scale == max(abs(y) for y in dataset.y)

    def test_noise_level(self):
        """Residual std over 10^4 points is close to sigma."""
        dataset = generate_dataset(10_000, (-4.0, 4.0), 3.0, seed=7)
        residual = np.array(dataset.y) - np.array(dataset.x) ** 3
        assert 2.9 <= residual.std(ddof=1) <= 3.1

    @pytest.mark.parametrize("kwargs", [{"n": 0}, {"domain": (1.0, 1.0)}, {"domain": (2.0, -2.0)}, {"noise_sigma": -1}])
    def test_invalid_parameters(self, kwargs):
        """Invalid sizes, domains and noise levels are rejected."""
        with pytest.raises(DatasetError):
            generate_dataset(**kwargs)

    def test_save_and_load(self, tmp_path):
        """CSV plus sidecar reloads the same dataset."""
        dataset = generate_dataset(20, seed=3)
        sidecar = save_dataset(dataset, tmp_path / "train.csv")
        assert sidecar.name == "train.json"
        assert (tmp_path / "train.csv").read_text().startswith("x,y\n")
        assert load_dataset(tmp_path / "train.csv") == dataset

    def test_dataset_invariants(self):
        """Lengths must match and scales be positive."""
        with pytest.raises(ValueError):
            Dataset(x=[1.0], y=[1.0, 2.0], x_scale=1.0, y_scale=1.0)
        with pytest.raises(ValueError):
            Dataset(x=[], y=[], x_scale=1.0, y_scale=1.0)
        with pytest.raises(ValueError):
            Dataset(x=[1.0], y=[1.0], x_scale=0.0, y_scale=1.0)


class TestModel:
    """Tests for model construction and the forward pass."""

    def test_init_shapes(self):
        """Default layer shapes for m = 3."""
        dataset = generate_dataset(20, seed=0)
        model = init_model(dataset, TrainConfig(seed=4))
        arrays = model.parameter_arrays()
        assert tuple(arrays) == PARAMETER_NAMES
        assert {name: value.shape for name, value in arrays.items()} == {
            "thetas": (3,),
            "hidden1.weight": (100, 1),
            "hidden1.bias": (100,),
            "hidden2.weight": (100, 100),
            "hidden2.bias": (100,),
            "to_angles.weight": (3, 100),
            "to_angles.bias": (3,),
            "head.weight": (1, 3),
            "head.bias": (1,),
        }
        assert all(value.dtype == np.float64 for value in arrays.values())
        assert np.all(np.abs(arrays["hidden2.weight"]) <= 1 / np.sqrt(100))
        assert np.all(np.abs(arrays["thetas"]) <= np.pi)
        assert model.is_finite()

    def test_init_deterministic(self):
        """Initialization depends only on the seed."""
        dataset = generate_dataset(20, seed=0)
        a = init_model(dataset, TrainConfig(seed=4))
        b = init_model(dataset, TrainConfig(seed=4))
        c = init_model(dataset, TrainConfig(seed=5))
        _assert_same_parameters(a, b)
        assert not np.array_equal(a.parameter_arrays()["hidden2.weight"], c.parameter_arrays()["hidden2.weight"])

    def test_zero_network(self):
        """All-zero parameters predict 0 everywhere."""
        model = _zero_model()
        for x in (-3.0, 0.0, 0.5, 10.0):
            assert forward(model, x).mean == 0.0

    def test_zero_noise_twin_bitwise(self, zero_noise_twin):
        """A zero-noise twin gives exactly the noiseless outputs."""
        model = init_model(generate_dataset(20, seed=0), TrainConfig(seed=2, hidden_width=8))
        xs = np.linspace(-5, 5, 11)
        noisy, _ = predict(model, xs, zero_noise_twin)
        clean, _ = predict(model, xs, None)
        np.testing.assert_array_equal(noisy, clean)

    def test_noise_changes_outputs(self, noisy_twin):
        """A noisy twin moves the predictions."""
        model = init_model(generate_dataset(20, seed=0), TrainConfig(seed=2, hidden_width=8))
        xs = np.linspace(-5, 5, 5)
        assert not np.allclose(predict(model, xs, noisy_twin)[0], predict(model, xs)[0])

    def test_nll_variance_output(self):
        """gaussian-nll models also predict a floored variance."""
        model = _zero_model(loss=LossMode.GAUSSIAN_NLL)
        prediction = forward(model, 1.0)
        assert prediction.variance == pytest.approx(1.0)
        floored = model.with_arrays({"head.bias": np.array([0.0, -100.0])})
        assert forward(floored, 1.0).variance == 1e-6

    def test_non_finite_input(self):
        """NaN and inf inputs are rejected."""
        with pytest.raises(DatasetError):
            forward(_zero_model(), float("nan"))
        with pytest.raises(DatasetError):
            predict(_zero_model(), [0.0, float("inf")])

    def test_shape_validation(self):
        """Parameter shapes must be consistent."""
        with pytest.raises(ValueError, match="shapes"):
            _zero_model().with_arrays({"to_angles.weight": np.zeros((2, 4))})
        arrays = _zero_model().parameter_arrays()
        del arrays["head.bias"]
        with pytest.raises(ValueError, match="head.bias"):
            HybridModel.from_arrays(arrays)

    def test_with_arrays_is_independent(self):
        """Copies share no storage with the original."""
        model = _zero_model()
        copy = model.with_arrays()
        with torch.no_grad():
            copy.thetas.add_(1.0)
        np.testing.assert_array_equal(model.parameter_arrays()["thetas"], 0.0)

    def test_pickle_round_trip(self, small_dataset, noisy_twin):
        """Models cross process boundaries bit-exactly."""
        model = init_model(small_dataset, TrainConfig(seed=6, hidden_width=5, loss=LossMode.GAUSSIAN_NLL))
        restored = pickle.loads(pickle.dumps(model))
        assert isinstance(restored, HybridModel)
        assert restored.hyperparameters() == model.hyperparameters()
        _assert_same_parameters(model, restored)
        xs = np.linspace(-1, 1, 3)
        for ours, theirs in zip(predict(model, xs, noisy_twin), predict(restored, xs, noisy_twin), strict=True):
            np.testing.assert_array_equal(ours, theirs)

    def test_predict_is_deterministic(self):
        """Predictions run with deterministic torch kernels."""
        predict(_zero_model(), [0.0])
        assert torch.are_deterministic_algorithms_enabled()


class TestQuantumGradient:
    """Tests for parameter-shift Jacobians."""

    def test_single_qubit_reduction(self):
        """Noiseless m=1: z = cos(a + t) and dz/dt = -sin(a + t)."""
        for a, t in [(0.3, 0.4), (-1.2, 2.5), (3.0, -0.1)]:
            jac = quantum_gradient([a], [t])
            assert jac.z[0] == pytest.approx(np.cos(a + t), abs=1e-12)
            assert abs(jac.d_thetas[0, 0] + np.sin(a + t)) <= 1e-12
            assert abs(jac.d_angles[0, 0] + np.sin(a + t)) <= 1e-12

    def test_product_state_jacobian(self):
        """Without an entangler only diagonal partials are non-zero."""
        rng = np.random.default_rng(0)
        angles, thetas = rng.uniform(-np.pi, np.pi, 3), rng.uniform(-np.pi, np.pi, 3)
        jac = quantum_gradient(angles, thetas)
        np.testing.assert_allclose(jac.d_thetas, np.diag(-np.sin(angles + thetas)), atol=1e-12)
        np.testing.assert_allclose(jac.d_angles, np.diag(-np.sin(angles + thetas)), atol=1e-12)

    def test_all_zero(self):
        """At the origin every diagonal partial is 0."""
        jac = quantum_gradient(np.zeros(3), np.zeros(3))
        np.testing.assert_allclose(np.diag(jac.d_thetas), 0.0, atol=1e-15)

    @pytest.mark.parametrize("entangle", [False, True])
    def test_matches_finite_difference_on_twin(self, noisy_twin, entangle):
        """Shift-rule partials match central differences on a noisy twin."""
        rng = np.random.default_rng(1)
        layer = QuantumLayer(3, noisy_twin, entangle=entangle)
        for _ in range(5):
            angles, thetas = rng.uniform(-np.pi, np.pi, 3), rng.uniform(-np.pi, np.pi, 3)
            jac = quantum_gradient(angles, thetas, noisy_twin, entangle=entangle)
            for j in range(3):
                step = np.zeros(3)
                step[j] = H
                numeric_t = (layer(angles, thetas + step) - layer(angles, thetas - step)) / (2 * H)
                numeric_a = (layer(angles + step, thetas) - layer(angles - step, thetas)) / (2 * H)
                np.testing.assert_allclose(jac.d_thetas[:, j], numeric_t, atol=1e-4)
                np.testing.assert_allclose(jac.d_angles[:, j], numeric_a, atol=1e-4)

    def test_outputs_bounded(self, noisy_twin):
        """Every z lies in [-1, 1]."""
        rng = np.random.default_rng(2)
        layer = QuantumLayer(3, noisy_twin, entangle=True)
        for _ in range(20):
            z = layer(rng.uniform(-np.pi, np.pi, 3), rng.uniform(-np.pi, np.pi, 3))
            assert np.all(np.abs(z) <= 1 + 1e-9)


class TestParameterShift:
    """Tests for the quantum layer as an autograd function."""

    def test_autograd_rows_match_jacobian(self, noisy_twin):
        """Backpropagating each output gives one row of the shift-rule Jacobian."""
        rng = np.random.default_rng(3)
        angles, thetas = rng.uniform(-np.pi, np.pi, 3), rng.uniform(-np.pi, np.pi, 3)
        layer = QuantumLayer(3, noisy_twin, entangle=True)
        jac = quantum_gradient(angles, thetas, noisy_twin, entangle=True)

        a = torch.tensor(angles[None, :], requires_grad=True)
        t = torch.tensor(thetas, requires_grad=True)
        z = ParameterShift.apply(a, t, layer)
        np.testing.assert_array_equal(z.detach().numpy()[0], jac.z)
        for k in range(3):
            d_a, d_t = torch.autograd.grad(z[0, k], (a, t), retain_graph=True)
            np.testing.assert_allclose(d_a.numpy()[0], jac.d_angles[k], rtol=0, atol=1e-15)
            np.testing.assert_allclose(d_t.numpy(), jac.d_thetas[k], rtol=0, atol=1e-15)

    def test_theta_gradient_sums_over_batch(self):
        """Shared thetas collect the gradient of every batch row."""
        rows = np.array([[0.1, -0.4, 1.3], [2.0, 0.7, -2.2]])
        thetas = np.array([0.5, -1.0, 0.25])
        layer = QuantumLayer(3)
        t = torch.tensor(thetas, requires_grad=True)
        ParameterShift.apply(torch.tensor(rows), t, layer).sum().backward()
        expected = sum(quantum_gradient(row, thetas).d_thetas.sum(axis=0) for row in rows)
        np.testing.assert_allclose(t.grad.numpy(), expected, atol=1e-14)

    def test_non_finite_angles(self):
        """Overflowed angles never reach the simulator."""
        angles = torch.tensor([[0.0, float("nan"), 0.0]])
        with pytest.raises(FloatingPointError):
            ParameterShift.apply(angles, torch.zeros(3, dtype=torch.float64), QuantumLayer(3))


class TestLossAndGradients:
    """Tests for the full-batch loss and its gradient."""

    @pytest.mark.parametrize("loss", [LossMode.MSE, LossMode.GAUSSIAN_NLL])
    @pytest.mark.parametrize("entangle", [False, True])
    def test_noiseless_finite_difference(self, small_dataset, loss, entangle):
        """Every parameter's gradient matches central differences at 1e-5 relative (5 configs)."""
        xs, ys = np.array(small_dataset.x), np.array(small_dataset.y)
        layer = QuantumLayer(3, None, entangle=entangle)
        for seed in range(5):
            config = TrainConfig(seed=seed, hidden_width=4, loss=loss, entangle=entangle)
            model = init_model(small_dataset, config)
            value, grads = loss_and_gradients(model, xs, ys, layer=layer)
            assert value == pytest.approx(_reference_loss(model, xs, ys, layer), rel=1e-12)
            numeric = _finite_difference(model, xs, ys, layer)
            scale = max(np.max(np.abs(g)) for g in grads.values())
            for name in grads:
                np.testing.assert_allclose(grads[name], numeric[name], rtol=1e-5, atol=1e-8 * scale, err_msg=name)

    def test_noisy_finite_difference(self, small_dataset, noisy_twin):
        """Gradients on a noisy twin match central differences at 1e-4 relative."""
        xs, ys = np.array(small_dataset.x), np.array(small_dataset.y)
        layer = QuantumLayer(3, noisy_twin)
        for seed in range(5):
            model = init_model(small_dataset, TrainConfig(seed=seed, hidden_width=4))
            _, grads = loss_and_gradients(model, xs, ys, noisy_twin)
            numeric = _finite_difference(model, xs, ys, layer)
            scale = max(np.max(np.abs(g)) for g in grads.values())
            for name in grads:
                np.testing.assert_allclose(grads[name], numeric[name], rtol=1e-4, atol=1e-7 * scale, err_msg=name)

    def test_gradients_cleared(self, small_dataset):
        """The model is left without accumulated gradients."""
        model = init_model(small_dataset, TrainConfig(seed=1, hidden_width=4))
        loss_and_gradients(model, small_dataset.x, small_dataset.y)
        assert all(p.grad is None for p in model.parameters())

    def test_perfect_predictions(self, small_dataset):
        """Zero residual gives zero loss and zero head gradient."""
        model = init_model(small_dataset, TrainConfig(seed=1, hidden_width=4))
        xs = np.array(small_dataset.x)
        ys, _ = predict(model, xs)
        value, grads = loss_and_gradients(model, xs, ys)
        assert value == 0.0
        np.testing.assert_array_equal(grads["head.weight"], 0.0)
        np.testing.assert_array_equal(grads["head.bias"], 0.0)

    def test_unit_variance_nll_is_half_mse(self, small_dataset):
        """With sigma^2 = 1 the NLL is mse/2 and its gradients are the mse gradients halved."""
        xs, ys = np.array(small_dataset.x), np.array(small_dataset.y)
        mse_model = init_model(small_dataset, TrainConfig(seed=3, hidden_width=4))
        arrays = mse_model.parameter_arrays()
        log_var = -2 * np.log(mse_model.y_scale)
        nll_model = HybridModel.from_arrays(
            {
                **arrays,
                "head.weight": np.vstack([arrays["head.weight"], np.zeros((1, 3))]),
                "head.bias": np.array([arrays["head.bias"][0], log_var]),
            },
            x_scale=mse_model.x_scale,
            y_scale=mse_model.y_scale,
            loss=LossMode.GAUSSIAN_NLL,
        )

        mse, mse_grads = loss_and_gradients(mse_model, xs, ys)
        nll, nll_grads = loss_and_gradients(nll_model, xs, ys)
        assert nll == pytest.approx(mse / 2, abs=1e-12)
        for name in PARAMETER_NAMES[:-2]:
            np.testing.assert_allclose(nll_grads[name], mse_grads[name] / 2, rtol=1e-9, atol=1e-14, err_msg=name)
        for name in ("head.weight", "head.bias"):
            np.testing.assert_allclose(nll_grads[name][0], mse_grads[name][0] / 2, rtol=1e-9, atol=1e-14)

    def test_empty_batch(self):
        """An empty batch is rejected."""
        with pytest.raises(DatasetError):
            loss_and_gradients(_zero_model(), [], [])

    def test_loss_mode_must_match_head(self, small_dataset):
        """The requested loss must match the model's head."""
        with pytest.raises(ValueError):
            loss_and_gradients(_zero_model(), [0.1], [0.2], loss=LossMode.GAUSSIAN_NLL)


class TestTrain:
    """Tests for the Adam training loop."""

    def test_single_epoch(self, small_dataset):
        """epochs = 1 performs exactly one step."""
        model = init_model(small_dataset, TrainConfig(seed=1, hidden_width=4))
        result = train(model, small_dataset, None, TrainConfig(epochs=1, hidden_width=4))
        assert len(result.loss_trace) == 1
        assert not np.array_equal(result.model.parameter_arrays()["thetas"], model.parameter_arrays()["thetas"])

    def test_input_model_untouched(self, small_dataset, small_config):
        """Training returns a new model."""
        model = init_model(small_dataset, small_config)
        before = model.with_arrays()
        result = train(model, small_dataset, None, small_config)
        _assert_same_parameters(model, before)
        assert result.model is not model

    def test_deterministic(self, small_dataset, noisy_twin, small_config):
        """Same inputs give bit-identical parameters."""
        model = init_model(small_dataset, small_config)
        a = train(model, small_dataset, noisy_twin, small_config)
        b = train(model, small_dataset, noisy_twin, small_config)
        assert a.loss_trace == b.loss_trace
        _assert_same_parameters(a.model, b.model)

    def test_cubic_fit_halves_mse(self):
        """300 noiseless epochs on the 20-point cubic at least halve the mse."""
        dataset = generate_dataset(20, (-4.0, 4.0), 3.0, seed=0)
        config = TrainConfig(epochs=300, learning_rate=0.01, seed=0)
        result = train(init_model(dataset, config), dataset, None, config)
        assert len(result.loss_trace) == 300
        final, _ = loss_and_gradients(result.model, dataset.x, dataset.y)
        assert final <= 0.5 * result.loss_trace[0]

    def test_divergence(self):
        """A non-finite loss aborts with the epoch index."""
        dataset = Dataset(x=[0.5, -0.5], y=[1e308, -1e308], x_scale=0.5, y_scale=1e308)
        config = TrainConfig(epochs=5, hidden_width=4, seed=0)
        with pytest.raises(DivergenceError) as exc_info:
            train(init_model(dataset, config), dataset, None, config)
        assert exc_info.value.epoch == 0
        restored = pickle.loads(pickle.dumps(exc_info.value))
        assert restored.epoch == 0
        assert "epoch 0" in str(restored)

    def test_overflowing_update(self, small_dataset):
        """A step that overflows the parameters aborts in the epoch that took it."""
        config = TrainConfig(epochs=5, hidden_width=4, learning_rate=1e308)
        with pytest.raises(DivergenceError) as exc_info:
            train(init_model(small_dataset, config), small_dataset, None, config)
        err = pickle.loads(pickle.dumps(exc_info.value))
        assert (err.epoch, err.loss, err.member) == (0, None, None)
        assert "non-finite parameters" in str(err)

    @pytest.mark.parametrize("learning_rate", [1e300, 1e308])
    def test_huge_learning_rate(self, small_dataset, learning_rate):
        """Huge steps always end in DivergenceError, never another exception."""
        config = TrainConfig(epochs=5, hidden_width=4, learning_rate=learning_rate)
        with pytest.raises(DivergenceError) as exc_info:
            train(init_model(small_dataset, config), small_dataset, None, config)
        assert exc_info.value.epoch <= 1


class TestCheckpoint:
    """Tests for model checkpoints."""

    def test_round_trip(self, tmp_path, small_dataset, small_config, noisy_twin):
        """Parameters, config and twin reload exactly."""
        model = init_model(small_dataset, small_config)
        path = save_checkpoint(tmp_path / "model.json", model, small_config, noisy_twin, [3.0, 2.0])
        checkpoint = load_checkpoint(path)
        restored = checkpoint.to_model()
        _assert_same_parameters(model, restored)
        assert restored.y_scale == model.y_scale
        assert checkpoint.config == small_config
        assert checkpoint.twin == noisy_twin
        assert checkpoint.twin_source == noisy_twin.source
        assert checkpoint.loss_trace == [3.0, 2.0]

    def test_missing_parameter(self, tmp_path, small_dataset, small_config):
        """A checkpoint without every parameter does not load."""
        path = save_checkpoint(tmp_path / "model.json", init_model(small_dataset, small_config), small_config)
        checkpoint = load_checkpoint(path)
        del checkpoint.parameters["thetas"]
        with pytest.raises(ValueError, match="thetas"):
            checkpoint.to_model()
