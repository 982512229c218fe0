"""Hand-derived gradients, projection, and mean-network training."""

import numpy as np
import pytest

from iterauction.mvnn import InitHyper, init_params, random_containment_pair
from iterauction.training import (
    Adam,
    Grads,
    TrainHyper,
    mean_loss_and_grads,
    r_squared,
    smooth_l1,
    smooth_l1_grad,
    train_mean,
)

from _gradcheck import preactivations_kink_free, worst_relative_error


class TestSmoothL1:
    def test_quadratic_inside_linear_outside(self):
        beta = 0.25
        assert smooth_l1(0.1, 0.0, beta) == pytest.approx(0.5 / beta * 0.01)
        assert smooth_l1(1.0, 0.0, beta) == pytest.approx(1.0 - 0.5 * beta)

    def test_beta_zero_is_absolute_error(self):
        assert smooth_l1(-0.7, 0.0, 0.0) == pytest.approx(0.7)

    def test_gradient_continuity_at_transition(self):
        beta = 1 / 64
        assert smooth_l1_grad(beta, 0.0, beta) == pytest.approx(1.0)
        assert smooth_l1_grad(beta - 1e-12, 0.0, beta) == pytest.approx(1.0, abs=1e-9)


class TestGradients:
    def test_mean_loss_gradients_match_finite_differences(self):
        rng = np.random.default_rng(0)
        hyper = TrainHyper(trainable_cutoffs=True)
        checked = 0
        seed = 0
        while checked < 10:
            seed += 1
            p = init_params([5, 4, 4, 1], InitHyper(), (0.3, 1.0), seed=seed,
                            skip=bool(seed % 2))
            X = rng.random((8, 5))
            y = rng.random(8)
            if not preactivations_kink_free(p, X):
                continue
            err = worst_relative_error(lambda pp: mean_loss_and_grads(pp, X, y, hyper), p)
            assert err <= 1e-4, f"seed {seed}: rel err {err}"
            checked += 1

    def test_l2_gradients_included(self):
        hyper = TrainHyper(l2_lambda=0.1, trainable_cutoffs=False)
        p = init_params([3, 2, 1], InitHyper(), (0.3, 1.0), seed=3)
        X = np.random.default_rng(1).random((4, 3))
        y = np.zeros(4)
        loss_with, _ = mean_loss_and_grads(p, X, y, hyper)
        loss_without, _ = mean_loss_and_grads(p, X, y, TrainHyper(l2_lambda=0.0))
        assert loss_with > loss_without


class TestAdamProjection:
    def test_step_preserves_sign_constraints(self):
        p = init_params([4, 3, 1], InitHyper(), seed=5, skip=True)
        hyper = TrainHyper(learning_rate=0.5, trainable_cutoffs=True)
        opt = Adam(p, hyper)
        rng = np.random.default_rng(2)
        for _ in range(20):
            g = Grads.zeros_like(p)
            for arr in g.arrays():
                arr += rng.normal(size=arr.shape)
            opt.step(g)
            p.validate()  # weights >= 0, biases <= 0, cutoffs > 0

    def test_gradient_clipping_bounds_step_norm(self):
        p = init_params([4, 3, 1], InitHyper(), seed=5)
        g = Grads.zeros_like(p)
        g.weights[0] += 1e6
        norm_before = g.global_norm()
        Adam(p, TrainHyper(clip_grad_norm=1.0)).step(g)
        assert norm_before > 1.0 and g.global_norm() <= 1.0 + 1e-9


class TestTrainMean:
    def _reports(self, seed, m=5, k=12):
        import iterauction as ia

        inst = ia.generate_instance(ia.GeneratorConfig(n=1, m=m), seed)
        rng = np.random.default_rng(seed)
        bundles = {tuple(np.ones(m, dtype=int))}
        while len(bundles) < k:
            b = tuple(rng.integers(0, 2, m))
            if sum(b) > 0:
                bundles.add(b)
        return [
            (np.array(b), float(inst.values[0].value(np.array(b)))) for b in sorted(bundles)
        ]

    def test_fits_training_data(self):
        reports = self._reports(0)
        net = train_mean(reports, [5, 10, 10, 1], InitHyper(), TrainHyper(epochs=80), seed=0)
        X = np.stack([b for b, _ in reports]).astype(float)
        y = np.array([v for _, v in reports])
        assert np.abs(net.forward(X) - y).mean() < 0.05
        assert r_squared(net.forward(X), y) > 0.9

    def test_trained_network_is_monotone(self):
        reports = self._reports(1)
        net = train_mean(reports, [5, 8, 1], InitHyper(), TrainHyper(epochs=40), seed=1)
        rng = np.random.default_rng(0)
        for _ in range(200):
            a, b = random_containment_pair(5, rng)
            assert net.forward(a.astype(float)) <= net.forward(b.astype(float)) + 1e-12

    def test_deterministic_given_seed(self):
        reports = self._reports(2)
        a = train_mean(reports, [5, 6, 1], InitHyper(), TrainHyper(epochs=20), seed=7)
        b = train_mean(reports, [5, 6, 1], InitHyper(), TrainHyper(epochs=20), seed=7)
        assert a.to_json() == b.to_json()
