import math

import numpy as np
import pytest
from scipy import sparse

from sceneforge import learner
from sceneforge.corpus import ValidationError
from sceneforge.features import (CATEGORY, MODEL, DiscriminationData, FeatureKey,
                                 FeatureVocab, WeightVector)
from sceneforge.learner import (TrainConfig, eval_discrimination,
                                finite_difference_gradient, loss_and_gradient,
                                predict, train)


def make_data(rows, labels, n_features, target_type=MODEL, group_bounds=None):
    """rows: list of active-index lists."""
    vocab = FeatureVocab()
    for i in range(n_features):
        vocab.index_of(FeatureKey(f"w{i}", target_type, f"t{i}"))
    vocab.freeze()
    indptr = [0]
    flat = []
    for r in rows:
        flat.extend(sorted(r))
        indptr.append(len(flat))
    X = sparse.csr_matrix((np.ones(len(flat)), flat, indptr),
                          shape=(len(rows), n_features))
    bounds = group_bounds or [(0, len(rows))]
    return DiscriminationData(X, np.array(labels, dtype=float), bounds, vocab)


def random_data(rng, n_features, n_rows):
    rows = [list(np.flatnonzero(rng.random(n_features) < 0.3)) for _ in range(n_rows)]
    labels = (rng.random(n_rows) < 0.5).astype(float)
    return make_data(rows, labels, n_features)


class TestLossAndGradient:
    def test_zero_weights_log2(self):
        data = make_data([[0], [1], [0, 1]], [1, 0, 1], 2)
        loss, _ = loss_and_gradient(np.zeros(3), data, l2_strength=1.0)
        assert loss == pytest.approx(3 * math.log(2), abs=1e-12)

    def test_saturation_leaves_l2_term(self):
        data = make_data([[0]], [1.0], 1)
        w = np.array([30.0, 0.0])
        loss, _ = loss_and_gradient(w, data, l2_strength=0.5)
        assert loss == pytest.approx(0.5 / 2 * 30.0**2, abs=1e-8)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            data = random_data(rng, int(rng.integers(3, 20)), int(rng.integers(4, 20)))
            w = rng.normal(0.0, 1.5, data.X.shape[1] + 1)
            l2 = float(rng.uniform(0.0, 2.0))
            _, analytic = loss_and_gradient(w, data, l2)
            numeric = finite_difference_gradient(w, data, l2, step=1e-6)
            rel = np.abs(analytic - numeric) / np.maximum(
                1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
            assert rel.max() < 1e-5

    def test_bias_unregularized(self):
        data = make_data([[0]], [1.0], 1)
        loss_small, _ = loss_and_gradient(np.array([0.0, 5.0]), data, l2_strength=100.0)
        # a pure-bias weight vector pays no l2 penalty
        assert loss_small == pytest.approx(np.logaddexp(0, -5.0), abs=1e-12)

    def test_convexity_probe(self):
        rng = np.random.default_rng(13)
        data = random_data(rng, 12, 30)
        for _ in range(20):
            w1 = rng.normal(0, 2, 13)
            w2 = rng.normal(0, 2, 13)
            mid, _ = loss_and_gradient((w1 + w2) / 2, data, 0.7)
            l1, _ = loss_and_gradient(w1, data, 0.7)
            l2 = loss_and_gradient(w2, data, 0.7)[0]
            assert mid <= (l1 + l2) / 2 + 1e-9


def separable_data():
    # feature 0 marks positives, feature 1 marks negatives; 20 examples
    rows = [[0] if i % 2 == 0 else [1] for i in range(20)]
    labels = [1.0 if i % 2 == 0 else 0.0 for i in range(20)]
    return make_data(rows, labels, 2)


class TestTrain:
    def test_separable_reaches_perfect_accuracy(self):
        data = separable_data()
        result = train(data, TrainConfig(l2_strength=0.01))
        probs = [predict(result.weights, row) for row in
                 (data.X.indices[data.X.indptr[i]:data.X.indptr[i + 1]]
                  for i in range(data.X.shape[0]))]
        correct = sum((p > 0.5) == bool(y) for p, y in zip(probs, data.y))
        assert correct == len(probs)

    def test_huge_l2_centers_predictions(self):
        data = separable_data()  # balanced labels
        result = train(data, TrainConfig(l2_strength=1e8))
        for row in ([0], [1]):
            assert predict(result.weights, row) == pytest.approx(0.5, abs=1e-3)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        data = random_data(rng, 25, 60)
        w1 = train(data, TrainConfig()).weights
        w2 = train(data, TrainConfig()).weights
        assert np.max(np.abs(w1.values - w2.values)) < 1e-9
        assert abs(w1.bias - w2.bias) < 1e-9

    def test_loss_non_increasing_over_iterations(self):
        rng = np.random.default_rng(5)
        data = random_data(rng, 30, 80)
        losses = []
        train(data, TrainConfig(),
              callback=lambda xk: losses.append(loss_and_gradient(xk, data, 1.0)[0]))
        assert len(losses) > 1
        assert all(b <= a + 1e-9 for a, b in zip(losses, losses[1:]))

    def test_converged_flag_and_gradient_norm(self):
        data = separable_data()
        result = train(data, TrainConfig(l2_strength=1.0))
        assert result.converged
        assert result.gradient_norm < 1e-6

    def test_nonfinite_loss_aborts(self, monkeypatch):
        data = separable_data()
        monkeypatch.setattr(learner, "loss_and_gradient",
                            lambda w, d, l2: (float("inf"), np.zeros(len(w))))
        with pytest.raises(FloatingPointError):
            train(data, TrainConfig())

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            TrainConfig(l2_strength=-1)
        with pytest.raises(ValidationError):
            TrainConfig(max_iterations=0)
        with pytest.raises(ValidationError):
            TrainConfig(gradient_tolerance=0)


class TestHeldOutAccuracy:
    def test_synthetic_corpus_beats_chance(self):
        from sceneforge.corpus import build_discrimination_set, split_corpus
        from sceneforge.features import vectorize_groups
        from sceneforge.synthetic import SyntheticSpec, gen_synthetic_corpus

        spec = SyntheticSpec(num_categories=10, num_models=24, num_scenes=80,
                             descriptions_per_scene=2)
        db, corpus, _, _ = gen_synthetic_corpus(spec, seed=6)
        train_c, _, test_c = split_corpus(corpus, seed=6)
        data = vectorize_groups(build_discrimination_set(train_c, k=4, seed=6), db)
        data.vocab.freeze()
        weights = train(data, TrainConfig()).weights

        held = vectorize_groups(build_discrimination_set(test_c, k=4, seed=8),
                                db, vocab=data.vocab)
        z = held.X @ weights.values + weights.bias
        binary_accuracy = float(np.mean((z > 0) == (held.y == 1.0)))
        assert binary_accuracy > 0.5  # chance for the true/distractor label
        assert eval_discrimination(weights, held) > 0.2  # chance for group argmax


class TestPredict:
    def test_zero_weights(self):
        w = WeightVector(FeatureVocab().freeze(), [], bias=0.0)
        assert predict(w, []) == 0.5

    def test_monotone_in_active_weight(self):
        vocab = FeatureVocab()
        vocab.index_of(FeatureKey("a", MODEL, "m"))
        lo = predict(WeightVector(vocab, [0.2]), [0])
        hi = predict(WeightVector(vocab, [0.9]), [0])
        assert hi > lo

    def test_inactive_weight_ignored(self):
        vocab = FeatureVocab()
        vocab.index_of(FeatureKey("a", MODEL, "m"))
        vocab.index_of(FeatureKey("b", MODEL, "n"))
        p1 = predict(WeightVector(vocab, [0.4, 0.0]), [0])
        p2 = predict(WeightVector(vocab, [0.4, 9.9]), [0])
        assert p1 == p2


class TestEvalDiscrimination:
    def grouped(self):
        # two groups of 3; feature 0 marks the true scene
        rows = [[0], [1], [2], [0], [2], [1]]
        labels = [1, 0, 0, 1, 0, 0]
        return make_data(rows, labels, 3, group_bounds=[(0, 3), (3, 6)])

    def test_perfect_weights(self):
        data = self.grouped()
        w = WeightVector(data.vocab, [5.0, 0.0, 0.0])
        assert eval_discrimination(w, data) == 1.0

    def test_zero_weights_all_ties(self):
        data = self.grouped()
        w = WeightVector(data.vocab, [0.0, 0.0, 0.0])
        assert eval_discrimination(w, data) == 0.0

    def test_modelid_only_masks_categories(self):
        vocab = FeatureVocab()
        vocab.index_of(FeatureKey("x", CATEGORY, "c"))
        vocab.index_of(FeatureKey("x", MODEL, "m"))
        rows = [[0], [1]]
        data = make_data([[0], [1]], [1, 0], 2)
        # reuse vocab with mixed target types
        data.vocab = vocab
        w = WeightVector(vocab, [9.0, 1.0])
        assert eval_discrimination(w, data, "full") == 1.0
        # with category weights masked, the distractor's model feature wins
        assert eval_discrimination(w, data, "modelid_only") == 0.0

    def test_bad_mode(self):
        with pytest.raises(ValidationError):
            eval_discrimination(WeightVector(FeatureVocab().freeze(), []),
                                self.grouped(), "nope")
