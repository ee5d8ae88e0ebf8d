"""L2-regularized logistic regression for the scene-discrimination task.

The loss and gradient are computed analytically (and covered by a central
finite-difference harness); the minimization itself is delegated to
L-BFGS-B, which is deterministic for fixed inputs. The optimization vector
packs the feature weights followed by the bias in its last coordinate; the
bias is not regularized.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .corpus import ValidationError
from .features import MODEL, WeightVector

EVAL_MODES = ("full", "modelid_only")


@dataclass(frozen=True)
class TrainConfig:
    l2_strength: float = 1.0
    max_iterations: int = 500
    gradient_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.l2_strength < 0:
            raise ValidationError("l2_strength must be >= 0")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if self.gradient_tolerance <= 0:
            raise ValidationError("gradient_tolerance must be > 0")


def loss_and_gradient(w, data, l2_strength=1.0):
    """Negative log likelihood of the true/distractor labels plus an L2 term.

    loss = -sum_i [y_i log p_i + (1-y_i) log(1-p_i)] + (l2/2) ||values||^2
    with p_i = sigmoid(X_i . values + bias). The log terms are evaluated via
    log(1+exp(.)), which never sees a zero argument. Returns (loss, gradient)
    with the bias derivative in the last coordinate.
    """
    w = np.asarray(w, dtype=np.float64)
    values, bias = w[:-1], w[-1]
    z = data.X @ values + bias
    y = data.y
    loss = float(np.sum(y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z))
                 + 0.5 * l2_strength * values @ values)
    residual = expit(z) - y
    grad = np.empty_like(w)
    grad[:-1] = data.X.T @ residual + l2_strength * values
    grad[-1] = residual.sum()
    return loss, grad


def finite_difference_gradient(w, data, l2_strength=1.0, step=1e-6):
    """Central-difference gradient oracle, one coordinate at a time."""
    w = np.asarray(w, dtype=np.float64)
    grad = np.empty_like(w)
    for i in range(len(w)):
        wp = w.copy()
        wp[i] += step
        wm = w.copy()
        wm[i] -= step
        lp, _ = loss_and_gradient(wp, data, l2_strength)
        lm, _ = loss_and_gradient(wm, data, l2_strength)
        grad[i] = (lp - lm) / (2.0 * step)
    return grad


@dataclass(frozen=True)
class TrainResult:
    weights: WeightVector
    iterations: int
    final_loss: float
    gradient_norm: float  # infinity norm at the returned point
    converged: bool


def train(data, config=TrainConfig(), callback=None) -> TrainResult:
    """Fit weights on vectorized discrimination data.

    Starts from zero, stops when the gradient infinity norm drops below
    config.gradient_tolerance or after config.max_iterations. Identical
    inputs give identical weights. callback, when given, receives each
    accepted iterate.
    """
    if data.num_groups < 1:
        raise ValidationError("need at least one discrimination group")

    def objective(w):
        loss, grad = loss_and_gradient(w, data, config.l2_strength)
        if not np.isfinite(loss):
            raise FloatingPointError(
                f"non-finite loss {loss} at |w|_max={np.max(np.abs(w)):.3g}")
        return loss, grad

    x0 = np.zeros(len(data.vocab) + 1)
    res = minimize(
        objective, x0, jac=True, method="L-BFGS-B", callback=callback,
        options={
            "maxiter": config.max_iterations,
            "gtol": config.gradient_tolerance,
            "ftol": 0.0,
            "maxfun": 20 * config.max_iterations + 100,
        },
    )
    grad_norm = float(np.max(np.abs(res.jac))) if res.jac is not None else float("nan")
    weights = WeightVector(data.vocab, res.x[:-1], bias=res.x[-1])
    return TrainResult(
        weights=weights,
        iterations=int(res.nit),
        final_loss=float(res.fun),
        gradient_norm=grad_norm,
        converged=grad_norm < config.gradient_tolerance,
    )


def predict(weights, indices) -> float:
    """P(true scene) for one vectorized example."""
    z = weights.values[np.asarray(indices, dtype=np.int64)].sum() + weights.bias
    return float(expit(z))


def eval_discrimination(weights, data, mode="full") -> float:
    """Fraction of groups whose true scene scores strictly highest.

    Ties count as incorrect. mode="modelid_only" zeroes category-target
    weights before scoring.
    """
    if mode not in EVAL_MODES:
        raise ValidationError(f"mode must be one of {EVAL_MODES}, got {mode!r}")
    values = weights.values if mode == "full" else weights.masked_values(MODEL)
    z = data.X @ values + weights.bias
    correct = 0
    for start, end in data.group_bounds:
        scores = z[start:end]
        labels = data.y[start:end]
        true_idx = int(np.flatnonzero(labels == 1.0)[0])
        true_score = scores[true_idx]
        others = np.delete(scores, true_idx)
        if others.size == 0 or true_score > others.max():
            correct += 1
    return correct / len(data.group_bounds)
