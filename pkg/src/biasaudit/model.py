"""Deterministic logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import DesignMatrix


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-4
    seed: int = 0  # kept for provenance; zero init makes training seed-free


@dataclass(frozen=True)
class Classifier:
    weights: np.ndarray
    intercept: float
    config: TrainConfig
    loss_history: tuple

    def __post_init__(self):
        if not (np.isfinite(self.weights).all() and np.isfinite(self.intercept)):
            raise ValueError("classifier parameters must be finite")
        self.weights.setflags(write=False)


def _as_matrix(X):
    return X.matrix if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)


def loss_and_gradient(w, b, X, y, l2):
    """L2-regularized mean cross-entropy and its gradient (intercept unpenalized)."""
    z = X @ w + b
    # log(1 + exp(z)) - y*z, computed stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w)
    residual = expit(z) - y
    grad_w = X.T @ residual / len(y) + l2 * w
    grad_b = residual.mean()
    return loss, grad_w, grad_b


def train_classifier(X, y, cfg: TrainConfig = TrainConfig()) -> Classifier:
    """Fit by full-batch gradient descent from zero initialization.

    Deterministic given (X, y, cfg); the recorded loss history is
    non-increasing for the default configuration.
    """
    mat = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    if mat.shape[0] != len(y):
        raise ValueError("row count of X does not match y")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels contain a single class")
    w = np.zeros(mat.shape[1])
    b = 0.0
    history = []
    for _ in range(cfg.epochs):
        loss, grad_w, grad_b = loss_and_gradient(w, b, mat, y, cfg.l2)
        history.append(loss)
        w = w - cfg.learning_rate * grad_w
        b = b - cfg.learning_rate * grad_b
    history.append(loss_and_gradient(w, b, mat, y, cfg.l2)[0])
    return Classifier(weights=w, intercept=float(b), config=cfg, loss_history=tuple(history))


def predict(clf: Classifier, X):
    """Return (scores, hard labels); label 1 iff score >= 0.5."""
    mat = _as_matrix(X)
    if mat.shape[1] != len(clf.weights):
        raise ValueError(
            f"feature count {mat.shape[1]} does not match trained width {len(clf.weights)}"
        )
    scores = expit(mat @ clf.weights + clf.intercept)
    return scores, (scores >= 0.5).astype(int)


def save_classifier(clf: Classifier, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"learning_rate = {clf.config.learning_rate!r}\n")
        fh.write(f"epochs = {clf.config.epochs}\n")
        fh.write(f"l2 = {clf.config.l2!r}\n")
        fh.write(f"seed = {clf.config.seed}\n")
        fh.write(f"intercept = {clf.intercept!r}\n")
        fh.write("weights = " + " ".join(repr(float(v)) for v in clf.weights) + "\n")


def load_classifier(path) -> Classifier:
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.strip().partition("=")
            entries[key.strip()] = value.strip()
    cfg = TrainConfig(
        learning_rate=float(entries["learning_rate"]),
        epochs=int(entries["epochs"]),
        l2=float(entries["l2"]),
        seed=int(entries["seed"]),
    )
    weights = np.array([float(v) for v in entries["weights"].split()]) if entries["weights"] else np.zeros(0)
    return Classifier(
        weights=weights,
        intercept=float(entries["intercept"]),
        config=cfg,
        loss_history=(),
    )
