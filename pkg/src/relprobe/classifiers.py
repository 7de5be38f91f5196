"""Classifier-based association extraction.

Three classifiers are trained on source-word vectors to predict the target
class: k-nearest neighbors, a linear one-vs-rest SVM trained by deterministic
subgradient descent on the regularized hinge loss, and a one-hidden-layer
ReLU network trained with full-batch Adam on softmax cross-entropy. The
association matrix is built from predicted-class counts under leave-one-out
cross-validation repeated `repeats` times.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .measures import AssociationMatrix
from .seeding import derive_seed

log = logging.getLogger(__name__)

CLASSIFIER_KINDS = ("knn", "linear_svm", "ffn")
METHOD_NAMES = {"knn": "knn", "linear_svm": "svm", "ffn": "ffn"}


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    knn_k: int = 5
    ffn_hidden: int = 100
    ffn_epochs: int = 100
    ffn_learning_rate: float = 0.01
    svm_epochs: int = 200
    svm_reg: float = 1e-3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in CLASSIFIER_KINDS:
            raise ValueError(f"unknown classifier kind: {self.kind!r}")
        for name in ("knn_k", "ffn_hidden", "ffn_epochs", "ffn_learning_rate",
                     "svm_epochs", "svm_reg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class LabeledItem:
    source: str
    vector: np.ndarray
    label: int


@dataclass
class LabeledVectors:
    items: list[LabeledItem]
    targets: list[str]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("no labeled items")
        dim = self.items[0].vector.shape
        for item in self.items:
            if item.vector.shape != dim:
                raise ValueError("labeled vectors have inconsistent dimensions")
            if not 0 <= item.label < len(self.targets):
                raise ValueError(f"label {item.label} out of range for {item.source!r}")

    def matrix(self) -> np.ndarray:
        return np.stack([item.vector for item in self.items]).astype(np.float64)

    def labels(self) -> np.ndarray:
        return np.array([item.label for item in self.items], dtype=np.int64)


def mean_pool(entry) -> np.ndarray:
    """Componentwise mean of a contextual vector-set entry.

    Accepts a list of vectors or of (template_id, vector) pairs.
    """
    entry = list(entry)
    if not entry:
        raise ValueError("mean_pool of empty set")
    vectors = [v[1] if isinstance(v, tuple) else v for v in entry]
    if len(vectors) == 1:
        return np.asarray(vectors[0], dtype=np.float64)
    return np.mean(np.stack(vectors).astype(np.float64), axis=0)


def assign_labels(ds) -> dict[str, int]:
    """Label every source with its gold-argmax target index (ties: first listed)."""
    best: dict[str, tuple[float, int]] = {}
    tgt_index = {t: j for j, t in enumerate(ds.targets)}
    for rec in ds.records:
        j = tgt_index[rec.target]
        cur = best.get(rec.source)
        if cur is None or rec.gold > cur[0] or (rec.gold == cur[0] and j < cur[1]):
            best[rec.source] = (rec.gold, j)
    return {s: j for s, (_, j) in best.items()}


def labeled_vectors_from(ds, vector_of, targets: list[str] | None = None) -> LabeledVectors:
    """Build the classifier training set from a dataset and a word->vector resolver.

    Sources without a vector are dropped with a warning.
    """
    labels = assign_labels(ds)
    items: list[LabeledItem] = []
    dropped: list[str] = []
    for source in ds.sources:
        vec = vector_of(source)
        if vec is None:
            dropped.append(source)
            continue
        items.append(LabeledItem(source, np.asarray(vec, dtype=np.float64), labels[source]))
    if dropped:
        log.warning("dropped %d sources without vectors: %s", len(dropped), dropped)
    return LabeledVectors(items=items, targets=targets if targets is not None else list(ds.targets))


def fold_statistics(data: LabeledVectors, hold_out: int) -> tuple[np.ndarray, np.ndarray]:
    """Standardization statistics fitted on the training fold only.

    The held-out item never contributes to these; constant features get unit
    scale so the transform stays finite.
    """
    X = np.stack([it.vector for k, it in enumerate(data.items) if k != hold_out])
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd == 0.0, 1.0, sd)
    return mu, sd


def _knn_predict(spec: ClassifierSpec, X: np.ndarray, y: np.ndarray,
                 query: np.ndarray, n_classes: int) -> int:
    dists = np.sqrt(((X - query) ** 2).sum(axis=1))
    k = min(spec.knn_k, X.shape[0])
    order = np.argsort(dists, kind="stable")[:k]
    votes = np.bincount(y[order], minlength=n_classes)
    top = votes.max()
    tied = np.flatnonzero(votes == top)
    if len(tied) == 1:
        return int(tied[0])
    # tie: label with the smaller mean distance among its k-nearest members,
    # then the smaller index
    means = []
    for label in tied:
        member_d = dists[order][y[order] == label]
        means.append(member_d.mean())
    return int(tied[int(np.argmin(means))])


def _svm_train(spec: ClassifierSpec, X: np.ndarray, y: np.ndarray,
               n_classes: int) -> tuple[np.ndarray, np.ndarray]:
    """One-vs-rest L2-regularized hinge loss, full-batch subgradient descent.

    Zero initialization and a fixed 1/sqrt(t+1) step schedule make training
    deterministic with no randomness at all.
    """
    n, d = X.shape
    W = np.zeros((n_classes, d))
    b = np.zeros(n_classes)
    for c in range(n_classes):
        yc = np.where(y == c, 1.0, -1.0)
        w = np.zeros(d)
        bc = 0.0
        for t in range(spec.svm_epochs):
            margins = yc * (X @ w + bc)
            active = margins < 1.0
            grad_w = spec.svm_reg * w - (yc[active, None] * X[active]).sum(axis=0) / n
            grad_b = -yc[active].sum() / n
            eta = 1.0 / np.sqrt(t + 1.0)
            w = w - eta * grad_w
            bc = bc - eta * grad_b
        W[c] = w
        b[c] = bc
    return W, b


def _svm_decision(W: np.ndarray, b: np.ndarray, query: np.ndarray) -> int:
    return int(np.argmax(W @ query + b))


def ffn_init(spec: ClassifierSpec, dim: int, n_classes: int, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    return {
        "W1": rng.normal(0.0, np.sqrt(2.0 / dim), size=(dim, spec.ffn_hidden)),
        "b1": np.zeros(spec.ffn_hidden),
        "W2": rng.normal(0.0, np.sqrt(2.0 / spec.ffn_hidden), size=(spec.ffn_hidden, n_classes)),
        "b2": np.zeros(n_classes),
    }


def ffn_logits(params: dict[str, np.ndarray], X: np.ndarray) -> np.ndarray:
    hidden = np.maximum(X @ params["W1"] + params["b1"], 0.0)
    return hidden @ params["W2"] + params["b2"]


def ffn_loss_and_grads(
    params: dict[str, np.ndarray], X: np.ndarray, y: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean softmax cross-entropy and its analytic gradients."""
    n = X.shape[0]
    Z1 = X @ params["W1"] + params["b1"]
    A1 = np.maximum(Z1, 0.0)
    logits = A1 @ params["W2"] + params["b2"]
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    loss = float(-np.log(probs[np.arange(n), y]).mean())
    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    grads = {
        "W2": A1.T @ dlogits,
        "b2": dlogits.sum(axis=0),
    }
    dA1 = dlogits @ params["W2"].T
    dZ1 = dA1 * (Z1 > 0.0)
    grads["W1"] = X.T @ dZ1
    grads["b1"] = dZ1.sum(axis=0)
    return loss, grads


def _ffn_train(spec: ClassifierSpec, X: np.ndarray, y: np.ndarray,
               n_classes: int, seed: int) -> dict[str, np.ndarray]:
    params = ffn_init(spec, X.shape[1], n_classes, seed)
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(p) for k, p in params.items()}
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    lr = spec.ffn_learning_rate
    for t in range(1, spec.ffn_epochs + 1):
        _, grads = ffn_loss_and_grads(params, X, y)
        for k in params:
            m[k] = beta1 * m[k] + (1 - beta1) * grads[k]
            v[k] = beta2 * v[k] + (1 - beta2) * grads[k] ** 2
            m_hat = m[k] / (1 - beta1**t)
            v_hat = v[k] / (1 - beta2**t)
            params[k] = params[k] - lr * m_hat / (np.sqrt(v_hat) + eps)
    return params


def train_predict(spec: ClassifierSpec, train: LabeledVectors, query: np.ndarray,
                  seed: int | None = None) -> int:
    """Train one classifier on `train` and predict the target index of `query`.

    SVM and FFN standardize features on the training set (the query is only
    transformed); KNN works on raw vectors. `seed` defaults to spec.seed and
    only affects the FFN initialization.
    """
    query = np.asarray(query, dtype=np.float64)
    X = train.matrix()
    y = train.labels()
    if query.shape != (X.shape[1],):
        raise ValueError(f"query dimension {query.shape} != training dimension {X.shape[1]}")
    if len(np.unique(y)) < 2:
        raise ValueError("training set has fewer than 2 distinct labels")
    n_classes = len(train.targets)
    if seed is None:
        seed = spec.seed
    if spec.kind == "knn":
        return _knn_predict(spec, X, y, query, n_classes)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd == 0.0, 1.0, sd)
    Xs = (X - mu) / sd
    qs = (query - mu) / sd
    if spec.kind == "linear_svm":
        W, b = _svm_train(spec, Xs, y, n_classes)
        return _svm_decision(W, b, qs)
    params = _ffn_train(spec, Xs, y, n_classes, seed)
    return int(np.argmax(ffn_logits(params, qs[None, :])[0]))


def is_deterministic(kind: str) -> bool:
    """KNN and the zero-initialized SVM ignore the seed entirely."""
    return kind in ("knn", "linear_svm")


def loo_association(
    spec: ClassifierSpec,
    data: LabeledVectors,
    repeats: int = 100,
    model: str = "",
) -> AssociationMatrix:
    """Leave-one-out predicted-class counts, repeated `repeats` times.

    Each repeat r and fold i trains with seed derive_seed(spec.seed, r, i).
    Row s holds the distribution of predicted targets for s (counts divided
    by repeats, summing to 1). Deterministic classifiers run a single repeat
    because every repeat would predict identically.
    """
    if len(data.items) < 2:
        raise ValueError("leave-one-out needs at least 2 sources")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    n = len(data.items)
    n_classes = len(data.targets)
    effective = 1 if is_deterministic(spec.kind) else repeats
    counts = np.zeros((n, n_classes), dtype=np.int64)
    folds = [
        LabeledVectors(items=[it for k, it in enumerate(data.items) if k != i],
                       targets=data.targets)
        for i in range(n)
    ]
    for r in range(effective):
        for i in range(n):
            pred = train_predict(spec, folds[i], data.items[i].vector,
                                 seed=derive_seed(spec.seed, r, i))
            counts[i, pred] += 1
    values = counts.astype(np.float64) / effective
    return AssociationMatrix(
        sources=[it.source for it in data.items],
        targets=list(data.targets),
        values=values,
        method=METHOD_NAMES[spec.kind],
        model=model,
        higher_is_stronger=True,
    )
