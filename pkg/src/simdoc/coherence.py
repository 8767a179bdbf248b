"""Trainable binary coherence scorer.

A logistic regression over interpretable discourse features of a framed
document: lexical overlap between consecutive sentences, connective and
pronoun densities, type/token ratio and a length term. Training is seeded
stochastic gradient descent on binary cross-entropy and is invariant to
the input order of the examples (they are canonically sorted before the
seeded shuffle).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .corpus import CoherenceExample
from .errors import DegenerateLabels, NoText
from .textproc import Document, non_pad_sentences

STOP_WORDS = frozenset(
    """a an the and or but if then than that this these those is am are was
    were be been being do does did will would can could shall should may
    might must have has had of in on at by for with to from as it its not
    no so such there here what which who whom when where why how all any
    both each few more most other some""".split()
)

CONNECTIVES = frozenset(
    """however therefore moreover furthermore also then next finally because
    since although though meanwhile thus hence besides instead still yet
    while after before overall additionally consequently""".split()
)

PRONOUNS = frozenset(
    """i me my mine we us our ours you your yours he him his she her hers
    it its they them their theirs himself herself itself themselves""".split()
)

FEATURE_NAMES = (
    "adjacent_overlap",
    "connective_density",
    "pronoun_density",
    "type_token_ratio",
    "length_norm",
    "bias",
)

DEFAULT_LEARNING_RATE = 0.1
DEFAULT_EPOCHS = 50
DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class CoherenceFeatureVector:
    adjacent_overlap: float
    connective_density: float
    pronoun_density: float
    type_token_ratio: float
    length_norm: float
    bias: float = 1.0

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.adjacent_overlap,
                self.connective_density,
                self.pronoun_density,
                self.type_token_ratio,
                self.length_norm,
                self.bias,
            ],
            dtype=float,
        )


@dataclass
class CoherenceModel:
    weights: np.ndarray
    threshold: float = DEFAULT_THRESHOLD
    training_log: list[tuple[int, float]] = field(default_factory=list)

    def predict(self, doc: Document) -> tuple[int, float]:
        return predict_coherence(self, doc)


def _content_set(tokens: tuple[str, ...]) -> set[str]:
    return {t.lower() for t in tokens if t.lower() not in STOP_WORDS}


def _jaccard(a: set[str], b: set[str]) -> float:
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def extract_features(doc: Document) -> CoherenceFeatureVector:
    """Deterministic feature vector over the non-pad sentences."""
    sentences = non_pad_sentences(doc)
    if not sentences:
        raise NoText(f"document {doc.id!r} is all padding")
    tokens = [t for s in sentences for t in s.tokens]
    if not tokens:
        raise NoText(f"document {doc.id!r} has no word tokens")
    lowered = [t.lower() for t in tokens]
    if len(sentences) < 2:
        overlap = 0.0
    else:
        pairs = zip(sentences, sentences[1:])
        overlap = sum(
            _jaccard(_content_set(a.tokens), _content_set(b.tokens)) for a, b in pairs
        ) / (len(sentences) - 1)
    return CoherenceFeatureVector(
        adjacent_overlap=overlap,
        connective_density=sum(t in CONNECTIVES for t in lowered) / len(sentences),
        pronoun_density=sum(t in PRONOUNS for t in lowered) / len(sentences),
        type_token_ratio=len(set(lowered)) / len(tokens),
        length_norm=len(sentences) / len(doc.sentences),
    )


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return ez / (1.0 + ez)


def bce_loss_and_grad(
    weights: np.ndarray, features: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its analytic gradient."""
    logits = features @ weights
    # log(1 + exp(-z)) for y=1, log(1 + exp(z)) for y=0, computed stably
    losses = np.logaddexp(0.0, np.where(labels == 1, -logits, logits))
    probs = 1.0 / (1.0 + np.exp(-np.clip(logits, -500, 500)))
    grad = features.T @ (probs - labels) / len(labels)
    return float(losses.mean()), grad


def train_coherence(
    examples: list[CoherenceExample],
    learning_rate: float = DEFAULT_LEARNING_RATE,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = 0,
    threshold: float = DEFAULT_THRESHOLD,
) -> CoherenceModel:
    """Fit the logistic scorer with seeded SGD. Raises DegenerateLabels
    unless both classes are present."""
    labels = {e.binary_label for e in examples}
    if labels != {0, 1}:
        raise DegenerateLabels(f"training data has labels {sorted(labels)} only")
    rows = [
        (extract_features(e.document).as_array(), float(e.binary_label))
        for e in examples
    ]
    # canonical order: training depends on the example multiset, not its order
    rows.sort(key=lambda r: (r[1], tuple(r[0])))
    features = np.array([r[0] for r in rows])
    targets = np.array([r[1] for r in rows])

    weights = np.zeros(len(FEATURE_NAMES))
    rng = random.Random(seed)
    order = list(range(len(rows)))
    initial_loss, _ = bce_loss_and_grad(weights, features, targets)
    log = [(0, initial_loss)]
    for epoch in range(1, epochs + 1):
        rng.shuffle(order)
        for i in order:
            prob = _sigmoid(float(features[i] @ weights))
            weights = weights - learning_rate * (prob - targets[i]) * features[i]
        epoch_loss, _ = bce_loss_and_grad(weights, features, targets)
        log.append((epoch, epoch_loss))
    return CoherenceModel(weights=weights, threshold=threshold, training_log=log)


def predict_coherence(model: CoherenceModel, doc: Document) -> tuple[int, float]:
    """(label, probability); label is 1 iff probability >= threshold."""
    prob = _sigmoid(float(extract_features(doc).as_array() @ model.weights))
    return (1 if prob >= model.threshold else 0, prob)


def gradient_check_coherence(
    model: CoherenceModel, examples: list[CoherenceExample], epsilon: float = 1e-5
) -> float:
    """Max per-weight discrepancy between the analytic BCE gradient and
    central finite differences (relative, with an absolute fallback near
    zero)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    features = np.array([extract_features(e.document).as_array() for e in examples])
    targets = np.array([float(e.binary_label) for e in examples])
    _, analytic = bce_loss_and_grad(model.weights, features, targets)
    worst = 0.0
    for i in range(len(model.weights)):
        step = np.zeros_like(model.weights)
        step[i] = epsilon
        hi, _ = bce_loss_and_grad(model.weights + step, features, targets)
        lo, _ = bce_loss_and_grad(model.weights - step, features, targets)
        numeric = (hi - lo) / (2 * epsilon)
        scale = max(abs(analytic[i]), abs(numeric))
        if scale < 1e-8:
            error = abs(analytic[i] - numeric)
        else:
            error = abs(analytic[i] - numeric) / scale
        worst = max(worst, error)
    return worst


def save_model(model: CoherenceModel, path) -> None:
    """Plain-text key-value persistence with exact float round-trip."""
    with open(path, "w", encoding="utf-8") as handle:
        for name, weight in zip(FEATURE_NAMES, model.weights):
            handle.write(f"{name} {float(weight)!r}\n")
        handle.write(f"threshold {float(model.threshold)!r}\n")


def load_model(path) -> CoherenceModel:
    values = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                name, raw = line.split()
                values[name] = float(raw)
    weights = np.array([values[name] for name in FEATURE_NAMES])
    return CoherenceModel(weights=weights, threshold=values["threshold"])
