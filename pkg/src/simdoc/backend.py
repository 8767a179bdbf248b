"""Simplifier/classifier backends.

Two families share one interface: a built-in, count-based substitution
model plus a softmax readability classifier (fast enough to train in
tests), and an external child process speaking a newline-delimited JSON
protocol over stdin/stdout. The module-level ``train_step`` drives either
through the multi-objective loss with optional coherence gating.
"""

from __future__ import annotations

import json
import select
import shlex
import subprocess
from dataclasses import dataclass, field

import numpy as np

from . import loss as loss_mod
from .coherence import CoherenceModel, predict_coherence
from .corpus import (
    SimplificationInstance,
    TASK_READ_CLASSIFY,
    TASK_SIMPLIFY,
    format_control_input,
)
from .errors import (
    BackendUnavailable,
    ModeMismatch,
    NoSamples,
    NoText,
    ProtocolViolation,
)
from .metrics import fre
from .textproc import (
    Document,
    Sentence,
    count_syllables,
    document_from_text,
    document_text,
    frame_document,
    make_sentence,
    non_pad_sentences,
)

PROTOCOL_VERSION = 1

ACTION_COPY = ("copy",)
ACTION_DELETE = ("delete",)


def _action_sub(word: str) -> tuple[str, str]:
    return ("sub", word)


# ---------------------------------------------------------------------------
# Token alignment
# ---------------------------------------------------------------------------

def lcs_align(source: list[str], target: list[str]) -> list[tuple]:
    """Per-source-token actions turning ``source`` into ``target``:
    copy for LCS matches, substitute for unmatched tokens paired in order,
    delete for leftover source tokens. Ties in the LCS backtrack prefer
    copy, then delete, then substitute. Target-only insertions are not
    modeled. Case-insensitive matching."""
    src = [t.lower() for t in source]
    tgt = [t.lower() for t in target]
    n, m = len(src), len(tgt)
    dp = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(n - 1, -1, -1):
        row = dp[i]
        below = dp[i + 1]
        for j in range(m - 1, -1, -1):
            if src[i] == tgt[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]
    actions: list[tuple] = []
    i = j = 0
    pending_src: list[int] = []
    pending_tgt: list[int] = []

    def flush():
        k = 0
        while k < len(pending_src) and k < len(pending_tgt):
            actions.append(_action_sub(tgt[pending_tgt[k]]))
            k += 1
        while k < len(pending_src):
            actions.append(ACTION_DELETE)
            k += 1
        pending_src.clear()
        pending_tgt.clear()

    while i < n and j < m:
        if src[i] == tgt[j] and dp[i][j] == dp[i + 1][j + 1] + 1:
            flush()
            actions.append(ACTION_COPY)
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            pending_src.append(i)
            i += 1
        else:
            pending_tgt.append(j)
            j += 1
    while i < n:
        pending_src.append(i)
        i += 1
    while j < m:
        pending_tgt.append(j)
        j += 1
    flush()
    return actions


# ---------------------------------------------------------------------------
# Built-in substitution simplifier
# ---------------------------------------------------------------------------

@dataclass
class SubstitutionModel:
    """Count-based per-token action model over {copy, substitute, delete}.

    Probabilities are smoothed with ``alpha`` over three prior buckets
    (copy, delete, one shared "other" bucket), so every action has positive
    probability and an untrained model argmaxes to copy."""

    alpha: float = 1.0
    split_lexicon: frozenset[str] = frozenset()
    counts: dict[str, dict[tuple, float]] = field(default_factory=dict)
    _align_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")

    def action_probability(self, token: str, action: tuple) -> float:
        token_counts = self.counts.get(token.lower(), {})
        total = sum(token_counts.values())
        denom = total + 3 * self.alpha
        prior = self.alpha if action in (ACTION_COPY, ACTION_DELETE) else 0.0
        return (token_counts.get(action, 0.0) + prior) / denom

    def _unseen_probability(self, token: str) -> float:
        token_counts = self.counts.get(token.lower(), {})
        total = sum(token_counts.values())
        return self.alpha / (total + 3 * self.alpha)

    def best_action(self, token: str) -> tuple:
        token_counts = self.counts.get(token.lower(), {})
        best = ACTION_COPY
        best_p = self.action_probability(token, ACTION_COPY)
        candidates = [a for a in token_counts if a not in (ACTION_COPY, ACTION_DELETE)]
        for action in sorted(candidates) + [ACTION_DELETE]:
            p = self.action_probability(token, action)
            if p > best_p:
                best, best_p = action, p
        return best

    def aligned_actions(self, source: list[str], target: list[str]) -> list[tuple]:
        key = (tuple(source), tuple(target))
        if key not in self._align_cache:
            self._align_cache[key] = lcs_align(source, target)
        return self._align_cache[key]

    def negative_log_likelihood(self, source: list[str], target: list[str]) -> float:
        """Mean per-source-token -log P(action) of the actions required to
        produce ``target`` from ``source``."""
        if not source:
            raise NoText("cannot score an empty source")
        actions = self.aligned_actions(source, target)
        total = 0.0
        for token, action in zip(source, actions):
            p = self.action_probability(token, action)
            if p <= 0.0:
                p = self._unseen_probability(token)
            total += -np.log(p)
        return float(total / len(source))

    def observe(self, source: list[str], target: list[str], weight: float = 1.0) -> None:
        actions = self.aligned_actions(source, target)
        for token, action in zip(source, actions):
            bucket = self.counts.setdefault(token.lower(), {})
            bucket[action] = bucket.get(action, 0.0) + weight

    def apply(self, tokens: tuple[str, ...]) -> list[list[str]]:
        """Argmax actions per token, then split at split-lexicon tokens;
        returns one token list per output sentence."""
        out: list[list[str]] = [[]]
        for token in tokens:
            if token.lower() in self.split_lexicon:
                if out[-1]:
                    out.append([])
                continue
            action = self.best_action(token)
            if action == ACTION_COPY:
                out[-1].append(token)
            elif action == ACTION_DELETE:
                continue
            else:
                replacement = action[1]
                if token[:1].isupper():
                    replacement = replacement[:1].upper() + replacement[1:]
                out[-1].append(replacement)
        return [part for part in out if part]


# ---------------------------------------------------------------------------
# Built-in readability classifier
# ---------------------------------------------------------------------------

READABILITY_FEATURES = (
    "words_per_sentence",
    "chars_per_word",
    "syllables_per_word",
    "fre",
    "bias",
)
_FEATURE_SCALES = np.array([25.0, 10.0, 3.0, 100.0, 1.0])
N_READABILITY_CLASSES = 4


class ReadabilityClassifier:
    """Softmax over labels 1..4 from surface features of a document."""

    def __init__(self, weights: np.ndarray | None = None):
        if weights is None:
            weights = np.zeros((N_READABILITY_CLASSES, len(READABILITY_FEATURES)))
        self.weights = np.asarray(weights, dtype=float)

    @staticmethod
    def features(doc: Document) -> np.ndarray:
        sentences = non_pad_sentences(doc)
        tokens = [t for s in sentences for t in s.tokens]
        if not sentences or not tokens:
            raise NoText(f"document {doc.id!r} has no countable words")
        raw = np.array(
            [
                len(tokens) / len(sentences),
                sum(len(t) for t in tokens) / len(tokens),
                sum(count_syllables(t) for t in tokens) / len(tokens),
                fre(doc),
                1.0,
            ]
        )
        return raw / _FEATURE_SCALES

    def probabilities(self, doc: Document) -> np.ndarray:
        logits = self.weights @ self.features(doc)
        logits = logits - logits.max()
        exps = np.exp(logits)
        return exps / exps.sum()

    def classify(self, doc: Document) -> int:
        # argmax takes the first maximum, i.e. ties break to the lower label
        return int(np.argmax(self.probabilities(doc))) + 1

    def score(self, doc: Document, label: int) -> float:
        if label not in (1, 2, 3, 4):
            raise ValueError(f"readability label {label!r} outside [1, 4]")
        p = self.probabilities(doc)[label - 1]
        return float(-np.log(max(p, 1e-300)))

    def sgd_step(self, doc: Document, label: int, learning_rate: float, scale: float = 1.0) -> None:
        feats = self.features(doc)
        probs = self.probabilities(doc)
        onehot = np.zeros(N_READABILITY_CLASSES)
        onehot[label - 1] = 1.0
        self.weights -= learning_rate * scale * np.outer(probs - onehot, feats)


def mean_ce_and_grad(
    weights: np.ndarray, features: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy of the readability softmax and its gradient;
    used by the finite-difference gate."""
    logits = features @ weights.T
    logits = logits - logits.max(axis=1, keepdims=True)
    exps = np.exp(logits)
    probs = exps / exps.sum(axis=1, keepdims=True)
    n = len(labels)
    picked = probs[np.arange(n), labels - 1]
    ce = float(-np.log(np.maximum(picked, 1e-300)).mean())
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), labels - 1] = 1.0
    grad = (probs - onehot).T @ features / n
    return ce, grad


def gradient_check_readability(
    classifier: ReadabilityClassifier,
    examples: list[tuple[Document, int]],
    epsilon: float = 1e-5,
) -> float:
    """Max discrepancy between analytic and central-difference gradients of
    the classifier's mean cross-entropy."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    feats = np.array([classifier.features(doc) for doc, _ in examples])
    labels = np.array([label for _, label in examples])
    _, analytic = mean_ce_and_grad(classifier.weights, feats, labels)
    worst = 0.0
    for idx in np.ndindex(classifier.weights.shape):
        step = np.zeros_like(classifier.weights)
        step[idx] = epsilon
        hi, _ = mean_ce_and_grad(classifier.weights + step, feats, labels)
        lo, _ = mean_ce_and_grad(classifier.weights - step, feats, labels)
        numeric = (hi - lo) / (2 * epsilon)
        scale = max(abs(analytic[idx]), abs(numeric))
        error = abs(analytic[idx] - numeric) / scale if scale >= 1e-8 else abs(analytic[idx] - numeric)
        worst = max(worst, error)
    return worst


# ---------------------------------------------------------------------------
# Backend handles
# ---------------------------------------------------------------------------

class BuiltinBackend:
    """Deterministic in-process backend: substitution simplifier plus
    readability classifier. Single-owner, not thread-safe."""

    def __init__(
        self,
        alpha: float = 1.0,
        split_lexicon: frozenset[str] = frozenset(),
        read_learning_rate: float = 0.5,
    ):
        self.simplifier = SubstitutionModel(alpha=alpha, split_lexicon=split_lexicon)
        self.readability = ReadabilityClassifier()
        self.read_learning_rate = read_learning_rate

    def generate(self, doc: Document) -> Document:
        sentences = non_pad_sentences(doc)
        if not sentences:
            raise NoText(f"document {doc.id!r} is all padding")
        out: list[Sentence] = []
        for sentence in sentences:
            parts = self.simplifier.apply(sentence.tokens)
            if parts == [list(sentence.tokens)]:
                out.append(sentence)  # unchanged: keep exact text
                continue
            for tokens in parts:
                text = " ".join(tokens)
                text = text[:1].upper() + text[1:] + "."
                out.append(make_sentence(text))
        if not out:
            out = [sentences[0]]
        return frame_document(out, frame=len(doc.sentences), doc_id=doc.id)

    def score(self, task: str, input_doc: Document, target) -> float:
        if task == TASK_SIMPLIFY:
            src = [t for s in non_pad_sentences(input_doc) for t in s.tokens]
            tgt = [t for s in non_pad_sentences(target) for t in s.tokens]
            return self.simplifier.negative_log_likelihood(src, tgt)
        if task == TASK_READ_CLASSIFY:
            return self.readability.score(input_doc, target)
        raise ValueError(f"unknown task {task!r}")

    def classify(self, doc: Document) -> int:
        return self.readability.classify(doc)

    def apply_update(self, instance: SimplificationInstance, gate: float, with_read: bool) -> None:
        src = [t for s in non_pad_sentences(instance.source) for t in s.tokens]
        tgt = [t for s in non_pad_sentences(instance.target) for t in s.tokens]
        self.simplifier.observe(src, tgt, weight=gate)
        if with_read:
            self.readability.sgd_step(
                instance.target,
                instance.readability_label,
                self.read_learning_rate,
                scale=gate,
            )

    def close(self) -> None:
        pass


class ExternalBackend:
    """Handle to a child process speaking the newline-delimited JSON
    protocol. One request in flight at a time."""

    def __init__(self, command: str, config: dict | None = None, frame: int = 10):
        self.config = dict(config or {})
        self.frame = frame
        self.timeout = float(self.config.get("timeout", 30.0))
        try:
            self.process = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BackendUnavailable(f"cannot spawn {command!r}: {exc}") from exc
        self._next_id = 0
        self._handshake()

    def _read_line(self, timeout: float) -> str:
        stream = self.process.stdout
        ready, _, _ = select.select([stream], [], [], timeout)
        if not ready:
            raise BackendUnavailable(f"backend did not respond within {timeout}s")
        line = stream.readline()
        if not line:
            raise BackendUnavailable("backend closed its output stream")
        return line

    def _handshake(self) -> None:
        hello = {"op": "hello", "version": PROTOCOL_VERSION}
        self.process.stdin.write(json.dumps(hello) + "\n")
        self.process.stdin.flush()
        reply_line = self._read_line(self.timeout)
        try:
            reply = json.loads(reply_line)
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"bad handshake line: {reply_line!r}") from exc
        version = reply.get("version")
        if reply.get("op") != "hello" or version != PROTOCOL_VERSION:
            raise ProtocolViolation(
                f"protocol version mismatch: ours {PROTOCOL_VERSION}, theirs {version}"
            )

    def _request(self, op: str, task: str | None, input_text: str | None, target, config: dict) -> dict:
        self._next_id += 1
        request = {
            "id": self._next_id,
            "op": op,
            "task": task,
            "input": input_text,
            "target": target,
            "config": config,
        }
        self.process.stdin.write(json.dumps(request) + "\n")
        self.process.stdin.flush()
        line = self._read_line(self.timeout)
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"unparseable response: {line!r}") from exc
        if response.get("id") != self._next_id:
            raise ProtocolViolation(
                f"out-of-order response: sent id {self._next_id}, got {response.get('id')}"
            )
        if not response.get("ok"):
            raise ProtocolViolation(f"backend error: {response.get('error')}")
        return response

    def generate(self, doc: Document) -> Document:
        text = format_control_input(TASK_SIMPLIFY, document_text(doc))
        response = self._request("generate", TASK_SIMPLIFY, text, None, self.config)
        output = response.get("output") or ""
        if not output.strip():
            raise ProtocolViolation("generate returned empty output")
        return document_from_text(output, frame=len(doc.sentences), doc_id=doc.id)

    def score(self, task: str, input_doc: Document, target) -> float:
        wire_task = task
        text = format_control_input(task, document_text(input_doc))
        wire_target = document_text(target) if isinstance(target, Document) else target
        response = self._request("score", wire_task, text, wire_target, self.config)
        loss = response.get("loss")
        if loss is None or loss < 0:
            raise ProtocolViolation(f"score returned invalid loss {loss!r}")
        return float(loss)

    def classify(self, doc: Document) -> int:
        text = format_control_input(TASK_READ_CLASSIFY, document_text(doc))
        response = self._request("classify", TASK_READ_CLASSIFY, text, None, self.config)
        label = response.get("label")
        if label not in (1, 2, 3, 4):
            raise ProtocolViolation(f"classify returned invalid label {label!r}")
        return int(label)

    def apply_update(self, instance: SimplificationInstance, gate: float, with_read: bool) -> None:
        config = dict(self.config)
        config["gate"] = gate
        config["with_read"] = with_read
        if with_read:
            config["readability_label"] = instance.readability_label
        self._request(
            "train_step",
            TASK_SIMPLIFY,
            format_control_input(TASK_SIMPLIFY, document_text(instance.source)),
            document_text(instance.target),
            config,
        )

    def reset(self) -> None:
        self._request("reset", None, None, None, self.config)

    def close(self) -> None:
        try:
            self.process.stdin.close()
        except OSError:
            pass
        try:
            self.process.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.process.kill()


def spawn_external(command: str, config: dict | None = None) -> ExternalBackend:
    """Start an external backend and complete the protocol handshake."""
    return ExternalBackend(command, config=config)


# ---------------------------------------------------------------------------
# Training driver
# ---------------------------------------------------------------------------

def train_step(
    backend,
    batch: list[SimplificationInstance],
    loss_config: loss_mod.LossConfig,
    coherence_model: CoherenceModel | None = None,
    gate_active: bool = True,
) -> loss_mod.BatchLoss:
    """One pass over ``batch``: score the mode's components per sample,
    combine them through the gated partial loss, and apply one backend
    update scaled by the gate derivative. ``gate_active=False`` disables
    gating during warm-up while keeping the loss bookkeeping intact."""
    if not batch:
        raise NoSamples("train_step needs a non-empty batch")
    breakdowns = []
    for instance in batch:
        loss_simp = backend.score(TASK_SIMPLIFY, instance.source, instance.target)
        loss_read = None
        if loss_config.uses_read:
            if instance.readability_label is None:
                raise ModeMismatch(
                    f"mode {loss_config.mode} needs readability labels; "
                    f"instance {instance.id} has none"
                )
            loss_read = backend.score(
                TASK_READ_CLASSIFY, instance.target, instance.readability_label
            )
        coherent = None
        if loss_config.uses_coherence:
            if coherence_model is None:
                raise ModeMismatch(f"mode {loss_config.mode} needs a coherence model")
            prediction = backend.generate(instance.source)
            if gate_active:
                coherent, _ = predict_coherence(coherence_model, prediction)
            else:
                coherent = 0
        breakdown = loss_mod.partial_loss(loss_simp, loss_read, coherent, loss_config)
        if loss_config.uses_coherence:
            gate = loss_mod.gating_gradient(coherent, loss_config)
        else:
            gate = 1.0
        backend.apply_update(instance, gate, with_read=loss_config.uses_read)
        breakdowns.append(breakdown)
    return loss_mod.total_loss(breakdowns)
