"""Encoder-decoder wrapper behind the stdio protocol.

Wraps a local or hub text-to-text checkpoint: greedy generation, target
scoring by mean token cross-entropy, readability classification by decoding
a label token, and single AdamW steps for online fine-tuning. Everything is
deterministic for a fixed checkpoint (greedy decode, no sampling).
"""

from __future__ import annotations

import re

import torch
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

DEFAULT_LEARNING_RATE = 2e-5
DEFAULT_WEIGHT_DECAY = 0.01
DEFAULT_BATCH_SIZE = 8
DEFAULT_MAX_NEW_TOKENS = 40

SIMPLIFY_PREFIX = "simplify: "
READ_CLASSIFY_PREFIX = "read classify: "

_LABEL_RE = re.compile(r"\d+")


class UnparseableLabel(Exception):
    """Classification decode did not contain a label in [1, 4]."""


def strip_prefix(text: str) -> str:
    for prefix in (SIMPLIFY_PREFIX, READ_CLASSIFY_PREFIX):
        if text.startswith(prefix):
            return text[len(prefix):]
    return text


class Adapter:
    def __init__(
        self,
        model_name: str,
        max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS,
        learning_rate: float = DEFAULT_LEARNING_RATE,
        weight_decay: float = DEFAULT_WEIGHT_DECAY,
        batch_size: int = DEFAULT_BATCH_SIZE,
    ):
        self.model_name = model_name
        self.max_new_tokens = max_new_tokens
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(model_name)
        self.model.eval()
        self._optimizer = None

    @property
    def optimizer(self) -> torch.optim.Optimizer:
        if self._optimizer is None:
            self._optimizer = torch.optim.AdamW(
                self.model.parameters(),
                lr=self.learning_rate,
                weight_decay=self.weight_decay,
            )
        return self._optimizer

    def _encode(self, text: str) -> torch.Tensor:
        return self.tokenizer(text, return_tensors="pt").input_ids

    def generate(self, text: str) -> str:
        with torch.no_grad():
            ids = self.model.generate(
                self._encode(text),
                max_new_tokens=self.max_new_tokens,
                do_sample=False,
                num_beams=1,
            )
        decoded = self.tokenizer.decode(ids[0], skip_special_tokens=True).strip()
        if decoded:
            return decoded
        # untrained checkpoints can decode straight to EOS; fall back to
        # echoing the unprefixed input so the caller always gets a document
        return strip_prefix(text)

    def _target_loss(self, input_text: str, target_text: str) -> torch.Tensor:
        labels = self._encode(target_text)
        output = self.model(input_ids=self._encode(input_text), labels=labels)
        return output.loss  # mean token cross-entropy over the target

    def score(self, input_text: str, target_text: str) -> float:
        with torch.no_grad():
            return float(self._target_loss(input_text, target_text))

    def classify(self, text: str) -> int:
        decoded = self.generate(text)
        match = _LABEL_RE.search(decoded)
        if match is None:
            raise UnparseableLabel(f"no label in decode {decoded!r}")
        label = int(match.group())
        if label not in (1, 2, 3, 4):
            raise UnparseableLabel(f"label {label} outside [1, 4]")
        return label

    def train_step(self, input_text: str, target_text: str, config: dict) -> float:
        """One AdamW step on the gate-scaled combined loss."""
        gate = float(config.get("gate", 1.0))
        loss = self._target_loss(input_text, target_text)
        if config.get("with_read"):
            label = config.get("readability_label")
            if label is None:
                raise UnparseableLabel("with_read requires a readability_label")
            read_input = READ_CLASSIFY_PREFIX + strip_prefix(target_text)
            loss = loss + self._target_loss(read_input, str(label))
        loss = gate * loss
        self.model.train()
        self.optimizer.zero_grad()
        loss.backward()
        self.optimizer.step()
        self.model.eval()
        return float(loss.detach())

    def reset(self) -> None:
        """Reload the checkpoint, discarding all fine-tuning."""
        self.model = AutoModelForSeq2SeqLM.from_pretrained(self.model_name)
        self.model.eval()
        self._optimizer = None
