"""Multi-objective loss algebra.

A per-sample partial loss combines a simplification loss, an optional
readability loss, and an optional binary coherence gate: when the sample's
prediction is judged coherent the combined loss is scaled by ``delta``
(default 0.90), otherwise it is left untouched. Batch loss is the plain
mean of partial losses in index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidLoss, ModeMismatch, NoSamples

MODE_S = "S"
MODE_S_R = "S_R"
MODE_S_C = "S_C"
MODE_S_R_C = "S_R_C"
MODES = (MODE_S, MODE_S_R, MODE_S_C, MODE_S_R_C)

READ_MODES = frozenset([MODE_S_R, MODE_S_R_C])
COH_MODES = frozenset([MODE_S_C, MODE_S_R_C])

DEFAULT_DELTA = 0.90


@dataclass(frozen=True)
class LossConfig:
    mode: str = MODE_S
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModeMismatch(f"unknown loss mode {self.mode!r}")
        if not (0.0 < self.delta <= 1.0):
            raise InvalidLoss(f"delta must be in (0, 1], got {self.delta}")

    @property
    def uses_read(self) -> bool:
        return self.mode in READ_MODES

    @property
    def uses_coherence(self) -> bool:
        return self.mode in COH_MODES


@dataclass(frozen=True)
class LossBreakdown:
    mode: str
    loss_simp: float
    loss_read: float | None
    coherent: int | None
    partial: float


@dataclass(frozen=True)
class BatchLoss:
    samples: tuple[LossBreakdown, ...]
    total: float
    n: int


def partial_loss(
    loss_simp: float,
    loss_read: float | None,
    coherent: int | None,
    config: LossConfig,
) -> LossBreakdown:
    """Combine per-sample components according to the configured mode."""
    if not math.isfinite(loss_simp) or loss_simp < 0:
        raise InvalidLoss(f"loss_simp must be finite and >= 0, got {loss_simp}")
    if config.uses_read:
        if loss_read is None:
            raise ModeMismatch(f"mode {config.mode} requires loss_read")
        if not math.isfinite(loss_read) or loss_read < 0:
            raise InvalidLoss(f"loss_read must be finite and >= 0, got {loss_read}")
    elif loss_read is not None:
        raise ModeMismatch(f"mode {config.mode} takes no loss_read")
    if config.uses_coherence:
        if coherent not in (0, 1):
            raise ModeMismatch(f"mode {config.mode} requires coherent in {{0, 1}}")
    elif coherent is not None:
        raise ModeMismatch(f"mode {config.mode} takes no coherence flag")

    base = loss_simp if loss_read is None else loss_simp + loss_read
    if config.uses_coherence and coherent == 1:
        partial = config.delta * base
    else:
        partial = base
    return LossBreakdown(
        mode=config.mode,
        loss_simp=loss_simp,
        loss_read=loss_read,
        coherent=coherent,
        partial=partial,
    )


def total_loss(samples: list[LossBreakdown]) -> BatchLoss:
    """Arithmetic mean of partial losses, summed in index order."""
    if not samples:
        raise NoSamples("cannot average an empty batch")
    modes = {s.mode for s in samples}
    if len(modes) > 1:
        raise ModeMismatch(f"mixed loss modes in one batch: {sorted(modes)}")
    acc = 0.0
    for sample in samples:
        acc += sample.partial
    return BatchLoss(samples=tuple(samples), total=acc / len(samples), n=len(samples))


def gating_gradient(coherent: int, config: LossConfig) -> float:
    """d(partial)/d(loss component) for a fixed gate: delta when coherent,
    1 otherwise. The gate itself is not differentiated."""
    if not config.uses_coherence:
        raise ModeMismatch(f"mode {config.mode} has no coherence gate")
    if coherent not in (0, 1):
        raise ModeMismatch(f"coherent must be 0 or 1, got {coherent!r}")
    return config.delta if coherent == 1 else 1.0
