"""Experiment orchestration: zero/few/fine regimes, staged training
schedules, loss modes, evaluation and result emission.

Results are reproducible: the same (config, corpora, seed) produces
byte-identical result files, so wall-clock duration is kept out of them.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from pathlib import Path

from . import metrics
from .backend import train_step
from .coherence import CoherenceModel
from .corpus import SPLIT_TEST, SPLIT_TRAIN, SimplificationInstance
from .errors import ConfigError, NoSamples
from .loss import BatchLoss, LossConfig, MODES

REGIMES = ("zero", "few", "fine")


@dataclass(frozen=True)
class ExperimentConfig:
    regime: str
    loss_mode: LossConfig
    eval_corpus: str
    stages: tuple[tuple[str, int], ...] = ()
    few_shot_samples: int = 10
    few_shot_epochs: int = 1
    fine_epochs: int = 5
    seed: int = 0
    frame: int = 10
    warmup_epochs: int = 0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ConfigError(f"unknown regime {self.regime!r}")
        if self.regime == "zero" and self.stages:
            raise ConfigError("zero regime takes no training stages")
        if self.regime in ("few", "fine") and not self.stages:
            raise ConfigError(f"{self.regime} regime needs at least one stage")

    def to_mapping(self) -> dict[str, str]:
        return {
            "regime": self.regime,
            "loss_mode": self.loss_mode.mode,
            "delta": repr(self.loss_mode.delta),
            "eval_corpus": self.eval_corpus,
            "stages": ",".join(f"{cid}:{epochs}" for cid, epochs in self.stages),
            "few_shot_samples": str(self.few_shot_samples),
            "few_shot_epochs": str(self.few_shot_epochs),
            "fine_epochs": str(self.fine_epochs),
            "seed": str(self.seed),
            "frame": str(self.frame),
            "warmup_epochs": str(self.warmup_epochs),
        }


@dataclass(frozen=True)
class TraceEntry:
    stage: str
    epoch: int
    batch: BatchLoss


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    trace: tuple[TraceEntry, ...]
    report: metrics.MetricsReport
    duration: float


def config_to_text(config: ExperimentConfig, extras: dict[str, str] | None = None) -> str:
    lines = [f"{key} = {value}" for key, value in config.to_mapping().items()]
    for key, value in (extras or {}).items():
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> tuple[ExperimentConfig, dict[str, str]]:
    """Parse the flat key-value config format; unknown keys (corpus paths,
    model paths) are returned separately for the caller to resolve."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()

    known = {
        "regime", "loss_mode", "delta", "eval_corpus", "stages",
        "few_shot_samples", "few_shot_epochs", "fine_epochs", "seed",
        "frame", "warmup_epochs",
    }
    extras = {k: v for k, v in values.items() if k not in known}
    try:
        mode = values.get("loss_mode", "S")
        if mode not in MODES:
            raise ConfigError(f"unknown loss_mode {mode!r}")
        stages: tuple[tuple[str, int], ...] = ()
        if values.get("stages"):
            parsed = []
            for piece in values["stages"].split(","):
                corpus_id, _, epochs = piece.strip().partition(":")
                parsed.append((corpus_id, int(epochs) if epochs else -1))
            stages = tuple(parsed)
        config = ExperimentConfig(
            regime=values.get("regime", "zero"),
            loss_mode=LossConfig(mode=mode, delta=float(values.get("delta", "0.90"))),
            eval_corpus=values["eval_corpus"],
            stages=stages,
            few_shot_samples=int(values.get("few_shot_samples", "10")),
            few_shot_epochs=int(values.get("few_shot_epochs", "1")),
            fine_epochs=int(values.get("fine_epochs", "5")),
            seed=int(values.get("seed", "0")),
            frame=int(values.get("frame", "10")),
            warmup_epochs=int(values.get("warmup_epochs", "0")),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return config, extras


def evaluate(
    backend,
    test: list[SimplificationInstance],
    coherence_model: CoherenceModel,
    frame: int = 10,
) -> metrics.MetricsReport:
    """Score a frozen backend on test instances: D-SARI of predictions
    against the single gold target, readability of sources (_c columns) and
    predictions (_s columns), and the coherence rate of predictions."""
    if not test:
        raise NoSamples("evaluation needs at least one test instance")
    d_sari_sum = fkgl_c = fkgl_s = fre_c = fre_s = 0.0
    predictions = []
    for instance in test:
        prediction = backend.generate(instance.source)
        predictions.append(prediction)
        d_sari_sum += metrics.d_sari(instance.source, prediction, [instance.target])
        fkgl_c += metrics.fkgl(instance.source)
        fkgl_s += metrics.fkgl(prediction)
        fre_c += metrics.fre(instance.source)
        fre_s += metrics.fre(prediction)
    n = len(test)
    return metrics.MetricsReport(
        d_sari_s=d_sari_sum / n,
        fkgl_c=fkgl_c / n,
        fkgl_s=fkgl_s / n,
        fre_c=fre_c / n,
        fre_s=fre_s / n,
        coh_s=metrics.coherence_rate(predictions, coherence_model),
        n_samples=n,
    )


def _train_split(instances: list[SimplificationInstance]) -> list[SimplificationInstance]:
    return [i for i in instances if i.split == SPLIT_TRAIN]


def _test_split(instances: list[SimplificationInstance]) -> list[SimplificationInstance]:
    return [i for i in instances if i.split == SPLIT_TEST]


def run_experiment(
    config: ExperimentConfig,
    corpora: dict[str, list[SimplificationInstance]],
    backend,
    coherence_model: CoherenceModel,
) -> ExperimentResult:
    started = time.perf_counter()
    if config.eval_corpus not in corpora:
        raise ConfigError(f"unknown eval corpus {config.eval_corpus!r}")
    for corpus_id, _ in config.stages:
        if corpus_id not in corpora:
            raise ConfigError(f"unknown training corpus {corpus_id!r}")

    rng = random.Random(config.seed)
    trace: list[TraceEntry] = []
    if config.regime == "few":
        corpus_id = config.stages[0][0]
        pool = list(_train_split(corpora[corpus_id]))
        rng.shuffle(pool)
        batch = pool[: config.few_shot_samples]
        for epoch in range(1, config.few_shot_epochs + 1):
            gate_active = epoch > config.warmup_epochs
            result = train_step(
                backend, batch, config.loss_mode, coherence_model, gate_active
            )
            trace.append(TraceEntry(stage=corpus_id, epoch=epoch, batch=result))
    elif config.regime == "fine":
        for corpus_id, stage_epochs in config.stages:
            epochs = stage_epochs if stage_epochs > 0 else config.fine_epochs
            train = _train_split(corpora[corpus_id])
            for epoch in range(1, epochs + 1):
                order = list(train)
                rng.shuffle(order)
                gate_active = epoch > config.warmup_epochs
                result = train_step(
                    backend, order, config.loss_mode, coherence_model, gate_active
                )
                trace.append(TraceEntry(stage=corpus_id, epoch=epoch, batch=result))

    report = evaluate(
        backend, _test_split(corpora[config.eval_corpus]), coherence_model, config.frame
    )
    return ExperimentResult(
        config=config,
        trace=tuple(trace),
        report=report,
        duration=time.perf_counter() - started,
    )


def write_result(
    result: ExperimentResult,
    out_dir,
    model_name: str = "builtin",
    extras: dict[str, str] | None = None,
) -> None:
    """Emit report.tsv, report.txt, trace.ndjson and config.txt. Duration is
    deliberately excluded so repeated seeded runs are byte-identical."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    row = metrics.report_row(
        model_name,
        result.config.eval_corpus,
        result.config.loss_mode.mode,
        result.config.regime,
        result.report,
    )
    (out / "report.tsv").write_text(metrics.rows_to_tsv([row]), encoding="utf-8")
    (out / "report.txt").write_text(metrics.rows_to_table([row]), encoding="utf-8")
    with open(out / "trace.ndjson", "w", encoding="utf-8") as handle:
        for entry in result.trace:
            handle.write(
                json.dumps(
                    {
                        "stage": entry.stage,
                        "epoch": entry.epoch,
                        "total": entry.batch.total,
                        "n": entry.batch.n,
                    }
                )
                + "\n"
            )
    (out / "config.txt").write_text(
        config_to_text(result.config, extras), encoding="utf-8"
    )


def compare_regimes(
    configs: list[ExperimentConfig],
    corpora: dict[str, list[SimplificationInstance]],
    backend_factory,
    coherence_model: CoherenceModel,
    model_name: str = "builtin",
) -> tuple[list[dict[str, str]], list[ExperimentResult]]:
    """Run each config on a fresh backend and lay the reports out as table
    rows; the best D-SARI within each loss-mode group is flagged with '*'."""
    if not configs:
        raise ConfigError("compare needs at least one config")
    eval_corpora = {c.eval_corpus for c in configs}
    if len(eval_corpora) > 1:
        raise ConfigError(f"configs disagree on the test corpus: {sorted(eval_corpora)}")
    results = []
    rows = []
    for config in configs:
        result = run_experiment(config, corpora, backend_factory(), coherence_model)
        results.append(result)
        rows.append(
            metrics.report_row(
                model_name,
                config.eval_corpus,
                config.loss_mode.mode,
                config.regime,
                result.report,
            )
        )
    best: dict[str, int] = {}
    for index, (config, result) in enumerate(zip(configs, results)):
        group = config.loss_mode.mode
        if group not in best or result.report.d_sari_s > results[best[group]].report.d_sari_s:
            best[group] = index
    for index in best.values():
        rows[index]["D-SARI_S"] += "*"
    return rows, results
