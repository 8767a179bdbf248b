import pytest

from simdoc.backend import BuiltinBackend
from simdoc.coherence import train_coherence
from simdoc.corpus import build_newsela_s, generate_synthetic_corpus
from simdoc.errors import ConfigError
from simdoc.harness import (
    ExperimentConfig,
    compare_regimes,
    config_to_text,
    evaluate,
    parse_config_text,
    run_experiment,
    write_result,
)
from simdoc.loss import LossConfig


@pytest.fixture(scope="module")
def corpora():
    articles = generate_synthetic_corpus(seed=3, n_articles=120)
    instances, _ = build_newsela_s(articles)
    return {"synthetic": instances}


@pytest.fixture(scope="module")
def coherence_model(coherence_examples):
    return train_coherence(coherence_examples, seed=0)


def config(regime="fine", mode="S", **kwargs):
    stages = () if regime == "zero" else kwargs.pop("stages", (("synthetic", 2),))
    return ExperimentConfig(
        regime=regime,
        loss_mode=LossConfig(mode),
        eval_corpus="synthetic",
        stages=stages,
        **kwargs,
    )


class TestConfigValidation:
    def test_zero_takes_no_stages(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(
                regime="zero",
                loss_mode=LossConfig("S"),
                eval_corpus="x",
                stages=(("x", 1),),
            )

    def test_training_regimes_need_stages(self):
        for regime in ("few", "fine"):
            with pytest.raises(ConfigError):
                ExperimentConfig(regime=regime, loss_mode=LossConfig("S"), eval_corpus="x")

    def test_unknown_regime(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(regime="many", loss_mode=LossConfig("S"), eval_corpus="x")


class TestConfigText:
    def test_round_trip(self):
        original = config(
            regime="fine",
            mode="S_C",
            stages=(("synthetic", 3), ("other", 1)),
            seed=7,
            warmup_epochs=2,
        )
        parsed, extras = parse_config_text(config_to_text(original))
        assert parsed == original
        assert extras == {}

    def test_extras_preserved(self):
        text = config_to_text(config(), extras={"corpus.synthetic": "/tmp/c.ndjson"})
        parsed, extras = parse_config_text(text)
        assert extras == {"corpus.synthetic": "/tmp/c.ndjson"}

    def test_comments_and_blanks_ignored(self):
        text = "# a comment\n\n" + config_to_text(config())
        parsed, _ = parse_config_text(text)
        assert parsed.regime == "fine"

    def test_malformed_line(self):
        with pytest.raises(ConfigError):
            parse_config_text("regime zero\n")

    def test_missing_eval_corpus(self):
        with pytest.raises(ConfigError):
            parse_config_text("regime = zero\n")

    def test_bad_loss_mode(self):
        with pytest.raises(ConfigError):
            parse_config_text("regime = zero\nloss_mode = Q\neval_corpus = x\n")


class TestRunExperiment:
    def test_zero_has_empty_trace(self, corpora, coherence_model):
        result = run_experiment(
            config(regime="zero"), corpora, BuiltinBackend(), coherence_model
        )
        assert result.trace == ()
        assert result.report.n_samples > 0

    def test_few_uses_ten_samples_one_epoch(self, corpora, coherence_model):
        result = run_experiment(
            config(regime="few", stages=(("synthetic", 1),)),
            corpora,
            BuiltinBackend(),
            coherence_model,
        )
        assert len(result.trace) == 1
        assert result.trace[0].batch.n == 10

    def test_fine_stage_order_and_epochs(self, corpora, coherence_model):
        result = run_experiment(
            config(regime="fine", stages=(("synthetic", 3),)),
            corpora,
            BuiltinBackend(),
            coherence_model,
        )
        assert [(e.stage, e.epoch) for e in result.trace] == [
            ("synthetic", 1),
            ("synthetic", 2),
            ("synthetic", 3),
        ]

    def test_unknown_corpus(self, corpora, coherence_model):
        bad = ExperimentConfig(
            regime="zero", loss_mode=LossConfig("S"), eval_corpus="missing"
        )
        with pytest.raises(ConfigError):
            run_experiment(bad, corpora, BuiltinBackend(), coherence_model)

    def test_fine_beats_zero(self, corpora, coherence_model):
        zero = run_experiment(
            config(regime="zero"), corpora, BuiltinBackend(), coherence_model
        )
        fine = run_experiment(
            config(regime="fine", stages=(("synthetic", 3),)),
            corpora,
            BuiltinBackend(),
            coherence_model,
        )
        assert fine.report.d_sari_s > zero.report.d_sari_s

    def test_warmup_gates_later_epochs_only(self, corpora, coherence_model):
        result = run_experiment(
            config(regime="fine", mode="S_C", stages=(("synthetic", 2),), warmup_epochs=1),
            corpora,
            BuiltinBackend(),
            coherence_model,
        )
        first, second = result.trace
        assert all(b.coherent == 0 for b in first.batch.samples)
        assert any(b.coherent == 1 for b in second.batch.samples)


class TestWriteResult:
    def test_files_and_determinism(self, tmp_path, corpora, coherence_model):
        cfg = config(regime="fine", stages=(("synthetic", 2),))
        outputs = []
        for name in ("a", "b"):
            result = run_experiment(cfg, corpora, BuiltinBackend(), coherence_model)
            out = tmp_path / name
            write_result(result, out)
            outputs.append(
                {
                    p.name: p.read_bytes()
                    for p in sorted(out.iterdir())
                }
            )
        assert set(outputs[0]) == {"report.tsv", "report.txt", "trace.ndjson", "config.txt"}
        assert outputs[0] == outputs[1]

    def test_config_text_round_trips_from_disk(self, tmp_path, corpora, coherence_model):
        cfg = config(regime="zero")
        result = run_experiment(cfg, corpora, BuiltinBackend(), coherence_model)
        write_result(result, tmp_path)
        parsed, _ = parse_config_text((tmp_path / "config.txt").read_text())
        assert parsed == cfg


class TestCompareRegimes:
    def test_best_flagged_per_mode(self, corpora, coherence_model):
        configs = [
            config(regime="zero"),
            config(regime="fine", stages=(("synthetic", 2),)),
        ]
        rows, results = compare_regimes(
            configs, corpora, BuiltinBackend, coherence_model
        )
        starred = [r for r in rows if r["D-SARI_S"].endswith("*")]
        assert len(starred) == 1
        assert starred[0]["Setting"] == "fine"

    def test_mismatched_eval_corpora(self, corpora, coherence_model):
        a = config(regime="zero")
        b = ExperimentConfig(regime="zero", loss_mode=LossConfig("S"), eval_corpus="other")
        with pytest.raises(ConfigError):
            compare_regimes([a, b], corpora, BuiltinBackend, coherence_model)

    def test_empty(self, corpora, coherence_model):
        with pytest.raises(ConfigError):
            compare_regimes([], corpora, BuiltinBackend, coherence_model)
