import json

import pytest

from simdoc.cli import main
from simdoc.coherence import load_model, save_model, train_coherence
from simdoc.corpus import generate_synthetic_corpus, read_corpus


def write_leveled_dir(path, n_articles=5, levels=(0, 1, 2, 3, 4), seed=11):
    articles = generate_synthetic_corpus(seed, n_articles)
    path.mkdir()
    for article in articles:
        for level in levels:
            (path / f"{article.article_id}.{level}.txt").write_text(
                article.versions[level], encoding="utf-8"
            )
    return articles


class TestBuildCorpus:
    def test_newsela_sl_counts(self, tmp_path, capsys):
        in_dir = tmp_path / "raw"
        write_leveled_dir(in_dir, n_articles=5)
        out = tmp_path / "corpus.ndjson"
        code = main(["build-corpus", "--scheme", "newsela-sl",
                     "--in", str(in_dir), "--out", str(out)])
        assert code == 0
        assert "20 instances" in capsys.readouterr().out
        assert len(read_corpus(out)) == 20

    def test_newsela_s_skip_report(self, tmp_path, capsys):
        in_dir = tmp_path / "raw"
        write_leveled_dir(in_dir, n_articles=3, levels=(0, 1, 2))
        out = tmp_path / "corpus.ndjson"
        code = main(["build-corpus", "--scheme", "newsela-s",
                     "--in", str(in_dir), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "0 instances" in stdout and "3 skipped" in stdout

    def test_synthetic(self, tmp_path, capsys):
        out = tmp_path / "corpus.ndjson"
        code = main(["build-corpus", "--scheme", "synthetic",
                     "--out", str(out), "--n", "4", "--seed", "2"])
        assert code == 0
        assert "16 instances" in capsys.readouterr().out

    def test_pairs(self, tmp_path, capsys):
        in_dir = tmp_path / "raw"
        in_dir.mkdir()
        (in_dir / "a.src.txt").write_text("The committee deliberated today.")
        (in_dir / "a.tgt.txt").write_text("The group talked today.")
        out = tmp_path / "corpus.ndjson"
        code = main(["build-corpus", "--scheme", "pairs",
                     "--in", str(in_dir), "--out", str(out)])
        assert code == 0
        assert "1 instances" in capsys.readouterr().out

    def test_missing_input_dir_is_usage_error(self, tmp_path, capsys):
        code = main(["build-corpus", "--scheme", "newsela-s",
                     "--in", str(tmp_path / "absent"), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "does not exist" in capsys.readouterr().err

    def test_domain_error_exit_one(self, tmp_path, capsys):
        in_dir = tmp_path / "raw"
        write_leveled_dir(in_dir, n_articles=1, levels=(1, 4))
        code = main(["build-corpus", "--scheme", "newsela-s",
                     "--in", str(in_dir), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "MissingComplex" in capsys.readouterr().err

    def test_gcdc(self, tmp_path, capsys):
        raw = tmp_path / "gcdc.ndjson"
        raw.write_text(json.dumps({"text": "One thing. Another thing.",
                                   "expert_ratings": [3, 3, 2]}) + "\n")
        out = tmp_path / "labeled.ndjson"
        code = main(["build-corpus", "--scheme", "gcdc",
                     "--in", str(raw), "--out", str(out)])
        assert code == 0
        record = json.loads(out.read_text().splitlines()[0])
        assert record["consensus_class"] == "high" and record["binary_label"] == 1


class TestScore:
    def make_files(self, tmp_path):
        src = tmp_path / "src.txt"
        pred = tmp_path / "pred.txt"
        ref = tmp_path / "ref.txt"
        src.write_text("The big cat sat on the mat. It was warm.\n")
        pred.write_text("The cat sat. It was warm.\n")
        ref.write_text("The cat sat. It was warm.\n")
        return src, pred, ref

    def test_table(self, tmp_path, capsys):
        src, pred, ref = self.make_files(tmp_path)
        code = main(["score", "--source", str(src), "--prediction", str(pred),
                     "--reference", str(ref)])
        assert code == 0
        out = capsys.readouterr().out
        assert "D-SARI" in out and "100.000" in out

    def test_tsv(self, tmp_path, capsys):
        src, pred, ref = self.make_files(tmp_path)
        code = main(["score", "--source", str(src), "--prediction", str(pred),
                     "--reference", str(ref), "--format", "tsv"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split("\t") == ["FKGL", "FRE", "SARI", "D-SARI"]
        assert len(lines[1].split("\t")) == 4

    def test_count_mismatch(self, tmp_path, capsys):
        src, pred, ref = self.make_files(tmp_path)
        src.write_text(src.read_text() + "Another document here.\n")
        code = main(["score", "--source", str(src), "--prediction", str(pred),
                     "--reference", str(ref)])
        assert code == 2

    def test_missing_file(self, tmp_path):
        src, pred, ref = self.make_files(tmp_path)
        code = main(["score", "--source", str(tmp_path / "nope.txt"),
                     "--prediction", str(pred), "--reference", str(ref)])
        assert code == 2


def write_gcdc_training_file(path, n=40, seed=5):
    # ordered documents rated coherent, shuffled ones incoherent
    from conftest import ordered_vs_shuffled
    from simdoc.textproc import document_text

    examples = ordered_vs_shuffled(n_articles=n, seed=seed)
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(json.dumps({
                "text": document_text(example.document).replace("\n", " "),
                "expert_ratings": list(example.expert_ratings),
            }) + "\n")


class TestTrainCoherence:
    def test_trains_and_saves(self, tmp_path, capsys):
        raw = tmp_path / "train.ndjson"
        write_gcdc_training_file(raw)
        out = tmp_path / "model.txt"
        code = main(["train-coherence", "--in", str(raw), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        initial = float(stdout.split("initial_loss")[1].split()[0])
        final = float(stdout.split("final_loss")[1].split()[0])
        assert final < initial
        assert load_model(out).weights.shape == (6,)

    def test_seed_env_override(self, tmp_path, monkeypatch):
        raw = tmp_path / "train.ndjson"
        write_gcdc_training_file(raw)
        out_a, out_b = tmp_path / "a.txt", tmp_path / "b.txt"
        monkeypatch.setenv("SIMDOC_SEED", "3")
        assert main(["train-coherence", "--in", str(raw), "--out", str(out_a)]) == 0
        assert main(["train-coherence", "--in", str(raw), "--out", str(out_a.with_name('a2.txt'))]) == 0
        monkeypatch.delenv("SIMDOC_SEED")
        assert main(["train-coherence", "--in", str(raw), "--out", str(out_b),
                     "--seed", "3"]) == 0
        assert (tmp_path / "a.txt").read_text() == out_b.read_text()


class TestExperiments:
    @pytest.fixture()
    def setup(self, tmp_path, coherence_examples):
        corpus_path = tmp_path / "synthetic.ndjson"
        assert main(["build-corpus", "--scheme", "synthetic", "--out", str(corpus_path),
                     "--n", "60", "--seed", "3", "--pairing", "s"]) == 0
        model_path = tmp_path / "coherence.txt"
        save_model(train_coherence(coherence_examples, seed=0), model_path)
        return tmp_path, corpus_path, model_path

    def write_config(self, tmp_path, corpus_path, model_path, regime, name, stages=""):
        lines = [
            f"regime = {regime}",
            "loss_mode = S",
            "eval_corpus = synthetic",
            f"corpus.synthetic = {corpus_path}",
            f"coherence_model = {model_path}",
        ]
        if stages:
            lines.append(f"stages = {stages}")
        path = tmp_path / f"{name}.cfg"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_run_experiment_outputs(self, setup, capsys):
        tmp_path, corpus_path, model_path = setup
        cfg = self.write_config(tmp_path, corpus_path, model_path, "fine", "fine",
                                stages="synthetic:2")
        out = tmp_path / "run"
        code = main(["run-experiment", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        assert (out / "report.tsv").is_file()
        assert (out / "trace.ndjson").read_text().count("\n") == 2
        assert "D-SARI_S" in capsys.readouterr().out

    def test_run_experiment_deterministic(self, setup, capsys):
        tmp_path, corpus_path, model_path = setup
        cfg = self.write_config(tmp_path, corpus_path, model_path, "fine", "det",
                                stages="synthetic:1")
        for name in ("r1", "r2"):
            assert main(["run-experiment", "--config", str(cfg),
                         "--out", str(tmp_path / name)]) == 0
        capsys.readouterr()
        for filename in ("report.tsv", "trace.ndjson", "config.txt"):
            assert (tmp_path / "r1" / filename).read_bytes() == \
                (tmp_path / "r2" / filename).read_bytes()

    def test_compare(self, setup, capsys):
        tmp_path, corpus_path, model_path = setup
        zero = self.write_config(tmp_path, corpus_path, model_path, "zero", "zero")
        fine = self.write_config(tmp_path, corpus_path, model_path, "fine", "fine",
                                 stages="synthetic:2")
        out = tmp_path / "cmp"
        code = main(["compare", str(zero), str(fine), "--out", str(out)])
        assert code == 0
        table = capsys.readouterr().out
        assert "*" in table
        assert (out / "comparison.tsv").is_file()

    def test_bad_config_exit_two(self, setup, capsys):
        tmp_path, corpus_path, model_path = setup
        bad = tmp_path / "bad.cfg"
        bad.write_text("regime = zero\n")  # no eval_corpus
        code = main(["run-experiment", "--config", str(bad), "--out", str(tmp_path / "x")])
        assert code == 2
        assert "ConfigError" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        code = main(["run-experiment", "--config", str(tmp_path / "nope.cfg"),
                     "--out", str(tmp_path / "x")])
        assert code == 2
