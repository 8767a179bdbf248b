import pytest
import torch
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

from conftest import MODEL_DIR
from pybackend.adapter import Adapter, UnparseableLabel


class TestHandshake:
    def test_hello_echo(self, client):
        reply = client.send({"op": "hello", "version": 1})
        assert reply == {"op": "hello", "version": 1}


class TestGoldenTranscript:
    def test_replay(self, client, transcript):
        """Replaying the recorded requests must reproduce every id, ok flag
        and error name. Generated text and loss values are checkpoint
        artifacts and are compared only for shape, not content."""
        assert len(transcript) == 12
        for pair in transcript:
            request, expected = pair["request"], pair["response"]
            actual = client.send(request)
            if request.get("op") == "hello":
                assert actual == expected
                continue
            assert actual["id"] == expected["id"]
            assert actual["ok"] == expected["ok"]
            assert actual["error"] == expected["error"]
            if expected["ok"] and request["op"] == "generate":
                assert isinstance(actual["output"], str) and actual["output"].strip()
            if expected["ok"] and request["op"] in ("score", "train_step"):
                assert isinstance(actual["loss"], float) and actual["loss"] >= 0

    def test_covers_all_ops_and_error_cases(self, transcript):
        ops = [pair["request"].get("op") for pair in transcript]
        for op in ("hello", "generate", "score", "classify", "train_step", "reset"):
            assert op in ops
        errors = {pair["response"].get("error") for pair in transcript if isinstance(pair["response"], dict)}
        assert "unsupported_op" in errors and "unparseable_label" in errors


class TestWireBehavior:
    def test_unsupported_op(self, client):
        reply = client.send({"id": 1, "op": "translate", "task": None,
                             "input": None, "target": None, "config": {}})
        assert reply["ok"] is False and reply["error"] == "unsupported_op"

    def test_ids_echoed_in_order(self, client):
        for i in (5, 9, 2):
            reply = client.send({"id": i, "op": "generate", "task": "simplify",
                                 "input": "simplify: A cat sat.", "target": None,
                                 "config": {}})
            assert reply["id"] == i

    def test_train_step_improves_score(self, client):
        def score():
            return client.send({
                "id": 100, "op": "score", "task": "simplify",
                "input": "simplify: The committee deliberated extensively.",
                "target": "The committee talked.", "config": {},
            })["loss"]

        before = score()
        for step in range(3):
            reply = client.send({
                "id": 200 + step, "op": "train_step", "task": "simplify",
                "input": "simplify: The committee deliberated extensively.",
                "target": "The committee talked.",
                "config": {"gate": 1.0, "with_read": False},
            })
            assert reply["ok"]
        assert score() < before

    def test_reset_restores_checkpoint(self, client):
        def score():
            return client.send({
                "id": 300, "op": "score", "task": "simplify",
                "input": "simplify: Birds sing in the morning.",
                "target": "Birds sing.", "config": {},
            })["loss"]

        baseline = score()
        client.send({
            "id": 301, "op": "train_step", "task": "simplify",
            "input": "simplify: Birds sing in the morning.", "target": "Birds sing.",
            "config": {"gate": 1.0, "with_read": False},
        })
        assert score() != baseline
        assert client.send({"id": 302, "op": "reset", "task": None, "input": None,
                            "target": None, "config": {}})["ok"]
        assert score() == pytest.approx(baseline, abs=1e-6)


class TestScoreSelfConsistency:
    def test_matches_direct_recomputation(self, client):
        """The score op must agree with mean token cross-entropy computed
        directly from the checkpoint's logits."""
        input_text = "simplify: The committee deliberated extensively regarding the proposal."
        target_text = "The committee talked about the plan."
        wire = client.send({
            "id": 1, "op": "score", "task": "simplify",
            "input": input_text, "target": target_text, "config": {},
        })["loss"]

        tokenizer = AutoTokenizer.from_pretrained(MODEL_DIR)
        model = AutoModelForSeq2SeqLM.from_pretrained(MODEL_DIR)
        model.eval()
        inputs = tokenizer(input_text, return_tensors="pt").input_ids
        labels = tokenizer(target_text, return_tensors="pt").input_ids
        with torch.no_grad():
            logits = model(input_ids=inputs, labels=labels).logits
        log_probs = torch.log_softmax(logits, dim=-1)
        picked = log_probs[0, torch.arange(labels.shape[1]), labels[0]]
        manual = float(-picked.mean())
        assert wire == pytest.approx(manual, abs=1e-3)


class TestAdapter:
    def test_classify_is_label_or_structured_error(self):
        adapter = Adapter(str(MODEL_DIR), max_new_tokens=10)
        try:
            label = adapter.classify("read classify: The committee talked.")
        except UnparseableLabel:
            return
        assert label in (1, 2, 3, 4)

    def test_generate_never_empty(self):
        adapter = Adapter(str(MODEL_DIR), max_new_tokens=10)
        out = adapter.generate("simplify: A cat sat on the mat.")
        assert out.strip()
