import json
import subprocess
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
MODEL_DIR = FIXTURES / "tiny_model"
TRANSCRIPT = FIXTURES / "golden_transcript.ndjson"


class WireClient:
    """Minimal protocol client used only by tests; speaks raw NDJSON."""

    def __init__(self, model_dir=MODEL_DIR):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "pybackend.serve", "--model", str(model_dir)],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def send(self, message: dict) -> dict:
        self.proc.stdin.write(json.dumps(message) + "\n")
        self.proc.stdin.flush()
        return json.loads(self.proc.stdout.readline())

    def close(self):
        self.proc.stdin.close()
        self.proc.wait(timeout=10)


@pytest.fixture()
def client():
    wire = WireClient()
    yield wire
    wire.close()


@pytest.fixture(scope="session")
def transcript():
    with open(TRANSCRIPT, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
