"""Long-running protocol loop: newline-delimited JSON over stdin/stdout.

Run with: simdoc-pybackend --model <checkpoint>  (or python -m pybackend.serve)

The first message must be the hello handshake; afterwards each request
carries id/op/task/input/target/config and gets exactly one response that
echoes the id. One request is in flight at a time.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adapter import Adapter, DEFAULT_MAX_NEW_TOKENS, UnparseableLabel

PROTOCOL_VERSION = 1


def handle(adapter: Adapter, request: dict) -> dict:
    response = {
        "id": request.get("id"),
        "ok": True,
        "output": None,
        "loss": None,
        "label": None,
        "error": None,
    }
    op = request.get("op")
    try:
        if op == "generate":
            response["output"] = adapter.generate(request.get("input") or "")
        elif op == "score":
            response["loss"] = adapter.score(
                request.get("input") or "", str(request.get("target") or "")
            )
        elif op == "classify":
            response["label"] = adapter.classify(request.get("input") or "")
        elif op == "train_step":
            response["loss"] = adapter.train_step(
                request.get("input") or "",
                str(request.get("target") or ""),
                request.get("config") or {},
            )
        elif op == "reset":
            adapter.reset()
        else:
            response["ok"] = False
            response["error"] = "unsupported_op"
    except UnparseableLabel:
        response["ok"] = False
        response["error"] = "unparseable_label"
    return response


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="stdio backend adapter")
    parser.add_argument("--model", required=True, help="checkpoint path or hub id")
    parser.add_argument("--max-new-tokens", type=int, default=DEFAULT_MAX_NEW_TOKENS)
    args = parser.parse_args(argv)

    adapter = Adapter(args.model, max_new_tokens=args.max_new_tokens)
    for line in sys.stdin:
        if not line.strip():
            continue
        message = json.loads(line)
        if message.get("op") == "hello":
            reply = {"op": "hello", "version": PROTOCOL_VERSION}
        else:
            reply = handle(adapter, message)
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
