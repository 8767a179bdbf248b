"""Echo backend test double for the wire protocol.

Run with ``python -m simdoc.echo_backend``. Generate echoes its input
(minus the control prefix), score always reports 0.0, classify always
answers 1. Useful for protocol tests without any real model.
"""

from __future__ import annotations

import argparse
import json
import sys

PROTOCOL_VERSION = 1
PREFIXES = ("simplify: ", "read classify: ")


def strip_prefix(text: str) -> str:
    for prefix in PREFIXES:
        if text.startswith(prefix):
            return text[len(prefix):]
    return text


def handle(request: dict) -> dict:
    op = request.get("op")
    response = {
        "id": request.get("id"),
        "ok": True,
        "output": None,
        "loss": None,
        "label": None,
        "error": None,
    }
    if op == "generate":
        response["output"] = strip_prefix(request.get("input") or "")
    elif op == "score":
        response["loss"] = 0.0
    elif op == "classify":
        response["label"] = 1
    elif op == "train_step":
        response["loss"] = 0.0
    elif op == "reset":
        pass
    else:
        response["ok"] = False
        response["error"] = "unsupported_op"
    return response


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="echo backend test double")
    parser.add_argument(
        "--protocol-version",
        type=int,
        default=PROTOCOL_VERSION,
        help="advertise a different protocol version (for handshake tests)",
    )
    parser.add_argument(
        "--skip-handshake",
        action="store_true",
        help="never answer the hello (for timeout tests)",
    )
    args = parser.parse_args(argv)

    for line in sys.stdin:
        if not line.strip():
            continue
        message = json.loads(line)
        if message.get("op") == "hello":
            if args.skip_handshake:
                continue
            reply = {"op": "hello", "version": args.protocol_version}
        else:
            reply = handle(message)
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
