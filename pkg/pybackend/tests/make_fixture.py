"""Build the tiny seeded checkpoint used by the protocol tests.

Byte-level tokenizer (no vocab files needed) plus a minimal randomly
initialized T5, saved under tests/fixtures/tiny_model. Re-run only if the
fixture needs regenerating; the golden transcript is recorded against it.
"""

from pathlib import Path

import torch
from transformers import ByT5Tokenizer, T5Config, T5ForConditionalGeneration

OUT = Path(__file__).parent / "fixtures" / "tiny_model"


def main():
    torch.manual_seed(0)
    tokenizer = ByT5Tokenizer()
    config = T5Config(
        vocab_size=len(tokenizer),
        d_model=32,
        d_kv=8,
        d_ff=64,
        num_layers=2,
        num_decoder_layers=2,
        num_heads=2,
        decoder_start_token_id=tokenizer.pad_token_id,
    )
    model = T5ForConditionalGeneration(config)
    OUT.mkdir(parents=True, exist_ok=True)
    tokenizer.save_pretrained(OUT)
    model.save_pretrained(OUT)
    print(f"saved to {OUT}")


if __name__ == "__main__":
    main()
