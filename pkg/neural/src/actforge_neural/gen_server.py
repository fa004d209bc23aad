"""Generator protocol server: beam-decoded candidates over stdio or TCP.

Usage:
  python -m actforge_neural.gen_server --checkpoint ckpt.pt --stdio
  python -m actforge_neural.gen_server --untrained --dict slots.json --port 9410
"""

from __future__ import annotations

import argparse
import json

from .generator import GenHyperparams, TinyGenerator
from .ndjson import serve_stdio, serve_tcp
from .vocab import WordVocab

_BASE_WORDS = (
    "i want would like the a to be for please and also book need it is "
    "yes no same area price day people time food name type stars stay "
    "inform confirm reply refer act ( ) = , ; : | - arrive leave depart dest"
)


def untrained_generator(dict_path, seed: int = 0) -> TinyGenerator:
    """A randomly initialized model whose vocabulary covers the dictionary."""
    with open(dict_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    texts = [_BASE_WORDS]
    for slot, values in raw["slots"].items():
        texts.append(slot.replace("-", " "))
        texts.extend(values)
    return TinyGenerator.build(WordVocab.build(texts), GenHyperparams(seed=seed))


def make_handler(generator: TinyGenerator):
    def handle(request: dict) -> dict:
        if "id" not in request:
            raise ValueError("request lacks an id")
        rid = request["id"]
        beam = int(request.get("beam_size", 1))
        if beam < 1:
            raise ValueError("beam_size must be >= 1")
        history = [tuple(pair) for pair in request.get("history", [])]
        act = request.get("act", [])
        candidates = generator.generate(
            history, request.get("system_utterance", ""), act, beam
        )
        return {"id": rid, "candidates": candidates}

    return handle


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="actforge generator protocol server")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--checkpoint", help="trained checkpoint from train_gen")
    source.add_argument("--untrained", action="store_true", help="random init (needs --dict)")
    parser.add_argument("--dict", help="slot-value dictionary JSON (vocabulary for --untrained)")
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--stdio", action="store_true")
    mode.add_argument("--port", type=int)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.untrained:
        if not args.dict:
            parser.error("--untrained requires --dict")
        generator = untrained_generator(args.dict, seed=args.seed)
    else:
        generator = TinyGenerator.load(args.checkpoint)
    handler = make_handler(generator)
    if args.stdio:
        serve_stdio(handler)
    else:
        serve_tcp(handler, args.host, args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
