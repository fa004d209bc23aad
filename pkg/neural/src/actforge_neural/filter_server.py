"""Filter protocol server: per-slot appearance and gate classes over stdio or TCP.

Usage:
  python -m actforge_neural.filter_server --checkpoint ckpt.pt --stdio
  python -m actforge_neural.filter_server --untrained --dict slots.json --port 9411
"""

from __future__ import annotations

import argparse
import json

from .classifier import FilterHyperparams, TurnClassifier, load_slot_kinds
from .ndjson import serve_stdio, serve_tcp
from .vocab import WordVocab


def untrained_classifier(dict_path, seed: int = 0) -> TurnClassifier:
    with open(dict_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    texts = ["yes no dontcare i want need the a any care matter"]
    for slot, values in raw["slots"].items():
        texts.append(slot.replace("-", " "))
        texts.extend(values)
    vocab = WordVocab.build(texts)
    return TurnClassifier(vocab, load_slot_kinds(dict_path), FilterHyperparams(seed=seed))


def make_handler(classifier: TurnClassifier):
    def handle(request: dict) -> dict:
        if "id" not in request:
            raise ValueError("request lacks an id")
        rid = request["id"]
        wanted = []
        for spec in request.get("slots", []):
            slot, kind = spec["slot"], spec.get("kind")
            registered = classifier.slot_kinds.get(slot)
            if registered is None:
                raise ValueError(f"no heads for slot {slot}")
            if kind is not None and kind != registered:
                raise ValueError(f"slot {slot} is {registered}, request says {kind}")
            wanted.append(slot)
        predictions = classifier.predict(
            request.get("system_utterance", ""), request.get("user_utterance", ""), wanted
        )
        return {
            "id": rid,
            "results": [
                {"slot": slot, "appears": appears, "gate": gate}
                for slot, (appears, gate) in predictions.items()
            ],
        }

    return handle


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="actforge filter protocol server")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--checkpoint", help="trained checkpoint from train_filter")
    source.add_argument("--untrained", action="store_true", help="random init (needs --dict)")
    parser.add_argument("--dict", help="slot-value dictionary JSON")
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--stdio", action="store_true")
    mode.add_argument("--port", type=int)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.untrained:
        if not args.dict:
            parser.error("--untrained requires --dict")
        classifier = untrained_classifier(args.dict, seed=args.seed)
    else:
        classifier = TurnClassifier.load(args.checkpoint)
    handler = make_handler(classifier)
    if args.stdio:
        serve_stdio(handler)
    else:
        serve_tcp(handler, args.host, args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
