"""Synthetic canonical-schema corpora for smoke training, built from a dictionary file."""

from __future__ import annotations

import argparse
import json
import random

_TEMPLATES = (
    "i want {value} for the {words}",
    "the {words} should be {value}",
    "{value} for the {words} please",
    "i would like the {words} to be {value}",
)


def build_synthetic_corpus(dict_path, dialogues: int = 25, turns: int = 4, seed: int = 0) -> dict:
    with open(dict_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    slots = sorted(raw["slots"])
    rng = random.Random(seed)
    out = []
    for d in range(dialogues):
        belief: dict[str, str] = {}
        turn_list = []
        for t in range(turns):
            slot = rng.choice(slots)
            values = [v for v in raw["slots"][slot] if v != "dontcare"] or raw["slots"][slot]
            value = rng.choice(values)
            words = slot.replace("-", " ")
            utterance = rng.choice(_TEMPLATES).format(value=value, words=words)
            belief[slot] = value
            turn_list.append(
                {
                    "turn_id": t,
                    "system_utterance": "" if t == 0 else "ok, anything else?",
                    "system_acts": [],
                    "user_utterance": utterance,
                    "user_act": [
                        {"act_type": "inform", "slot": slot, "value": value, "refer": None}
                    ],
                    "belief_state": dict(belief),
                }
            )
        out.append({"id": f"synth-{d:04d}", "turns": turn_list})
    return {"dialogues": out}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="emit a synthetic canonical corpus")
    parser.add_argument("--dict", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--dialogues", type=int, default=25)
    parser.add_argument("--turns", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    corpus = build_synthetic_corpus(args.dict, args.dialogues, args.turns, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(corpus, fh, ensure_ascii=False, indent=1)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
