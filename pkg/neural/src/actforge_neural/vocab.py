"""Word-level vocabulary with punctuation-splitting tokenization."""

from __future__ import annotations

import re

PAD, EOS, UNK, CLS, SEP = 0, 1, 2, 3, 4
SPECIALS = ["<pad>", "<eos>", "<unk>", "<cls>", "<sep>"]

_TOKEN = re.compile(r"[a-z0-9:']+|[^\sa-z0-9:']")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


class WordVocab:
    def __init__(self, tokens: list[str]):
        self.itos = list(SPECIALS) + [t for t in tokens if t not in SPECIALS]
        self.stoi = {t: i for i, t in enumerate(self.itos)}

    @classmethod
    def build(cls, texts, min_count: int = 1) -> "WordVocab":
        counts: dict[str, int] = {}
        for text in texts:
            for tok in tokenize(text):
                counts[tok] = counts.get(tok, 0) + 1
        kept = sorted(t for t, c in counts.items() if c >= min_count)
        return cls(kept)

    def __len__(self) -> int:
        return len(self.itos)

    def encode(self, text: str, add_eos: bool = False, max_len: int | None = None) -> list[int]:
        ids = [self.stoi.get(t, UNK) for t in tokenize(text)]
        if max_len is not None:
            ids = ids[: max_len - (1 if add_eos else 0)]
        if add_eos:
            ids.append(EOS)
        return ids

    def decode(self, ids) -> str:
        words = []
        for i in ids:
            i = int(i)
            if i in (PAD, EOS, CLS, SEP):
                continue
            words.append(self.itos[i] if 0 <= i < len(self.itos) else "<unk>")
        return " ".join(words)

    def to_dict(self) -> dict:
        return {"tokens": self.itos[len(SPECIALS):]}

    @classmethod
    def from_dict(cls, raw: dict) -> "WordVocab":
        return cls(list(raw["tokens"]))
