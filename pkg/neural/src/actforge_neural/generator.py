"""Tiny encoder-decoder user-utterance generator with beam decoding.

The architecture is a from-scratch T5 configuration over a word-level
vocabulary, so everything runs offline and on CPU; the training objective is
the negative log-likelihood of the user tokens given the dialogue history,
the system utterance and the linearized act.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import torch
from transformers import T5Config, T5ForConditionalGeneration

from .condition import build_source
from .vocab import EOS, PAD, WordVocab


def pick_device() -> str:
    return os.environ.get("ACTFORGE_DEVICE", "cpu")


@dataclass
class GenHyperparams:
    d_model: int = 64
    d_ff: int = 128
    num_layers: int = 2
    num_heads: int = 4
    lr: float = 1e-3
    batch_size: int = 16
    max_source_len: int = 128
    max_target_len: int = 32
    eval_fraction: float = 0.2
    seed: int = 0


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    eval_loss: float


class TinyGenerator:
    def __init__(self, vocab: WordVocab, hp: GenHyperparams, model: T5ForConditionalGeneration):
        self.vocab = vocab
        self.hp = hp
        self.model = model

    @classmethod
    def build(cls, vocab: WordVocab, hp: GenHyperparams | None = None) -> "TinyGenerator":
        hp = hp or GenHyperparams()
        torch.manual_seed(hp.seed)
        config = T5Config(
            vocab_size=len(vocab),
            d_model=hp.d_model,
            d_ff=hp.d_ff,
            num_layers=hp.num_layers,
            num_heads=hp.num_heads,
            d_kv=max(8, hp.d_model // hp.num_heads),
            pad_token_id=PAD,
            eos_token_id=EOS,
            decoder_start_token_id=PAD,
        )
        model = T5ForConditionalGeneration(config).to(pick_device())
        return cls(vocab, hp, model)

    def _batchify(self, encoded: list[tuple[list[int], list[int]]]):
        device = next(self.model.parameters()).device
        bs = self.hp.batch_size
        for start in range(0, len(encoded), bs):
            chunk = encoded[start : start + bs]
            src_len = max(len(s) for s, _ in chunk)
            tgt_len = max(len(t) for _, t in chunk)
            input_ids = torch.full((len(chunk), src_len), PAD, dtype=torch.long)
            attention = torch.zeros((len(chunk), src_len), dtype=torch.long)
            labels = torch.full((len(chunk), tgt_len), -100, dtype=torch.long)
            for i, (src, tgt) in enumerate(chunk):
                input_ids[i, : len(src)] = torch.tensor(src)
                attention[i, : len(src)] = 1
                labels[i, : len(tgt)] = torch.tensor(tgt)
            yield input_ids.to(device), attention.to(device), labels.to(device)

    def _encode_examples(self, examples: list[tuple[str, str]]):
        out = []
        for source, target in examples:
            src = self.vocab.encode(source, max_len=self.hp.max_source_len)
            tgt = self.vocab.encode(target, add_eos=True, max_len=self.hp.max_target_len)
            if src and tgt:
                out.append((src, tgt))
        return out

    def loss_on(self, examples: list[tuple[str, str]]) -> float:
        """Mean token-level NLL of the targets under the current parameters."""
        encoded = self._encode_examples(examples)
        self.model.eval()
        total, count = 0.0, 0
        with torch.no_grad():
            for input_ids, attention, labels in self._batchify(encoded):
                out = self.model(input_ids=input_ids, attention_mask=attention, labels=labels)
                n = int((labels != -100).sum())
                total += float(out.loss) * n
                count += n
        return total / max(count, 1)

    def train_epoch(self, examples: list[tuple[str, str]], optimizer) -> float:
        encoded = self._encode_examples(examples)
        self.model.train()
        total, count = 0.0, 0
        for input_ids, attention, labels in self._batchify(encoded):
            optimizer.zero_grad()
            out = self.model(input_ids=input_ids, attention_mask=attention, labels=labels)
            out.loss.backward()
            optimizer.step()
            n = int((labels != -100).sum())
            total += float(out.loss.detach()) * n
            count += n
        return total / max(count, 1)

    def generate(self, history, system_utterance: str, act_items: list[dict], beam_size: int) -> list[str]:
        """Beam-decode up to beam_size non-empty candidates, best first."""
        source = build_source(history, system_utterance, act_items)
        device = next(self.model.parameters()).device
        ids = self.vocab.encode(source, max_len=self.hp.max_source_len) or [PAD]
        input_ids = torch.tensor([ids], dtype=torch.long, device=device)
        self.model.eval()
        with torch.no_grad():
            sequences = self.model.generate(
                input_ids=input_ids,
                num_beams=beam_size,
                num_return_sequences=beam_size,
                max_new_tokens=self.hp.max_target_len,
                min_new_tokens=2,
                do_sample=False,
            )
        candidates = []
        for row in sequences:
            text = self.vocab.decode(row.tolist()).strip()
            candidates.append(text if text else "ok")
        return candidates[:beam_size]

    def save(self, path) -> None:
        torch.save(
            {
                "vocab": self.vocab.to_dict(),
                "hyperparams": vars(self.hp),
                "state_dict": self.model.state_dict(),
            },
            path,
        )

    @classmethod
    def load(cls, path) -> "TinyGenerator":
        blob = torch.load(path, map_location=pick_device(), weights_only=False)
        vocab = WordVocab.from_dict(blob["vocab"])
        hp = GenHyperparams(**blob["hyperparams"])
        gen = cls.build(vocab, hp)
        gen.model.load_state_dict(blob["state_dict"])
        return gen


def load_corpus_examples(corpus_path) -> list[tuple[str, str]]:
    """(conditioning text, user utterance) pairs from a canonical corpus file."""
    with open(corpus_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    examples = []
    for dialogue in raw["dialogues"]:
        history = []
        for turn in dialogue["turns"]:
            if "user_act" not in turn:
                raise ValueError(
                    f"corpus turn {dialogue['id']}/{turn.get('turn_id')} lacks user_act; "
                    "the generator trains on gold acts"
                )
            source = build_source(history, turn.get("system_utterance", ""), turn["user_act"])
            examples.append((source, turn["user_utterance"]))
            history.append((turn.get("system_utterance", ""), turn["user_utterance"]))
    return examples


def train_generator(
    corpus_path,
    epochs: int,
    hp: GenHyperparams | None = None,
    checkpoint_path=None,
    extra_vocab_texts: list[str] | None = None,
) -> tuple[TinyGenerator, list[EpochLog]]:
    """Fine-tune on a canonical corpus; returns the model and per-epoch losses.

    With epochs=0 the returned checkpoint is the untouched initialization.
    """
    hp = hp or GenHyperparams()
    examples = load_corpus_examples(corpus_path)
    texts = [s for s, _ in examples] + [t for _, t in examples] + (extra_vocab_texts or [])
    vocab = WordVocab.build(texts)
    generator = TinyGenerator.build(vocab, hp)

    n_eval = max(1, int(len(examples) * hp.eval_fraction)) if examples else 0
    eval_examples = examples[:n_eval]
    train_examples = examples[n_eval:]

    optimizer = torch.optim.Adam(generator.model.parameters(), lr=hp.lr)
    history = [EpochLog(0, float("nan"), generator.loss_on(eval_examples))]
    for epoch in range(1, epochs + 1):
        train_loss = generator.train_epoch(train_examples, optimizer)
        history.append(EpochLog(epoch, train_loss, generator.loss_on(eval_examples)))
    if checkpoint_path is not None:
        generator.save(checkpoint_path)
    return generator, history
