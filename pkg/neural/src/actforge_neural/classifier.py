"""Turn-encoder slot classifier: appearance and slot-gate heads per slot.

A turn is encoded as <cls> system-tokens <sep> user-tokens <sep>; the <cls>
position's hidden state feeds one affine appearance head (one logit) and one
affine gate head per slot. Boolean slots classify over {none, dontcare, yes,
no}, span slots over {none, dontcare, value}; gate probabilities come out of
a softmax, so each head's distribution sums to one.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import torch
from torch import nn

from .vocab import CLS, PAD, SEP, WordVocab

BOOL_CLASSES = ("none", "dontcare", "yes", "no")
SPAN_CLASSES = ("none", "dontcare", "value")


def pick_device() -> str:
    return os.environ.get("ACTFORGE_DEVICE", "cpu")


@dataclass
class FilterHyperparams:
    d_model: int = 64
    num_layers: int = 2
    num_heads: int = 4
    d_ff: int = 128
    lr: float = 2e-3
    batch_size: int = 16
    max_len: int = 96
    seed: int = 0


def load_slot_kinds(dict_path) -> dict[str, str]:
    """Slot -> "bool"/"span" from a slot-value dictionary JSON file."""
    with open(dict_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    boolean = set(raw.get("boolean_slots", []))
    return {slot: ("bool" if slot in boolean else "span") for slot in raw["slots"]}


class TurnClassifier(nn.Module):
    def __init__(self, vocab: WordVocab, slot_kinds: dict[str, str], hp: FilterHyperparams):
        super().__init__()
        torch.manual_seed(hp.seed)
        self.vocab = vocab
        self.slot_kinds = dict(slot_kinds)
        self.hp = hp
        self.embedding = nn.Embedding(len(vocab), hp.d_model, padding_idx=PAD)
        self.position = nn.Embedding(hp.max_len, hp.d_model)
        layer = nn.TransformerEncoderLayer(
            d_model=hp.d_model,
            nhead=hp.num_heads,
            dim_feedforward=hp.d_ff,
            batch_first=True,
            dropout=0.1,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=hp.num_layers, enable_nested_tensor=False
        )
        self.appearance_heads = nn.ModuleDict(
            {slot: nn.Linear(hp.d_model, 1) for slot in slot_kinds}
        )
        self.gate_heads = nn.ModuleDict(
            {
                slot: nn.Linear(hp.d_model, 4 if kind == "bool" else 3)
                for slot, kind in slot_kinds.items()
            }
        )

    def encode_turn(self, system_utterance: str, user_utterance: str) -> list[int]:
        budget = self.hp.max_len - 3
        sys_ids = self.vocab.encode(system_utterance)[: budget // 2]
        usr_ids = self.vocab.encode(user_utterance)[: budget - len(sys_ids)]
        return [CLS] + sys_ids + [SEP] + usr_ids + [SEP]

    def cls_vector(self, batch_ids: list[list[int]]) -> torch.Tensor:
        device = next(self.parameters()).device
        width = max(len(ids) for ids in batch_ids)
        input_ids = torch.full((len(batch_ids), width), PAD, dtype=torch.long)
        pad_mask = torch.ones((len(batch_ids), width), dtype=torch.bool)
        for i, ids in enumerate(batch_ids):
            input_ids[i, : len(ids)] = torch.tensor(ids)
            pad_mask[i, : len(ids)] = False
        input_ids = input_ids.to(device)
        pad_mask = pad_mask.to(device)
        positions = torch.arange(width, device=device).unsqueeze(0)
        hidden = self.embedding(input_ids) + self.position(positions)
        encoded = self.encoder(hidden, src_key_padding_mask=pad_mask)
        return encoded[:, 0, :]

    def gate_probs(self, cls_vec: torch.Tensor, slot: str) -> torch.Tensor:
        return torch.softmax(self.gate_heads[slot](cls_vec), dim=-1)

    def predict(
        self, system_utterance: str, user_utterance: str, slots: list[str]
    ) -> dict[str, tuple[bool, str]]:
        """Per-slot (appears, gate class name) for one turn."""
        self.eval()
        with torch.no_grad():
            cls_vec = self.cls_vector([self.encode_turn(system_utterance, user_utterance)])
            out = {}
            for slot in slots:
                if slot not in self.slot_kinds:
                    raise KeyError(f"classifier has no heads for slot {slot}")
                appears = bool(torch.sigmoid(self.appearance_heads[slot](cls_vec))[0, 0] > 0.5)
                probs = self.gate_probs(cls_vec, slot)[0]
                classes = BOOL_CLASSES if self.slot_kinds[slot] == "bool" else SPAN_CLASSES
                out[slot] = (appears, classes[int(probs.argmax())])
            return out

    def save(self, path) -> None:
        torch.save(
            {
                "vocab": self.vocab.to_dict(),
                "slot_kinds": self.slot_kinds,
                "hyperparams": vars(self.hp),
                "state_dict": self.state_dict(),
            },
            path,
        )

    @classmethod
    def load(cls, path) -> "TurnClassifier":
        blob = torch.load(path, map_location=pick_device(), weights_only=False)
        model = cls(
            WordVocab.from_dict(blob["vocab"]),
            blob["slot_kinds"],
            FilterHyperparams(**blob["hyperparams"]),
        )
        model.load_state_dict(blob["state_dict"])
        return model.to(pick_device())


def _gate_label(slot: str, kind: str, act_items: list[dict]) -> int:
    value = None
    for item in act_items:
        if item["slot"] == slot:
            value = item["value"]
    classes = BOOL_CLASSES if kind == "bool" else SPAN_CLASSES
    if value is None:
        return classes.index("none")
    if value == "dontcare":
        return classes.index("dontcare")
    if kind == "bool":
        return classes.index("yes") if value == "yes" else classes.index("no")
    return classes.index("value")


def train_filter(
    corpus_path,
    dict_path,
    epochs: int,
    hp: FilterHyperparams | None = None,
    checkpoint_path=None,
) -> tuple[TurnClassifier, list[float]]:
    """Train appearance and gate heads on gold acts with cross entropy."""
    hp = hp or FilterHyperparams()
    slot_kinds = load_slot_kinds(dict_path)
    with open(corpus_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    turns = []
    for dialogue in raw["dialogues"]:
        for turn in dialogue["turns"]:
            if "user_act" not in turn:
                raise ValueError("corpus lacks user_act annotations")
            turns.append(turn)
    vocab = WordVocab.build(
        [t.get("system_utterance", "") for t in turns] + [t["user_utterance"] for t in turns]
    )
    model = TurnClassifier(vocab, slot_kinds, hp).to(pick_device())
    optimizer = torch.optim.Adam(model.parameters(), lr=hp.lr)
    bce = nn.BCEWithLogitsLoss()
    ce = nn.CrossEntropyLoss()
    losses = []
    slots = sorted(slot_kinds)
    for _ in range(epochs):
        model.train()
        total = 0.0
        for start in range(0, len(turns), hp.batch_size):
            batch = turns[start : start + hp.batch_size]
            ids = [model.encode_turn(t.get("system_utterance", ""), t["user_utterance"]) for t in batch]
            cls_vec = model.cls_vector(ids)
            loss = torch.zeros((), device=cls_vec.device)
            for slot in slots:
                kind = slot_kinds[slot]
                appear_target = torch.tensor(
                    [
                        1.0 if any(it["slot"] == slot for it in t["user_act"]) else 0.0
                        for t in batch
                    ],
                    device=cls_vec.device,
                )
                logits = model.appearance_heads[slot](cls_vec).squeeze(-1)
                loss = loss + bce(logits, appear_target)
                gate_target = torch.tensor(
                    [_gate_label(slot, kind, t["user_act"]) for t in batch],
                    device=cls_vec.device,
                )
                loss = loss + ce(model.gate_heads[slot](cls_vec), gate_target)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss.detach())
        losses.append(total / max(1, (len(turns) + hp.batch_size - 1) // hp.batch_size))
    if checkpoint_path is not None:
        model.save(checkpoint_path)
    return model, losses
