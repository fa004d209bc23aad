"""Evaluation and analysis: joint goal accuracy, slot-type F1, slot distributions."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .augment import AugRecord
from .corpus import DONTCARE, CorefList, Corpus, SlotValueDict, Turn, slot_domain
from .text import contains_value, normalize

log = logging.getLogger(__name__)

# Slot classes of the six-way typology used in the per-type analysis.
CLASS_DONTCARE = "dontcare"
CLASS_SPAN = "span"
CLASS_TRUE = "true"
CLASS_FALSE = "false"
CLASS_REFER = "refer"
CLASS_INFORM = "inform"
SLOT_CLASSES = (CLASS_DONTCARE, CLASS_SPAN, CLASS_TRUE, CLASS_FALSE, CLASS_REFER, CLASS_INFORM)

PredictionSet = dict[tuple[str, int], dict[str, str]]


def load_predictions(path) -> PredictionSet:
    """JSONL of {"dialogue_id", "turn_id", "state": {slot: value}} keyed by turn."""
    preds: PredictionSet = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            key = (raw["dialogue_id"], int(raw["turn_id"]))
            preds[key] = {normalize(s): normalize(v) for s, v in raw["state"].items()}
    return preds


def _norm_state(state: dict[str, str]) -> dict[str, str]:
    return {normalize(s): normalize(v) for s, v in state.items()}


def joint_goal_accuracy(preds: PredictionSet, corpus: Corpus) -> float:
    """Fraction of turns whose predicted state equals gold exactly.

    Missing prediction turns count as wrong; comparison is insensitive to
    slot order and value case.
    """
    total = 0
    correct = 0
    for dialogue in corpus:
        for turn in dialogue.turns:
            total += 1
            pred = preds.get((dialogue.id, turn.turn_id))
            if pred is not None and _norm_state(pred) == _norm_state(turn.belief_state):
                correct += 1
    return correct / total if total else 0.0


def categorize_slot(
    turn: Turn,
    slot: str,
    value: str,
    svdict: SlotValueDict,
    coref: CorefList | None = None,
    system_acts=None,
) -> str:
    """Class of one (slot, value) update: refer > true/false > dontcare > inform > span.

    Updates that fit no class are reported as span with a warning.
    """
    if system_acts is None:
        system_acts = turn.system_acts
    value = normalize(value)
    for item in turn.user_act:
        if item.slot == slot and item.refer is not None:
            if coref is None or coref.has_pair(slot, item.refer):
                return CLASS_REFER
    if svdict.is_boolean(slot):
        if value == "yes":
            return CLASS_TRUE
        if value == "no":
            return CLASS_FALSE
    if value == DONTCARE:
        return CLASS_DONTCARE
    for act in system_acts:
        if act.kind in ("recommend", "inform") and act.slot == slot and act.value:
            if normalize(act.value) == value:
                return CLASS_INFORM
    if contains_value(turn.user_utterance, value):
        return CLASS_SPAN
    log.warning("unclassifiable update %s=%s at %s; treating as span", slot, value, turn.turn_id)
    return CLASS_SPAN


def _updates(state: dict[str, str], prev: dict[str, str]) -> set[tuple[str, str]]:
    return {(s, v) for s, v in state.items() if prev.get(s) != v}


def slot_class_f1(
    preds: PredictionSet,
    corpus: Corpus,
    svdict: SlotValueDict,
    coref: CorefList | None = None,
) -> dict[str, float]:
    """Per-class F1 over state updates.

    True positives and false negatives take the gold update's class; false
    positives take the class the categorizer assigns to the predicted value.
    A missing prediction turn is scored as an empty state.
    """
    tp = {c: 0 for c in SLOT_CLASSES}
    fp = {c: 0 for c in SLOT_CLASSES}
    fn = {c: 0 for c in SLOT_CLASSES}
    for dialogue in corpus:
        prev_gold: dict[str, str] = {}
        prev_pred: dict[str, str] = {}
        for turn in dialogue.turns:
            gold = _norm_state(turn.belief_state)
            pred = _norm_state(preds.get((dialogue.id, turn.turn_id), {}) or {})
            gold_updates = _updates(gold, prev_gold)
            pred_updates = _updates(pred, prev_pred)
            for slot, value in gold_updates:
                cls = categorize_slot(turn, slot, value, svdict, coref)
                if (slot, value) in pred_updates:
                    tp[cls] += 1
                else:
                    fn[cls] += 1
            for slot, value in pred_updates - gold_updates:
                cls = categorize_slot(turn, slot, value, svdict, coref)
                fp[cls] += 1
            prev_gold, prev_pred = gold, pred
    out = {}
    for cls in SLOT_CLASSES:
        p_den = tp[cls] + fp[cls]
        r_den = tp[cls] + fn[cls]
        if tp[cls] == 0 or p_den == 0 or r_den == 0:
            out[cls] = 0.0
            continue
        precision = tp[cls] / p_den
        recall = tp[cls] / r_den
        out[cls] = 2 * precision * recall / (precision + recall)
    return out


@dataclass
class DistributionReport:
    span: float
    confirm_true: float
    confirm_false: float
    dontcare: float
    coreference: float
    multi_domain: float
    turns: int
    unit: str = "turn"

    def to_dict(self) -> dict:
        return {
            "span": self.span,
            "confirm_true": self.confirm_true,
            "confirm_false": self.confirm_false,
            "dontcare": self.dontcare,
            "coreference": self.coreference,
            "multi_domain": self.multi_domain,
            "turns": self.turns,
            "unit": self.unit,
        }

    def format_table(self) -> str:
        rows = [
            ("Span", self.span),
            ("Confirm (True)", self.confirm_true),
            ("Confirm (False)", self.confirm_false),
            ("Dontcare", self.dontcare),
            ("Coreference", self.coreference),
            ("Multi-domain", self.multi_domain),
        ]
        width = max(len(name) for name, _ in rows)
        lines = [f"{name:<{width}}  {pct:6.2f}" for name, pct in rows]
        lines.append(f"{'#Turns':<{width}}  {self.turns:6d}")
        return "\n".join(lines)


def _item_bucket(item, svdict: SlotValueDict) -> str:
    if item.refer is not None:
        return "coreference"
    if svdict.is_boolean(item.slot):
        if item.value == "yes":
            return "confirm_true"
        if item.value == "no":
            return "confirm_false"
    if item.value == DONTCARE:
        return "dontcare"
    return "span"


def _turn_views(source) -> list[tuple[str, list]]:
    """(dialogue_id, act items) per turn, in corpus order, for Corpus or records."""
    views = []
    if isinstance(source, Corpus):
        for dialogue in source:
            for turn in dialogue.turns:
                views.append((dialogue.id, list(turn.user_act)))
    else:
        for record in source:
            if isinstance(record, AugRecord):
                views.append((record.dialogue_id, list(record.augmented_act)))
            else:  # raw dict from a records file
                from .genbridge import act_from_wire

                views.append((record["dialogue_id"], list(act_from_wire(record["augmented_act"]))))
    return views


def slot_distribution(
    source,
    svdict: SlotValueDict,
    coref: CorefList | None = None,
    unit: str = "turn",
) -> DistributionReport:
    """Slot-distribution percentages over a corpus or augmentation records.

    With unit="turn" each bucket counts turns containing at least one item of
    that bucket; with unit="slot" the denominators are act items. A turn is
    multi-domain when its items span two domains or leave the dialogue's
    first active domain.
    """
    if unit not in ("turn", "slot"):
        raise ValueError(f"unknown unit {unit!r}")
    views = _turn_views(source)
    first_domain: dict[str, str] = {}
    counts = {k: 0 for k in ("span", "confirm_true", "confirm_false", "dontcare",
                             "coreference", "multi_domain")}
    turns = len(views)
    total_items = 0
    for dialogue_id, items in views:
        domains = {slot_domain(it.slot) for it in items}
        first = first_domain.get(dialogue_id)
        if first is None and items:
            first = slot_domain(items[0].slot)
            first_domain[dialogue_id] = first
        off_domain = {d for d in domains if first is not None and d != first}
        total_items += len(items)
        if unit == "turn":
            buckets = {_item_bucket(it, svdict) for it in items}
            for bucket in buckets:
                counts[bucket] += 1
            if len(domains) >= 2 or off_domain:
                counts["multi_domain"] += 1
        else:
            for it in items:
                counts[_item_bucket(it, svdict)] += 1
                if len(domains) >= 2 or slot_domain(it.slot) in off_domain:
                    counts["multi_domain"] += 1
    denom = turns if unit == "turn" else total_items
    pct = {k: (100.0 * v / denom if denom else 0.0) for k, v in counts.items()}
    return DistributionReport(
        span=pct["span"],
        confirm_true=pct["confirm_true"],
        confirm_false=pct["confirm_false"],
        dontcare=pct["dontcare"],
        coreference=pct["coreference"],
        multi_domain=pct["multi_domain"],
        turns=turns,
        unit=unit,
    )
