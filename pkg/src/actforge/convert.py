"""Best-effort converter from raw MultiWOZ 2.x JSON to the canonical corpus schema.

Field mapping (documented, not guaranteed):
  - log entries alternate user/system; user turn t pairs log[2t] with the
    preceding system entry log[2t-1] (empty at t=0) and reads its cumulative
    belief state from log[2t+1].metadata (semi + book sections).
  - dialog_act "Domain-Recommend" -> recommend, "Domain-Request" -> request,
    booking confirmations -> offer_booked, anything else carrying a slot and
    value -> inform; act entries without both are dropped.
  - raw slot tokens are renamed: pricerange -> price, arriveBy -> arrive,
    leaveAt -> leave, departure -> depart, destination -> dest.
  - user act items become reply when the previous system turn requested the
    slot, confirm when it recommended the same value, inform otherwise;
    MultiWOZ 2.3 "coreference" annotations become refer fields best-effort.
  - items contradicting the belief state are dropped (the state is treated
    as authoritative), as are domains outside the five canonical ones.
"""

from __future__ import annotations

import json

from .corpus import (
    ActItem,
    Corpus,
    Dialogue,
    DOMAINS,
    SystemAct,
    Turn,
    UserAct,
)
from .text import normalize

_SLOT_RENAMES = {
    "pricerange": "price",
    "price range": "price",
    "arriveby": "arrive",
    "arrive by": "arrive",
    "leaveat": "leave",
    "leave at": "leave",
    "departure": "depart",
    "destination": "dest",
    "car type": "type",
}
_DROP_SLOTS = {"choice", "ref", "post", "phone", "addr", "address", "id", "ticket",
               "fee", "open", "none", "booked"}
_DROP_VALUES = {"", "not mentioned", "none", "?"}


def _slot_name(domain: str, raw_slot: str) -> str | None:
    slot = normalize(raw_slot)
    slot = _SLOT_RENAMES.get(slot, slot).replace(" ", "")
    if slot in _DROP_SLOTS or not slot:
        return None
    return f"{domain}-{slot}"


def _acts_from_dialog_act(raw: dict) -> list[SystemAct]:
    acts = []
    for key, pairs in (raw or {}).items():
        if "-" not in key:
            continue
        domain, act_type = key.lower().split("-", 1)
        if domain not in DOMAINS:
            continue
        for pair in pairs:
            raw_slot, raw_value = (pair + [None, None])[:2]
            slot = _slot_name(domain, raw_slot or "")
            value = normalize(raw_value) if raw_value else None
            if value in _DROP_VALUES:
                value = None
            if act_type == "request" and slot:
                acts.append(SystemAct("request", slot, None))
            elif act_type == "recommend" and slot and value:
                acts.append(SystemAct("recommend", slot, value))
            elif act_type in ("book", "offerbooked"):
                acts.append(SystemAct("offer_booked", slot, value))
            elif slot and value:
                acts.append(SystemAct("inform", slot, value))
    return acts


def _state_from_metadata(metadata: dict) -> dict[str, str]:
    state = {}
    for domain, sections in (metadata or {}).items():
        if domain not in DOMAINS:
            continue
        semi = dict(sections.get("semi", {}))
        book = {k: v for k, v in sections.get("book", {}).items() if k != "booked"}
        for raw_slot, value in {**semi, **book}.items():
            if isinstance(value, list):
                value = value[0] if value else ""
            value = normalize(str(value))
            if value in _DROP_VALUES:
                continue
            slot = _slot_name(domain, raw_slot)
            if slot:
                state[slot] = value
    return state


def _refer_map(raw_coref) -> dict[str, str]:
    """Coreference annotations -> {slot: referred slot}, tolerant of layout."""
    out = {}
    if not isinstance(raw_coref, dict):
        return out
    for key, entries in raw_coref.items():
        if "-" not in str(key):
            continue
        domain = str(key).lower().split("-", 1)[0]
        if domain not in DOMAINS or not isinstance(entries, list):
            continue
        for entry in entries:
            if not isinstance(entry, list) or len(entry) < 3:
                continue
            slot = _slot_name(domain, str(entry[0]))
            referred = str(entry[2]).lower().strip()
            if slot and "-" in referred:
                rdomain, rslot = referred.split("-", 1)
                rname = _slot_name(rdomain, rslot) if rdomain in DOMAINS else None
                if rname:
                    out[slot] = rname
    return out


def convert_dialogue(dialogue_id: str, raw: dict) -> Dialogue | None:
    log_entries = raw.get("log", [])
    turns = []
    for t in range(0, len(log_entries) // 2 + len(log_entries) % 2):
        user_entry = log_entries[2 * t]
        system_entry = log_entries[2 * t - 1] if t > 0 else {}
        state_entry = log_entries[2 * t + 1] if 2 * t + 1 < len(log_entries) else {}
        system_acts = _acts_from_dialog_act(system_entry.get("dialog_act", {}))
        belief = _state_from_metadata(state_entry.get("metadata", {}))
        requested = {a.slot for a in system_acts if a.kind == "request"}
        recommended = {(a.slot, a.value) for a in system_acts if a.kind == "recommend"}
        refer_map = _refer_map(user_entry.get("coreference"))
        items: list[ActItem] = []
        seen: set[str] = set()
        for key, pairs in (user_entry.get("dialog_act") or {}).items():
            if "-" not in key:
                continue
            domain, act_type = key.lower().split("-", 1)
            if domain not in DOMAINS or act_type == "request":
                continue
            for pair in pairs:
                raw_slot, raw_value = (list(pair) + [None, None])[:2]
                slot = _slot_name(domain, raw_slot or "")
                value = normalize(str(raw_value)) if raw_value is not None else ""
                if not slot or value in _DROP_VALUES or slot in seen:
                    continue
                if belief.get(slot) != value:
                    continue  # the state is authoritative; drop contradicting items
                if (slot, value) in recommended:
                    kind = "confirm"
                elif slot in requested:
                    kind = "reply"
                else:
                    kind = "inform"
                refer = refer_map.get(slot)
                items.append(ActItem(kind, slot, value, refer))
                seen.add(slot)
        turns.append(
            Turn(
                turn_id=t,
                system_utterance=system_entry.get("text", "") if t > 0 else "",
                system_acts=system_acts,
                user_utterance=user_entry.get("text", ""),
                user_act=UserAct(tuple(items)),
                belief_state=belief,
            )
        )
    if not turns:
        return None
    return Dialogue(id=dialogue_id, turns=turns)


def convert_multiwoz(path) -> Corpus:
    """Convert a raw MultiWOZ 2.x data.json file to a canonical Corpus."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    dialogues = []
    for dialogue_id in sorted(raw):
        converted = convert_dialogue(dialogue_id, raw[dialogue_id])
        if converted is not None:
            dialogues.append(converted)
    return Corpus(dialogues)
