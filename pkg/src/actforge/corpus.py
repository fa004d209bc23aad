"""Canonical data model for task-oriented dialogue corpora.

Slot names use the canonical lowercase "domain-slot" form across the five
MultiWOZ domains. Loaders validate their inputs eagerly; loaded structures
are treated as immutable and safe to share between workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .text import normalize

DOMAINS = ("attraction", "hotel", "restaurant", "taxi", "train")

SYSTEM_ACT_KINDS = ("recommend", "request", "inform", "offer_booked")
ACT_TYPES = ("confirm", "reply", "inform")

DONTCARE = "dontcare"


class CorpusError(ValueError):
    """Malformed file or violated invariant, with a locus in the message."""


@dataclass(frozen=True)
class Violation:
    dialogue_id: str
    turn_id: int
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.dialogue_id}/turn {self.turn_id}] {self.rule}: {self.detail}"


def canonical_slot(name: str) -> str:
    """Normalize a slot name to lowercase "domain-slot"; raises on unknown domain."""
    slot = normalize(name).replace(" ", "")
    if "-" not in slot:
        raise CorpusError(f"malformed slot name {name!r}: expected 'domain-slot'")
    domain, rest = slot.split("-", 1)
    if domain not in DOMAINS:
        raise CorpusError(f"malformed slot name {name!r}: unknown domain {domain!r}")
    if not rest:
        raise CorpusError(f"malformed slot name {name!r}: empty slot part")
    return f"{domain}-{rest}"


def slot_domain(slot: str) -> str:
    return slot.split("-", 1)[0]


@dataclass(frozen=True)
class SystemAct:
    kind: str
    slot: str | None = None
    value: str | None = None


@dataclass(frozen=True)
class ActItem:
    act_type: str
    slot: str
    value: str
    refer: str | None = None


@dataclass(frozen=True)
class UserAct:
    items: tuple[ActItem, ...] = ()

    def slots(self) -> list[str]:
        return [it.slot for it in self.items]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


@dataclass
class Turn:
    turn_id: int
    system_utterance: str
    system_acts: list[SystemAct]
    user_utterance: str
    user_act: UserAct
    belief_state: dict[str, str]


@dataclass
class Dialogue:
    id: str
    turns: list[Turn]


@dataclass
class Corpus:
    dialogues: list[Dialogue]

    def __iter__(self):
        return iter(self.dialogues)

    def num_turns(self) -> int:
        return sum(len(d.turns) for d in self.dialogues)


@dataclass
class SlotValueDict:
    """Sampleable values per slot, with the boolean slots flagged."""

    entries: dict[str, list[str]]
    boolean_slots: frozenset[str]

    def __contains__(self, slot: str) -> bool:
        return slot in self.entries

    def values_for(self, slot: str) -> list[str]:
        return self.entries[slot]

    def is_boolean(self, slot: str) -> bool:
        return slot in self.boolean_slots

    def slots_in_domain(self, domain: str) -> list[str]:
        return sorted(s for s in self.entries if slot_domain(s) == domain)

    def domains(self) -> list[str]:
        return sorted({slot_domain(s) for s in self.entries})


@dataclass(frozen=True)
class CorefPair:
    referred: str
    phrases: tuple[str, ...]


@dataclass
class CorefList:
    """Referable slot pairs and the phrases that may express the reference."""

    entries: dict[str, list[CorefPair]]

    def pairs_for(self, slot: str) -> list[CorefPair]:
        return self.entries.get(slot, [])

    def phrases_for(self, slot: str, referred: str) -> tuple[str, ...]:
        for pair in self.pairs_for(slot):
            if pair.referred == referred:
                return pair.phrases
        return ()

    def has_pair(self, slot: str, referred: str) -> bool:
        return bool(self.phrases_for(slot, referred))


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise CorpusError(f"{where}: missing field {key!r}")
    return obj[key]


def _parse_system_act(raw: dict, where: str) -> SystemAct:
    kind = _require(raw, "kind", where)
    if kind not in SYSTEM_ACT_KINDS:
        kind = "inform"  # unknown raw acts are treated as plain informs
    slot = raw.get("slot")
    value = raw.get("value")
    slot = canonical_slot(slot) if slot else None
    value = normalize(value) if value is not None else None
    if kind == "request" and (slot is None or value not in (None, "")):
        raise CorpusError(f"{where}: request act must carry a slot and no value")
    if kind in ("recommend", "inform") and (slot is None or not value):
        raise CorpusError(f"{where}: {kind} act must carry slot and value")
    return SystemAct(kind, slot, value or None)


def _parse_act_item(raw: dict, where: str) -> ActItem:
    act_type = _require(raw, "act_type", where)
    if act_type not in ACT_TYPES:
        raise CorpusError(f"{where}: unknown act_type {act_type!r}")
    slot = canonical_slot(_require(raw, "slot", where))
    value = normalize(_require(raw, "value", where))
    if not value:
        raise CorpusError(f"{where}: empty value for slot {slot}")
    refer = raw.get("refer")
    refer = canonical_slot(refer) if refer else None
    return ActItem(act_type, slot, value, refer)


def _parse_turn(raw: dict, where: str) -> Turn:
    turn_id = _require(raw, "turn_id", where)
    if not isinstance(turn_id, int) or turn_id < 0:
        raise CorpusError(f"{where}: turn_id must be a non-negative integer")
    acts = [
        _parse_system_act(a, f"{where}.system_acts[{i}]")
        for i, a in enumerate(raw.get("system_acts", []))
    ]
    items = tuple(
        _parse_act_item(a, f"{where}.user_act[{i}]")
        for i, a in enumerate(raw.get("user_act", []))
    )
    belief = {
        canonical_slot(s): normalize(v)
        for s, v in _require(raw, "belief_state", where).items()
    }
    return Turn(
        turn_id=turn_id,
        system_utterance=raw.get("system_utterance", ""),
        system_acts=acts,
        user_utterance=_require(raw, "user_utterance", where),
        user_act=UserAct(items),
        belief_state=belief,
    )


def check_turn(dialogue_id: str, turn: Turn) -> list[Violation]:
    """Turn-local invariant checks; shared by the loader and validate_corpus."""
    out = []

    def bad(rule: str, detail: str):
        out.append(Violation(dialogue_id, turn.turn_id, rule, detail))

    if turn.turn_id == 0 and turn.system_utterance.strip():
        bad("first_turn_system_empty", "turn 0 must have an empty system utterance")
    seen: set[str] = set()
    for item in turn.user_act:
        if item.slot in seen:
            bad("duplicate_act_slot", f"slot {item.slot} appears twice in the user act")
        seen.add(item.slot)
    confirm_reply = {it.slot for it in turn.user_act if it.act_type in ("confirm", "reply")}
    inform = {it.slot for it in turn.user_act if it.act_type == "inform"}
    for slot in inform & confirm_reply:
        bad("inform_overlaps_confirm_reply", f"slot {slot} informed and confirmed/replied")
    for item in turn.user_act:
        got = turn.belief_state.get(item.slot)
        if got != item.value:
            bad(
                "belief_missing_act_value",
                f"belief_state[{item.slot}]={got!r} but user act introduces {item.value!r}",
            )
    return out


def validate_corpus(
    corpus: Corpus,
    svdict: SlotValueDict | None = None,
    coref: CorefList | None = None,
) -> list[Violation]:
    """All violations in the corpus; empty iff every invariant holds.

    With a dictionary, boolean slots are checked for yes/no/dontcare values;
    with a coreference list, every refer pair must be listed.
    """
    out: list[Violation] = []
    seen_ids: set[str] = set()
    for dialogue in corpus:
        if dialogue.id in seen_ids:
            out.append(Violation(dialogue.id, -1, "duplicate_dialogue_id", dialogue.id))
        seen_ids.add(dialogue.id)
        if not dialogue.turns:
            out.append(Violation(dialogue.id, -1, "empty_dialogue", "dialogue has no turns"))
        prev_id = -1
        for turn in dialogue.turns:
            if turn.turn_id <= prev_id:
                out.append(
                    Violation(dialogue.id, turn.turn_id, "turn_ids_not_increasing",
                              f"turn_id {turn.turn_id} after {prev_id}")
                )
            prev_id = turn.turn_id
            out.extend(check_turn(dialogue.id, turn))
            for item in turn.user_act:
                if coref is not None and item.refer is not None:
                    if not coref.has_pair(item.slot, item.refer):
                        out.append(
                            Violation(dialogue.id, turn.turn_id, "unknown_refer_pair",
                                      f"({item.slot} <- {item.refer}) not in coreference list")
                        )
                if svdict is not None and svdict.is_boolean(item.slot):
                    if item.value not in ("yes", "no", DONTCARE):
                        out.append(
                            Violation(dialogue.id, turn.turn_id, "boolean_value_domain",
                                      f"{item.slot}={item.value!r} not in yes/no/dontcare")
                        )
    return out


def load_corpus(path) -> Corpus:
    """Load a corpus JSON file, canonicalizing slot names and checking invariants."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    dialogues = []
    for i, draw in enumerate(_require(raw, "dialogues", str(path))):
        did = _require(draw, "id", f"{path}.dialogues[{i}]")
        turns = [
            _parse_turn(t, f"{path}.dialogues[{i}].turns[{j}]")
            for j, t in enumerate(_require(draw, "turns", f"{path}.dialogues[{i}]"))
        ]
        dialogues.append(Dialogue(id=did, turns=turns))
    corpus = Corpus(dialogues)
    violations = validate_corpus(corpus)
    if violations:
        listing = "; ".join(str(v) for v in violations[:10])
        raise CorpusError(f"{path}: {len(violations)} invariant violation(s): {listing}")
    return corpus


def corpus_to_dict(corpus: Corpus) -> dict:
    return {
        "dialogues": [
            {
                "id": d.id,
                "turns": [
                    {
                        "turn_id": t.turn_id,
                        "system_utterance": t.system_utterance,
                        "system_acts": [
                            {"kind": a.kind, "slot": a.slot, "value": a.value}
                            for a in t.system_acts
                        ],
                        "user_utterance": t.user_utterance,
                        "user_act": [
                            {"act_type": it.act_type, "slot": it.slot,
                             "value": it.value, "refer": it.refer}
                            for it in t.user_act
                        ],
                        "belief_state": dict(sorted(t.belief_state.items())),
                    }
                    for t in d.turns
                ],
            }
            for d in corpus
        ]
    }


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(corpus_to_dict(corpus), fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_dictionary(path) -> SlotValueDict:
    """Load a slot-value dictionary JSON file."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    entries: dict[str, list[str]] = {}
    for slot, values in _require(raw, "slots", str(path)).items():
        cslot = canonical_slot(slot)
        if not values:
            raise CorpusError(f"{path}: slot {cslot} has an empty value list")
        deduped: list[str] = []
        for v in values:
            nv = normalize(v)
            if nv and nv not in deduped:
                deduped.append(nv)
        if not deduped:
            raise CorpusError(f"{path}: slot {cslot} has no usable values")
        entries[cslot] = deduped
    boolean = frozenset(canonical_slot(s) for s in raw.get("boolean_slots", []))
    for slot in boolean:
        if slot not in entries:
            raise CorpusError(f"{path}: boolean slot {slot} missing from slots")
        extra = set(entries[slot]) - {"yes", "no", DONTCARE}
        if extra:
            raise CorpusError(f"{path}: boolean slot {slot} has non-boolean values {sorted(extra)}")
    return SlotValueDict(entries=entries, boolean_slots=boolean)


def load_coref_list(path) -> CorefList:
    """Load a coreference list JSON file."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    entries: dict[str, list[CorefPair]] = {}
    for slot, pairs in raw.items():
        cslot = canonical_slot(slot)
        seen: set[str] = set()
        parsed = []
        for pair in pairs:
            referred = canonical_slot(_require(pair, "referred", f"{path}[{cslot}]"))
            if referred == cslot:
                raise CorpusError(f"{path}: self-referring pair for {cslot}")
            if referred in seen:
                raise CorpusError(f"{path}: duplicate pair ({cslot} <- {referred})")
            seen.add(referred)
            phrases = tuple(normalize(p) for p in _require(pair, "phrases", f"{path}[{cslot}]"))
            if not phrases or any(not p for p in phrases):
                raise CorpusError(f"{path}: empty phrase list for ({cslot} <- {referred})")
            parsed.append(CorefPair(referred=referred, phrases=phrases))
        entries[cslot] = parsed
    return CorefList(entries=entries)


def _bundled(name: str):
    return resources.files("actforge.data").joinpath(name)


def bundled_dictionary() -> SlotValueDict:
    """The slot-value dictionary shipped with the package."""
    with resources.as_file(_bundled("slot_value_dictionary.json")) as p:
        return load_dictionary(p)


def bundled_coref_list() -> CorefList:
    """The coreference list shipped with the package."""
    with resources.as_file(_bundled("coreference_list.json")) as p:
        return load_coref_list(p)


def bundled_mini_corpus() -> Corpus:
    """Five-dialogue corpus fixture shipped with the package."""
    with resources.as_file(_bundled("mini_corpus.json")) as p:
        return load_corpus(p)
