"""State match filtering: slot appearance and value consistency checks.

The rule-based reference implementation is exact over the template realizer's
output; a remote classifier speaking the filter wire protocol can replace the
appearance and gate decisions while the verbatim value and coreference phrase
checks stay rule-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import DONTCARE, CorefList, SlotValueDict, UserAct
from .genbridge import JsonLinesClient, PhraseLexicon, ProtocolError, DEFAULT_TIMEOUT
from .text import (
    contains_value,
    has_dontcare_phrase,
    keyword_negated,
    keyword_position,
    sentences,
    tokenize,
)

GATE_NONE = "none"
GATE_DONTCARE = "dontcare"
GATE_YES = "yes"
GATE_NO = "no"
GATE_VALUE = "value"

C_BOOL = (GATE_NONE, GATE_DONTCARE, GATE_YES, GATE_NO)
C_SPAN = (GATE_NONE, GATE_DONTCARE, GATE_VALUE)

MISSING_SLOT = "missing_slot"
VALUE_MISMATCH = "value_mismatch"
GATE_MISMATCH = "gate_mismatch"
MISSING_COREF_PHRASE = "missing_coref_phrase"

_AFFIRMATIVES = ("yes", "yeah", "yep", "sure")
_NEGATIVE_ANSWERS = ("no", "nope")


@dataclass
class FilterVerdict:
    passed: bool
    failures: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        assert self.passed == (not self.failures)


@dataclass
class FilterDeps:
    """Everything filter_candidates needs; classifier=None selects the rules."""

    svdict: SlotValueDict
    coref: CorefList
    lexicon: PhraseLexicon
    classifier: "RemoteClassifier | None" = None


def _coref_phrase_present(candidate: str, phrases) -> bool:
    return any(contains_value(candidate, p) for p in phrases)


def gate_rule(
    system_utterance: str,
    candidate: str,
    slot: str,
    svdict: SlotValueDict,
    coref: CorefList | None = None,
) -> str:
    """Rule-based slot gate.

    Boolean slots: dontcare when a dontcare phrase shares a sentence with a
    slot keyword; no when a negator sits within the window before the
    keyword; yes when the keyword appears unnegated; bare yes/no answers
    count when the system utterance mentions the keyword. Span slots:
    dontcare by the same co-occurrence rule, value when any dictionary value
    or coreference phrase for the slot appears, none otherwise.
    """
    sents = sentences(candidate)
    keyword_sents = [s for s in sents if keyword_position(s, slot) is not None]
    dontcare_here = any(has_dontcare_phrase(s) for s in keyword_sents)

    if svdict.is_boolean(slot):
        if dontcare_here:
            return GATE_DONTCARE
        if any(keyword_negated(s, slot) for s in keyword_sents):
            return GATE_NO
        if keyword_sents:
            return GATE_YES
        # bare answers to a system question about this slot
        if keyword_position(system_utterance, slot) is not None:
            if has_dontcare_phrase(candidate):
                return GATE_DONTCARE
            toks = tokenize(candidate)
            if toks and toks[0] in _NEGATIVE_ANSWERS:
                return GATE_NO
            if toks and toks[0] in _AFFIRMATIVES:
                return GATE_YES
        return GATE_NONE

    if dontcare_here:
        return GATE_DONTCARE
    for value in svdict.values_for(slot) if slot in svdict else []:
        if value != DONTCARE and contains_value(candidate, value):
            return GATE_VALUE
    if coref is not None:
        for pair in coref.pairs_for(slot):
            if _coref_phrase_present(candidate, pair.phrases):
                return GATE_VALUE
    return GATE_NONE


def expected_gate(item, svdict: SlotValueDict) -> str:
    if svdict.is_boolean(item.slot):
        return {"yes": GATE_YES, "no": GATE_NO, DONTCARE: GATE_DONTCARE}.get(item.value, GATE_NONE)
    return GATE_DONTCARE if item.value == DONTCARE else GATE_VALUE


def check_appearance(candidate: str, act: UserAct, lexicon: PhraseLexicon) -> dict[str, bool]:
    """Per-slot presence of the act in the candidate.

    Non-refer values must occur verbatim; refer items need one of their
    coreference phrases; boolean and dontcare items count as present when a
    slot keyword is mentioned.
    """
    out: dict[str, bool] = {}
    for item in act:
        if item.refer is not None:
            phrases = lexicon.coref_phrases.get((item.slot, item.refer), ())
            out[item.slot] = _coref_phrase_present(candidate, phrases)
        elif item.value in ("yes", "no", DONTCARE):
            out[item.slot] = any(
                keyword_position(s, item.slot) is not None for s in sentences(candidate)
            )
        else:
            out[item.slot] = contains_value(candidate, item.value)
    return out


def check_consistency(
    system_utterance: str,
    candidate: str,
    act: UserAct,
    svdict: SlotValueDict,
    coref: CorefList,
) -> FilterVerdict:
    """Value-consistency verdict for one candidate against its act.

    Refer items need a listed phrase; boolean and dontcare items must gate to
    the act's class; remaining span values must occur verbatim.
    """
    failures: list[tuple[str, str]] = []
    for item in act:
        if item.refer is not None:
            phrases = coref.phrases_for(item.slot, item.refer)
            if not _coref_phrase_present(candidate, phrases):
                failures.append((item.slot, MISSING_COREF_PHRASE))
        elif svdict.is_boolean(item.slot) or item.value == DONTCARE:
            gate = gate_rule(system_utterance, candidate, item.slot, svdict, coref)
            if gate != expected_gate(item, svdict):
                failures.append((item.slot, GATE_MISMATCH))
        else:
            if not contains_value(candidate, item.value):
                failures.append((item.slot, VALUE_MISMATCH))
    return FilterVerdict(passed=not failures, failures=failures)


def _remote_verdict(deps: FilterDeps, system_utterance: str, candidate: str, act: UserAct) -> FilterVerdict:
    slots = [(it.slot, "bool" if deps.svdict.is_boolean(it.slot) else "span") for it in act]
    results = deps.classifier.classify(system_utterance, candidate, slots)
    failures: list[tuple[str, str]] = []
    for item in act:
        appears, gate = results[item.slot]
        if not appears:
            failures.append((item.slot, MISSING_SLOT))
            continue
        if item.refer is not None:
            if not _coref_phrase_present(candidate, deps.coref.phrases_for(item.slot, item.refer)):
                failures.append((item.slot, MISSING_COREF_PHRASE))
        elif deps.svdict.is_boolean(item.slot) or item.value == DONTCARE:
            if gate != expected_gate(item, deps.svdict):
                failures.append((item.slot, GATE_MISMATCH))
        else:
            if not contains_value(candidate, item.value):
                failures.append((item.slot, VALUE_MISMATCH))
    return FilterVerdict(passed=not failures, failures=failures)


def verdict_for(
    deps: FilterDeps, system_utterance: str, candidate: str, act: UserAct
) -> FilterVerdict:
    """Appearance plus consistency under either the rules or a remote classifier."""
    if deps.classifier is not None:
        return _remote_verdict(deps, system_utterance, candidate, act)
    failures: list[tuple[str, str]] = []
    appearance = check_appearance(candidate, act, deps.lexicon)
    for slot, present in appearance.items():
        if not present:
            failures.append((slot, MISSING_SLOT))
    consistency = check_consistency(system_utterance, candidate, act, deps.svdict, deps.coref)
    seen = {slot for slot, _ in failures}
    failures.extend((s, r) for s, r in consistency.failures if s not in seen)
    return FilterVerdict(passed=not failures, failures=failures)


def filter_candidates(
    candidates: list[str],
    ctx,
    act: UserAct,
    deps: FilterDeps,
) -> tuple[str | None, int]:
    """First candidate (best-first) passing both checks, with its 1-based index.

    Returns (None, number of candidates) when none passes.
    """
    for i, candidate in enumerate(candidates, start=1):
        if verdict_for(deps, ctx.system_utterance, candidate, act).passed:
            return candidate, i
    return None, len(candidates)


class RemoteClassifier:
    """Client for a classifier endpoint speaking the filter wire protocol."""

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        self._client = JsonLinesClient(endpoint, timeout=timeout)
        self.endpoint = endpoint
        self._next_id = 0

    def classify(
        self, system_utterance: str, candidate: str, slots: list[tuple[str, str]]
    ) -> dict[str, tuple[bool, str]]:
        self._next_id += 1
        rid = self._next_id
        request = json.dumps(
            {
                "id": rid,
                "system_utterance": system_utterance,
                "user_utterance": candidate,
                "slots": [{"slot": s, "kind": k} for s, k in slots],
            },
            ensure_ascii=False,
        )
        try:
            raw = json.loads(self._client.roundtrip(request))
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed classifier response from {self.endpoint}: {exc}") from exc
        if raw.get("id") != rid:
            raise ProtocolError(f"classifier id mismatch from {self.endpoint}")
        kinds = dict(slots)
        out: dict[str, tuple[bool, str]] = {}
        for res in raw.get("results", []):
            slot = res["slot"]
            gate = res["gate"]
            allowed = C_BOOL if kinds.get(slot) == "bool" else C_SPAN
            if gate not in allowed:
                raise ProtocolError(
                    f"classifier returned gate {gate!r} outside the class set for {slot}"
                )
            out[slot] = (bool(res["appears"]), gate)
        missing = [s for s, _ in slots if s not in out]
        if missing:
            raise ProtocolError(f"classifier response missing slots {missing}")
        return out

    def close(self) -> None:
        self._client.close()


def classify_remote(
    endpoint: str,
    system_utterance: str,
    candidate: str,
    slots: list[tuple[str, str]],
    timeout: float = DEFAULT_TIMEOUT,
) -> dict[str, tuple[bool, str]]:
    """One-shot remote classification; see RemoteClassifier for the protocol."""
    client = RemoteClassifier(endpoint, timeout=timeout)
    try:
        return client.classify(system_utterance, candidate, slots)
    finally:
        client.close()
