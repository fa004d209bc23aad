"""Per-turn augmentation pipeline and the value-substitution baseline.

Each turn is augmented against the original corpus context (prior state,
history); augmented turns never chain. Dialogues are independent work units,
so a worker pool changes throughput but never the output.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .actgen import AugConfig, TurnContext, generate_user_act, turn_rng
from .corpus import (
    DONTCARE,
    CorefList,
    Corpus,
    Dialogue,
    SlotValueDict,
    Turn,
    UserAct,
    slot_domain,
)
from .filtering import FilterDeps, filter_candidates
from .genbridge import ExternalGenerator, PhraseLexicon, realize_template
from .text import contains_value, replace_value

log = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_FAILED = "failed"
STATUS_SKIPPED = "skipped"


@dataclass
class AugRecord:
    dialogue_id: str
    turn_id: int
    system_utterance: str
    history: list[tuple[str, str]]
    augmented_act: UserAct
    augmented_utterance: str
    new_belief_state: dict[str, str]
    generator: str
    attempts: int

    def to_dict(self) -> dict:
        return {
            "dialogue_id": self.dialogue_id,
            "turn_id": self.turn_id,
            "system_utterance": self.system_utterance,
            "history": [list(p) for p in self.history],
            "augmented_act": [
                {"act_type": it.act_type, "slot": it.slot, "value": it.value, "refer": it.refer}
                for it in self.augmented_act
            ],
            "augmented_utterance": self.augmented_utterance,
            "new_belief_state": dict(sorted(self.new_belief_state.items())),
            "generator": self.generator,
            "attempts": self.attempts,
        }


@dataclass
class AugStats:
    turns_attempted: int = 0
    turns_succeeded: int = 0
    turns_skipped: int = 0
    act_type_counts: dict[str, int] = field(
        default_factory=lambda: {"confirm": 0, "reply": 0, "inform": 0, "refer": 0}
    )
    problems: list[str] = field(default_factory=list)

    @property
    def success_rate(self) -> float:
        if self.turns_attempted == 0:
            return 0.0
        return self.turns_succeeded / self.turns_attempted

    def to_dict(self) -> dict:
        return {
            "turns_attempted": self.turns_attempted,
            "turns_succeeded": self.turns_succeeded,
            "turns_skipped": self.turns_skipped,
            "success_rate": self.success_rate,
            "act_type_counts": dict(self.act_type_counts),
            "problems": list(self.problems),
        }


@dataclass
class AugDeps:
    """Shared dependencies for the augmentation loop."""

    svdict: SlotValueDict
    coref: CorefList
    lexicon: PhraseLexicon
    generator: ExternalGenerator | None = None  # None selects the template realizer
    filter_deps: FilterDeps | None = None

    def __post_init__(self):
        if self.filter_deps is None:
            self.filter_deps = FilterDeps(self.svdict, self.coref, self.lexicon)

    @property
    def generator_name(self) -> str:
        return "template" if self.generator is None else "external"


@dataclass
class TurnOutcome:
    status: str
    record: AugRecord | None = None
    problems: list[str] = field(default_factory=list)


def build_context(dialogue: Dialogue, index: int) -> TurnContext:
    """Turn context from the original dialogue: history, prior state, active domain."""
    turn = dialogue.turns[index]
    history = [(t.system_utterance, t.user_utterance) for t in dialogue.turns[:index]]
    prior_state = dict(dialogue.turns[index - 1].belief_state) if index > 0 else {}
    return TurnContext(
        system_utterance=turn.system_utterance,
        system_acts=list(turn.system_acts),
        history=history,
        prior_state=prior_state,
        active_domain=_active_domain(dialogue, index),
    )


def _active_domain(dialogue: Dialogue, index: int) -> str | None:
    """Domain of the most recent system or user act at this point, if any."""
    turn = dialogue.turns[index]
    for act in reversed(turn.system_acts):
        if act.slot:
            return slot_domain(act.slot)
    for prior in reversed(dialogue.turns[:index]):
        for item in reversed(list(prior.user_act)):
            return slot_domain(item.slot)
        for act in reversed(prior.system_acts):
            if act.slot:
                return slot_domain(act.slot)
    return None


def augment_turn(
    ctx: TurnContext,
    deps: AugDeps,
    cfg: AugConfig,
    dialogue_id: str,
    turn_id: int,
) -> TurnOutcome:
    """Generate an act, realize candidates, filter, and emit a record.

    Empty acts are skipped (nothing to filter); when every candidate fails
    the filter the turn counts as a failed attempt.
    """
    problems: list[str] = []
    rng = turn_rng(cfg.seed, dialogue_id, turn_id)
    act, new_state = generate_user_act(ctx, deps.svdict, deps.coref, rng, cfg, problems)
    if not len(act):
        return TurnOutcome(STATUS_SKIPPED, problems=problems)
    if deps.generator is None:
        candidates = realize_template(act, ctx, deps.lexicon, rng, cfg.beam_size)
    else:
        candidates = deps.generator.generate(
            ctx.history, ctx.system_utterance, act, cfg.beam_size
        )
    accepted, attempts = filter_candidates(candidates, ctx, act, deps.filter_deps)
    if accepted is None:
        problems.append(f"{dialogue_id}/{turn_id}: all {attempts} candidates failed the filter")
        return TurnOutcome(STATUS_FAILED, problems=problems)
    record = AugRecord(
        dialogue_id=dialogue_id,
        turn_id=turn_id,
        system_utterance=ctx.system_utterance,
        history=list(ctx.history),
        augmented_act=act,
        augmented_utterance=accepted,
        new_belief_state=new_state,
        generator=deps.generator_name,
        attempts=attempts,
    )
    return TurnOutcome(STATUS_OK, record=record, problems=problems)


def _augment_dialogue(dialogue: Dialogue, deps: AugDeps, cfg: AugConfig) -> list[TurnOutcome]:
    return [
        augment_turn(build_context(dialogue, i), deps, cfg, dialogue.id, turn.turn_id)
        for i, turn in enumerate(dialogue.turns)
    ]


def augment_corpus(
    corpus: Corpus,
    deps: AugDeps,
    cfg: AugConfig,
    workers: int = 1,
) -> tuple[list[AugRecord], AugStats]:
    """Augment every turn of every dialogue; deterministic in corpus order."""
    if workers <= 1:
        per_dialogue = [_augment_dialogue(d, deps, cfg) for d in corpus]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_dialogue = list(pool.map(lambda d: _augment_dialogue(d, deps, cfg), corpus))
    records: list[AugRecord] = []
    stats = AugStats()
    for outcomes in per_dialogue:
        for outcome in outcomes:
            for problem in outcome.problems:
                log.debug("%s", problem)
            stats.problems.extend(outcome.problems)
            if outcome.status == STATUS_SKIPPED:
                stats.turns_skipped += 1
                continue
            stats.turns_attempted += 1
            if outcome.status == STATUS_OK:
                stats.turns_succeeded += 1
                records.append(outcome.record)
                for item in outcome.record.augmented_act:
                    stats.act_type_counts[item.act_type] += 1
                    if item.refer is not None:
                        stats.act_type_counts["refer"] += 1
    return records, stats


def write_records(records: list[AugRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def load_records(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def write_stats(stats: AugStats, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(stats.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def records_to_corpus(records: list[AugRecord]) -> Corpus:
    """Materialize records as single-turn dialogues (for validation and stats)."""
    dialogues = []
    for record in records:
        turn = Turn(
            turn_id=record.turn_id,
            system_utterance=record.system_utterance,
            system_acts=[],
            user_utterance=record.augmented_utterance,
            user_act=record.augmented_act,
            belief_state=dict(record.new_belief_state),
        )
        dialogues.append(Dialogue(id=f"{record.dialogue_id}#aug{record.turn_id}", turns=[turn]))
    return Corpus(dialogues)


def value_substitution(
    turn: Turn,
    svdict: SlotValueDict,
    rng: np.random.Generator,
) -> tuple[Turn, list[tuple[str, str, str]]] | None:
    """Value-substitution baseline for one turn.

    Every non-refer span item whose value occurs verbatim in the user
    utterance gets a fresh dictionary value (never the old one, never
    dontcare); all occurrences in the utterance, the act and the belief state
    are rewritten together. Returns the new turn plus (slot, old, new)
    substitutions, or None when nothing was substitutable.
    """
    utterance = turn.user_utterance
    new_items = list(turn.user_act)
    new_state = dict(turn.belief_state)
    subs: list[tuple[str, str, str]] = []
    for i, item in enumerate(new_items):
        if item.refer is not None or svdict.is_boolean(item.slot) or item.value == DONTCARE:
            continue
        if item.slot not in svdict:
            continue
        if not contains_value(utterance, item.value):
            continue
        pool = [v for v in svdict.values_for(item.slot) if v != item.value and v != DONTCARE]
        if not pool:
            continue
        new_value = pool[int(rng.integers(len(pool)))]
        utterance = replace_value(utterance, item.value, new_value)
        new_items[i] = replace(item, value=new_value)
        new_state[item.slot] = new_value
        subs.append((item.slot, item.value, new_value))
    if not subs:
        return None
    new_turn = Turn(
        turn_id=turn.turn_id,
        system_utterance=turn.system_utterance,
        system_acts=list(turn.system_acts),
        user_utterance=utterance,
        user_act=UserAct(tuple(new_items)),
        belief_state=new_state,
    )
    return new_turn, subs


def substitute_corpus(
    corpus: Corpus, svdict: SlotValueDict, seed: int
) -> tuple[list[dict], AugStats]:
    """Apply value substitution across a corpus, one seeded draw stream per turn."""
    records: list[dict] = []
    stats = AugStats()
    for dialogue in corpus:
        for turn in dialogue.turns:
            stats.turns_attempted += 1
            rng = turn_rng(seed, dialogue.id, turn.turn_id)
            result = value_substitution(turn, svdict, rng)
            if result is None:
                continue
            new_turn, subs = result
            stats.turns_succeeded += 1
            records.append(
                {
                    "dialogue_id": dialogue.id,
                    "turn_id": new_turn.turn_id,
                    "user_utterance": new_turn.user_utterance,
                    "user_act": [
                        {"act_type": it.act_type, "slot": it.slot,
                         "value": it.value, "refer": it.refer}
                        for it in new_turn.user_act
                    ],
                    "belief_state": dict(sorted(new_turn.belief_state.items())),
                    "substitutions": [
                        {"slot": s, "old": o, "new": n} for s, o, n in subs
                    ],
                }
            )
    return records, stats
