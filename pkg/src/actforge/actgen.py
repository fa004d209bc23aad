"""Stochastic synthesis of augmented user dialogue acts and the composed state.

Every turn draws from its own generator seeded by (global seed, dialogue id,
turn id), so dialogues can be processed in any order, or in parallel, without
changing the output. Draws are consumed in a fixed order per turn:

  1. confirm acceptance (only when the system recommends something)
  2. per requested slot, in sorted slot order: acceptance, then value index
  3. inform count k
  4. domain switch
  5. new-domain choice (only when a switch fires and k > 0)
  6. inform slot sample, then one value index per sampled slot
  7. coreference trigger, then eligible-rewrite choice
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import (
    DOMAINS,
    DONTCARE,
    ActItem,
    CorefList,
    SlotValueDict,
    SystemAct,
    UserAct,
    slot_domain,
)

DEFAULT_INFORM_COUNT_WEIGHTS = {0: 0.15, 1: 0.40, 2: 0.30, 3: 0.15}

# How p_domain is read; "stay" treats it as the probability of staying in the
# current domain when the turn already confirms or replies, "switch" applies
# it directly as the switch probability.
DOMAIN_SWITCH_MODES = ("stay", "switch")


class ActGenError(ValueError):
    pass


class CompositionError(ActGenError):
    """Slot collision between act groups."""


@dataclass(frozen=True)
class AugConfig:
    p_confirm: float = 0.7
    p_reply: float = 0.9
    p_domain: float = 0.8
    p_coref: float = 0.6
    inform_count_weights: tuple[tuple[int, float], ...] = tuple(
        sorted(DEFAULT_INFORM_COUNT_WEIGHTS.items())
    )
    beam_size: int = 5
    seed: int = 0
    domain_switch_mode: str = "stay"

    def __post_init__(self):
        for name in ("p_confirm", "p_reply", "p_domain", "p_coref"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ActGenError(f"{name}={p} outside [0, 1]")
        weights = dict(self.inform_count_weights)
        if any(w < 0 for w in weights.values()) or abs(sum(weights.values()) - 1.0) > 1e-9:
            raise ActGenError("inform_count_weights must be non-negative and sum to 1")
        if self.beam_size < 1:
            raise ActGenError("beam_size must be >= 1")
        if self.domain_switch_mode not in DOMAIN_SWITCH_MODES:
            raise ActGenError(f"unknown domain_switch_mode {self.domain_switch_mode!r}")

    @property
    def count_weights(self) -> dict[int, float]:
        return dict(self.inform_count_weights)

    @classmethod
    def from_dict(cls, raw: dict) -> "AugConfig":
        kwargs = dict(raw)
        if "inform_count_weights" in kwargs:
            kwargs["inform_count_weights"] = tuple(
                sorted((int(k), float(v)) for k, v in kwargs["inform_count_weights"].items())
            )
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "AugConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "p_confirm": self.p_confirm,
            "p_reply": self.p_reply,
            "p_domain": self.p_domain,
            "p_coref": self.p_coref,
            "inform_count_weights": {str(k): v for k, v in self.inform_count_weights},
            "beam_size": self.beam_size,
            "seed": self.seed,
            "domain_switch_mode": self.domain_switch_mode,
        }


@dataclass
class TurnContext:
    """Everything act generation may look at for one turn."""

    system_utterance: str
    system_acts: list[SystemAct]
    history: list[tuple[str, str]] = field(default_factory=list)
    prior_state: dict[str, str] = field(default_factory=dict)
    active_domain: str | None = None


def turn_rng(global_seed: int, dialogue_id: str, turn_id: int) -> np.random.Generator:
    """Deterministic per-turn generator; same seed tuple, same draw sequence."""
    digest = hashlib.sha256(dialogue_id.encode("utf-8")).digest()
    did = int.from_bytes(digest[:8], "big")
    return np.random.default_rng(
        np.random.SeedSequence([global_seed & 0xFFFFFFFFFFFFFFFF, did, turn_id])
    )


def generate_confirm(ctx: TurnContext, rng: np.random.Generator, cfg: AugConfig) -> list[ActItem]:
    """Accept all recommended slot values with probability p_confirm.

    When several domains are recommended in one turn, only the first
    recommendation's domain is confirmed; the last recommended value wins
    per slot.
    """
    recommends = [a for a in ctx.system_acts if a.kind == "recommend" and a.slot and a.value]
    if not recommends:
        return []
    if rng.random() >= cfg.p_confirm:
        return []
    lead = slot_domain(recommends[0].slot)
    values: dict[str, str] = {}
    for act in recommends:
        if slot_domain(act.slot) == lead:
            values[act.slot] = act.value
    return [ActItem("confirm", slot, value) for slot, value in values.items()]


def generate_reply(
    ctx: TurnContext,
    svdict: SlotValueDict,
    rng: np.random.Generator,
    cfg: AugConfig,
    problems: list[str] | None = None,
) -> list[ActItem]:
    """Answer each requested slot independently with probability p_reply.

    Requested slots missing from the dictionary are skipped and recorded in
    `problems`; they consume no draws.
    """
    requested = sorted({a.slot for a in ctx.system_acts if a.kind == "request" and a.slot})
    items = []
    for slot in requested:
        if slot not in svdict:
            if problems is not None:
                problems.append(f"requested slot {slot} not in dictionary; skipped")
            continue
        if rng.random() >= cfg.p_reply:
            continue
        values = svdict.values_for(slot)
        items.append(ActItem("reply", slot, values[rng.integers(len(values))]))
    return items


def generate_inform(
    ctx: TurnContext,
    svdict: SlotValueDict,
    rng: np.random.Generator,
    cfg: AugConfig,
    reserved: set[str],
    problems: list[str] | None = None,
) -> tuple[list[ActItem], str | None]:
    """Volunteer k extra slot values, possibly after switching domain.

    `reserved` holds the slots already taken by confirm/reply this turn;
    they are never informed. Returns the items and the new domain when a
    switch happened (None otherwise).
    """
    counts = [c for c, _ in cfg.inform_count_weights]
    weights = [w for _, w in cfg.inform_count_weights]
    k = int(rng.choice(counts, p=weights))

    switch_draw = rng.random()
    if cfg.domain_switch_mode == "stay":
        # p_domain = probability of staying on-domain when the turn is already
        # engaged with the system (a confirm or reply was produced).
        switch = not reserved and switch_draw < (1.0 - cfg.p_domain)
    else:
        switch = switch_draw < cfg.p_domain

    if k == 0:
        return [], None

    domain = ctx.active_domain
    if switch or domain is None:
        options = [d for d in DOMAINS if d != domain and svdict.slots_in_domain(d)]
        if options:
            domain = options[rng.integers(len(options))]

    available = [s for s in svdict.slots_in_domain(domain) if s not in reserved]
    if len(available) < k:
        if problems is not None:
            problems.append(
                f"domain {domain} has only {len(available)} free slots; inform count "
                f"truncated from {k}"
            )
        k = len(available)
    if k == 0:
        return [], None
    chosen = [str(s) for s in rng.choice(available, size=k, replace=False)]
    items = []
    for slot in chosen:
        values = svdict.values_for(slot)
        items.append(ActItem("inform", slot, values[rng.integers(len(values))]))
    switched = domain if domain != ctx.active_domain else None
    return items, switched


def apply_coreference(
    items: list[ActItem],
    ctx: TurnContext,
    coref: CorefList,
    rng: np.random.Generator,
    cfg: AugConfig,
    same_turn: dict[str, str] | None = None,
) -> list[ActItem]:
    """With probability p_coref, rewrite one inform item as a coreference.

    An item is eligible when its slot has a listed pair whose referred slot
    holds a real (non-dontcare) value in the prior state or among this turn's
    values (`same_turn`). At most one item is rewritten; the rewritten item
    keeps the referred slot's value so the composed state stays resolved.
    """
    if not items:
        return []
    fire = rng.random() < cfg.p_coref
    pool = dict(ctx.prior_state)
    pool.update(same_turn or {})
    eligible: list[tuple[int, str]] = []
    for i, item in enumerate(items):
        if item.refer is not None:
            continue
        for pair in coref.pairs_for(item.slot):
            value = pool.get(pair.referred)
            if value is not None and value != DONTCARE:
                eligible.append((i, pair.referred))
    if not fire or not eligible:
        return list(items)
    idx, referred = eligible[rng.integers(len(eligible))]
    out = list(items)
    out[idx] = replace(out[idx], refer=referred, value=pool[referred])
    return out


def compose_turn(
    confirm: list[ActItem],
    reply: list[ActItem],
    inform: list[ActItem],
    prior_state: dict[str, str],
) -> tuple[UserAct, dict[str, str]]:
    """Merge the act groups into one UserAct and overwrite the state with it.

    Groups are ordered confirm, reply, inform and sorted by slot inside each
    group. Any slot appearing in two groups is a composition error.
    """
    ordered: list[ActItem] = []
    seen: set[str] = set()
    for group in (confirm, reply, inform):
        for item in sorted(group, key=lambda it: it.slot):
            if item.slot in seen:
                raise CompositionError(f"slot {item.slot} appears in more than one act group")
            seen.add(item.slot)
            ordered.append(item)
    state = dict(prior_state)
    for item in ordered:
        state[item.slot] = item.value
    return UserAct(tuple(ordered)), state


def generate_user_act(
    ctx: TurnContext,
    svdict: SlotValueDict,
    coref: CorefList,
    rng: np.random.Generator,
    cfg: AugConfig,
    problems: list[str] | None = None,
) -> tuple[UserAct, dict[str, str]]:
    """Full per-turn act pipeline: confirm, reply, inform, coreference, compose."""
    confirm = generate_confirm(ctx, rng, cfg)
    reply = generate_reply(ctx, svdict, rng, cfg, problems)
    reserved = {it.slot for it in confirm} | {it.slot for it in reply}
    inform, _switched = generate_inform(ctx, svdict, rng, cfg, reserved, problems)
    same_turn = {it.slot: it.value for it in (*confirm, *reply, *inform)}
    inform = apply_coreference(inform, ctx, coref, rng, cfg, same_turn=same_turn)
    return compose_turn(confirm, reply, inform, ctx.prior_state)
