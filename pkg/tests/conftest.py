import json

import numpy as np
import pytest

from actforge.actgen import AugConfig, TurnContext, generate_user_act, turn_rng
from actforge.corpus import (
    SystemAct,
    bundled_coref_list,
    bundled_dictionary,
    bundled_mini_corpus,
)
from actforge.genbridge import PhraseLexicon


@pytest.fixture(scope="session")
def svdict():
    return bundled_dictionary()


@pytest.fixture(scope="session")
def coref():
    return bundled_coref_list()


@pytest.fixture(scope="session")
def lexicon(svdict, coref):
    return PhraseLexicon.default_for(svdict, coref)


@pytest.fixture
def mini():
    return bundled_mini_corpus()


@pytest.fixture(scope="session")
def data_paths():
    from importlib import resources

    root = resources.files("actforge.data")
    return {
        "dict": str(root / "slot_value_dictionary.json"),
        "coref": str(root / "coreference_list.json"),
        "corpus": str(root / "mini_corpus.json"),
    }


def write_json(path, payload):
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8")
    return str(path)


def random_context(svdict, rng: np.random.Generator) -> TurnContext:
    """A plausible synthetic system turn: maybe recommends, maybe requests."""
    domains = svdict.domains()
    domain = domains[int(rng.integers(len(domains)))]
    slots = svdict.slots_in_domain(domain)
    acts = []
    used = set()
    if rng.random() < 0.5:
        for slot in rng.choice(slots, size=min(len(slots), int(rng.integers(1, 3))), replace=False):
            slot = str(slot)
            values = svdict.values_for(slot)
            acts.append(SystemAct("recommend", slot, values[int(rng.integers(len(values)))]))
            used.add(slot)
    if rng.random() < 0.5:
        free = [s for s in slots if s not in used]
        if free:
            for slot in rng.choice(free, size=min(len(free), int(rng.integers(1, 3))), replace=False):
                acts.append(SystemAct("request", str(slot), None))
    prior = {}
    all_slots = sorted(svdict.entries)
    for slot in rng.choice(all_slots, size=int(rng.integers(0, 5)), replace=False):
        slot = str(slot)
        values = [v for v in svdict.values_for(slot)]
        prior[slot] = values[int(rng.integers(len(values)))]
    return TurnContext(
        system_utterance="do you want my recommendation?" if acts else "",
        system_acts=acts,
        history=[("hello", "hi there")],
        prior_state=prior,
        active_domain=domain,
    )


def random_config(rng: np.random.Generator, seed: int = 0) -> AugConfig:
    probs = [0.0, 0.3, 0.7, 1.0]
    weights_options = (
        ((0, 0.15), (1, 0.40), (2, 0.30), (3, 0.15)),
        ((0, 0.0), (1, 0.5), (2, 0.5), (3, 0.0)),
        ((1, 1.0),),
        ((2, 0.5), (3, 0.5)),
    )
    return AugConfig(
        p_confirm=probs[int(rng.integers(len(probs)))],
        p_reply=probs[int(rng.integers(len(probs)))],
        p_domain=probs[int(rng.integers(len(probs)))],
        p_coref=probs[int(rng.integers(len(probs)))],
        inform_count_weights=weights_options[int(rng.integers(len(weights_options)))],
        beam_size=int(rng.integers(1, 4)),
        seed=seed,
        domain_switch_mode="stay" if rng.random() < 0.5 else "switch",
    )


def random_act_pair(svdict, coref, rng: np.random.Generator, seed_tuple=(0, "fuzz", 0)):
    """(ctx, act, state) drawn through the real act pipeline, so invariants hold."""
    ctx = random_context(svdict, rng)
    cfg = random_config(rng)
    act_rng = turn_rng(seed_tuple[0], seed_tuple[1], seed_tuple[2])
    act, state = generate_user_act(ctx, svdict, coref, act_rng, cfg)
    return ctx, act, state
