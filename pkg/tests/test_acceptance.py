"""Acceptance suite: one test per top-level criterion, each printing a verdict line."""

import functools
import hashlib
import time

import numpy as np

from actforge.actgen import AugConfig, TurnContext, generate_user_act, turn_rng
from actforge.augment import AugDeps, augment_corpus, substitute_corpus
from actforge.cli import main as cli_main
from actforge.corpus import (
    Corpus,
    Dialogue,
    SystemAct,
    bundled_mini_corpus,
)
from actforge.filtering import C_BOOL, C_SPAN, FilterDeps, gate_rule, verdict_for
from actforge.genbridge import realize_template
from actforge.metrics import joint_goal_accuracy, slot_class_f1, slot_distribution
from actforge.text import replace_value

from conftest import random_act_pair
from test_filtering import GATE_CASES
from test_metrics import f1_fixture


def verdict(name):
    """Print one acceptance line per criterion; failures raise before printing."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[ACCEPTANCE] {name}: FAIL")
                raise
            print(f"[ACCEPTANCE] {name}: PASS")

        return wrapper

    return deco


@verdict("closure: template output passes the filter; mini-corpus success rate 1.0")
def test_closure(svdict, coref, lexicon):
    started = time.monotonic()
    deps = FilterDeps(svdict, coref, lexicon)
    meta = np.random.default_rng(2001)
    for i in range(1000):
        ctx, act, _ = random_act_pair(svdict, coref, meta, seed_tuple=(11, "accept", i))
        candidates = realize_template(act, ctx, lexicon, meta, 3)
        for cand in candidates:
            res = verdict_for(deps, ctx.system_utterance, cand, act)
            assert res.passed, (act, cand, res.failures)

    mini = bundled_mini_corpus()
    _, stats = augment_corpus(mini, AugDeps(svdict, coref, lexicon), AugConfig(seed=17))
    assert stats.success_rate == 1.0
    assert time.monotonic() - started < 10.0


@verdict("composition soundness: belief states re-derive from (prior state, act)")
def test_composition_soundness(svdict, coref, lexicon):
    mini = bundled_mini_corpus()
    records, _ = augment_corpus(mini, AugDeps(svdict, coref, lexicon), AugConfig(seed=23))
    assert records
    prior_by_key = {}
    for dialogue in mini:
        for i, turn in enumerate(dialogue.turns):
            prior = dialogue.turns[i - 1].belief_state if i else {}
            prior_by_key[(dialogue.id, turn.turn_id)] = dict(prior)
    mismatches = 0
    for record in records:
        rebuilt = dict(prior_by_key[(record.dialogue_id, record.turn_id)])
        for item in record.augmented_act:  # independent overwrite rule
            rebuilt[item.slot] = item.value
        if rebuilt != record.new_belief_state:
            mismatches += 1
    assert mismatches == 0


def _policy_rates(svdict, coref, n, cfg_kwargs, make_ctx):
    """(eligible turns, act-type emission count) over n seeded synthetic turns."""
    cfg = AugConfig(**cfg_kwargs)
    eligible = 0
    hits = {"confirm": 0, "reply": 0, "refer": 0}
    for i in range(n):
        ctx = make_ctx(i)
        rng = turn_rng(cfg.seed, f"policy-{i}", i)
        act, _ = generate_user_act(ctx, svdict, coref, rng, cfg)
        pool = dict(ctx.prior_state)
        pool.update({it.slot: it.value for it in act})
        coref_eligible = any(
            it.act_type == "inform" and it.refer is None
            and any(
                pool.get(p.referred) not in (None, "dontcare")
                for p in coref.pairs_for(it.slot)
            )
            for it in act
        ) or any(it.refer is not None for it in act)
        eligible += 1
        for kind in ("confirm", "reply"):
            if any(it.act_type == kind for it in act):
                hits[kind] += 1
        if any(it.refer is not None for it in act):
            hits["refer"] += 1
        if not coref_eligible:
            hits.setdefault("coref_ineligible", 0)
            hits["coref_ineligible"] += 1
    return eligible, hits


@verdict("act-policy laws: degenerate probabilities exact; default rates within 4 sigma")
def test_act_policy_laws(svdict, coref):
    started = time.monotonic()

    def recommend_ctx(i):
        return TurnContext(
            system_utterance="how about this?",
            system_acts=[SystemAct("recommend", "restaurant-name", "pho bistro")],
            history=[],
            prior_state={},
            active_domain="restaurant",
        )

    def request_ctx(i):
        return TurnContext(
            system_utterance="which area?",
            system_acts=[SystemAct("request", "hotel-area")],
            history=[],
            prior_state={},
            active_domain="hotel",
        )

    def taxi_ctx(i):
        return TurnContext(
            system_utterance="anything else?",
            system_acts=[],
            history=[],
            prior_state={
                "restaurant-time": "17:26",
                "restaurant-name": "pho bistro",
                "hotel-name": "travelodge",
            },
            active_domain="taxi",
        )

    zero_inform = {"inform_count_weights": ((0, 1.0),)}
    one_inform = {"inform_count_weights": ((1, 1.0),), "p_domain": 1.0}

    # degenerate laws on 100% of eligible turns
    n_deg = 400
    for p, expect_all in ((1.0, True), (0.0, False)):
        _, hits = _policy_rates(
            svdict, coref, n_deg,
            {"p_confirm": p, "p_reply": 0, "p_coref": 0, **zero_inform},
            recommend_ctx,
        )
        assert hits["confirm"] == (n_deg if expect_all else 0)
        _, hits = _policy_rates(
            svdict, coref, n_deg,
            {"p_confirm": 0, "p_reply": p, "p_coref": 0, **zero_inform},
            request_ctx,
        )
        assert hits["reply"] == (n_deg if expect_all else 0)
        eligible, hits = _policy_rates(
            svdict, coref, n_deg,
            {"p_confirm": 0, "p_reply": 0, "p_coref": p, **one_inform},
            taxi_ctx,
        )
        coref_eligible = n_deg - hits.get("coref_ineligible", 0)
        assert coref_eligible > 0
        assert hits["refer"] == (coref_eligible if expect_all else 0)

    # default probabilities over 10,000 eligible turns each
    n = 10_000

    def check(p, count, eligible):
        sigma = (p * (1 - p) / eligible) ** 0.5
        rate = count / eligible
        assert abs(rate - p) <= 4 * sigma, (rate, p, sigma)

    _, hits = _policy_rates(
        svdict, coref, n, {"p_reply": 0, "p_coref": 0, **zero_inform}, recommend_ctx
    )
    check(0.7, hits["confirm"], n)
    _, hits = _policy_rates(
        svdict, coref, n, {"p_confirm": 0, "p_coref": 0, **zero_inform}, request_ctx
    )
    check(0.9, hits["reply"], n)
    _, hits = _policy_rates(
        svdict, coref, n, {"p_confirm": 0, "p_reply": 0, **one_inform}, taxi_ctx
    )
    coref_eligible = n - hits.get("coref_ineligible", 0)
    check(0.6, hits["refer"], coref_eligible)

    assert time.monotonic() - started < 30.0


@verdict("determinism: same seed gives byte-identical records at workers 1 and 8")
def test_determinism(tmp_path, data_paths):
    digests = []
    for name, workers in (("a", "1"), ("b", "1"), ("w8", "8")):
        out = tmp_path / f"{name}.jsonl"
        code = cli_main([
            "augment", "--corpus", data_paths["corpus"], "--dict", data_paths["dict"],
            "--coref", data_paths["coref"], "--out", str(out),
            "--seed", "404", "--workers", workers,
        ])
        assert code == 0
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1] == digests[2]


@verdict("metrics oracle: JGA matches brute force on 200 perturbed sets; F1 to 1e-9")
def test_metrics_oracle(svdict, coref):
    mini = bundled_mini_corpus()
    gold = {(d.id, t.turn_id): dict(t.belief_state) for d in mini for t in d.turns}
    rng = np.random.default_rng(31)
    slots = sorted(svdict.entries)
    for _ in range(200):
        preds = {}
        for key, state in gold.items():
            pred = dict(state)
            roll = rng.random()
            if roll < 0.25 and pred:
                victim = sorted(pred)[int(rng.integers(len(pred)))]
                pred[victim] = "perturbed value"
            elif roll < 0.45 and pred:
                del pred[sorted(pred)[int(rng.integers(len(pred)))]]
            elif roll < 0.6:
                extra = slots[int(rng.integers(len(slots)))]
                pred[extra] = svdict.values_for(extra)[0]
            if rng.random() < 0.05:
                continue  # missing turn counts as wrong
            preds[key] = pred
        oracle = sum(
            1
            for key, state in gold.items()
            if key in preds
            and sorted(preds[key].items()) == sorted(state.items())
        ) / len(gold)
        assert joint_goal_accuracy(preds, mini) == oracle

    corpus, preds = f1_fixture()
    f1 = slot_class_f1(preds, corpus, svdict, coref)
    expected = {
        "span": 8 / 11, "true": 0.0, "false": 2 / 3,
        "dontcare": 1.0, "inform": 1.0, "refer": 0.0,
    }
    for cls, value in expected.items():
        assert abs(f1[cls] - value) < 1e-9


@verdict("distribution report: fixture hand counts exact; conditional span 100.0")
def test_distribution_report(svdict, coref, lexicon):
    mini = bundled_mini_corpus()
    report = slot_distribution(mini, svdict, coref)
    # hand counts over the 12 fixture turns
    assert report.turns == 12
    assert report.span == 100.0 * 9 / 12
    assert report.confirm_true == 100.0 * 1 / 12
    assert report.confirm_false == 0.0
    assert report.dontcare == 100.0 * 2 / 12
    assert report.coreference == 100.0 * 2 / 12
    assert report.multi_domain == 100.0 * 2 / 12

    records, _ = augment_corpus(mini, AugDeps(svdict, coref, lexicon), AugConfig(seed=29))

    def has_span_item(record):
        return any(
            it.refer is None and not svdict.is_boolean(it.slot) and it.value != "dontcare"
            for it in record.augmented_act
        )

    span_records = [r for r in records if has_span_item(r)]
    assert span_records
    conditioned = slot_distribution(span_records, svdict, coref)
    assert conditioned.span == 100.0


@verdict("value substitution: outputs differ only at substituted spans over 500 turns")
def test_value_substitution_baseline(svdict):
    mini = bundled_mini_corpus()
    dialogues = []
    copies = 42  # 42 x 12 = 504 turns
    for c in range(copies):
        for dialogue in mini:
            dialogues.append(Dialogue(id=f"{dialogue.id}-copy{c}", turns=dialogue.turns))
    big = Corpus(dialogues)
    assert big.num_turns() >= 500

    records, stats = substitute_corpus(big, svdict, seed=55)
    assert stats.turns_attempted >= 500
    assert records
    originals = {}
    for dialogue in big:
        for turn in dialogue.turns:
            originals[(dialogue.id, turn.turn_id)] = turn.user_utterance
    for record in records:
        rebuilt = originals[(record["dialogue_id"], record["turn_id"])]
        for sub in record["substitutions"]:
            assert sub["new"] in svdict.values_for(sub["slot"])
            assert sub["new"] != sub["old"]
            rebuilt = replace_value(rebuilt, sub["old"], sub["new"])
        assert rebuilt == record["user_utterance"]


@verdict("filter semantics: gate unit table passes; class sets respected under fuzz")
def test_filter_semantics(svdict, coref):
    assert len(GATE_CASES) >= 20
    for system, candidate, slot, expected in GATE_CASES:
        got = gate_rule(system, candidate, slot, svdict, coref)
        assert got == expected, (system, candidate, slot, expected, got)

    rng = np.random.default_rng(101)
    words = ["any", "no", "not", "don't", "care", "parking", "internet", "area", "food",
             "north", "ramen", "same", "matter", "doesn't", "yes", "need", "i", "want",
             "17:26", "fine", "the", "of", "hotel", ".", ";", "?"]
    all_slots = sorted(svdict.entries)
    for _ in range(1500):
        text = " ".join(words[int(rng.integers(len(words)))] for _ in range(int(rng.integers(0, 14))))
        slot = all_slots[int(rng.integers(len(all_slots)))]
        gate = gate_rule("", text, slot, svdict, coref)
        assert gate in (C_BOOL if svdict.is_boolean(slot) else C_SPAN)
        assert (gate in C_BOOL) or not svdict.is_boolean(slot)
