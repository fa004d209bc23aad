import numpy as np
import pytest

from actforge.corpus import (
    ActItem,
    Corpus,
    Dialogue,
    SystemAct,
    Turn,
    UserAct,
)
from actforge.metrics import (
    CLASS_DONTCARE,
    CLASS_FALSE,
    CLASS_INFORM,
    CLASS_REFER,
    CLASS_SPAN,
    CLASS_TRUE,
    categorize_slot,
    joint_goal_accuracy,
    slot_class_f1,
    slot_distribution,
)


def turn(turn_id, utterance, items, belief, system_acts=()):
    return Turn(
        turn_id=turn_id,
        system_utterance="" if turn_id == 0 else "ok",
        system_acts=list(system_acts),
        user_utterance=utterance,
        user_act=UserAct(tuple(items)),
        belief_state=dict(belief),
    )


def inform(slot, value, refer=None):
    return ActItem("inform", slot, value, refer)


def f1_fixture():
    """Ten turns, one gold update each; classes and errors planted by hand."""
    states = []
    acc = {}

    def push(extra):
        acc.update(extra)
        states.append(dict(acc))

    push({"hotel-area": "north"})
    push({"hotel-parking": "yes"})
    push({"hotel-internet": "no"})
    push({"hotel-stars": "dontcare"})
    push({"hotel-name": "travelodge"})
    push({"taxi-depart": "travelodge"})
    push({"hotel-people": "20"})
    push({"hotel-day": "march 11th"})
    push({"hotel-stay": "21"})
    push({"hotel-price": "cheap"})

    turns = [
        turn(0, "i want a hotel in the north", [inform("hotel-area", "north")], states[0]),
        turn(1, "yes i need parking", [inform("hotel-parking", "yes")], states[1]),
        turn(2, "no internet needed", [inform("hotel-internet", "no")], states[2]),
        turn(3, "any number of stars is fine", [inform("hotel-stars", "dontcare")], states[3]),
        turn(4, "yes travelodge sounds good", [ActItem("confirm", "hotel-name", "travelodge")],
             states[4], system_acts=[SystemAct("recommend", "hotel-name", "travelodge")]),
        turn(5, "i need a taxi from the hotel",
             [inform("taxi-depart", "travelodge", refer="hotel-name")], states[5]),
        turn(6, "for 20 people", [inform("hotel-people", "20")], states[6]),
        turn(7, "on march 11th", [inform("hotel-day", "march 11th")], states[7]),
        turn(8, "we stay 21 nights", [inform("hotel-stay", "21")], states[8]),
        turn(9, "something cheap", [inform("hotel-price", "cheap")], states[9]),
    ]
    corpus = Corpus([Dialogue(id="f1d", turns=turns)])

    preds = {}
    acc = {}

    def predict(tid, extra):
        acc.update(extra)
        preds[("f1d", tid)] = dict(acc)

    predict(0, {"hotel-area": "north"})
    predict(1, {"hotel-parking": "no"})  # wrong value: FN true, FP false
    predict(2, {"hotel-internet": "no"})
    predict(3, {"hotel-stars": "dontcare"})
    predict(4, {"hotel-name": "travelodge"})
    predict(5, {})  # missed refer update: FN refer
    predict(6, {"hotel-people": "20"})
    predict(7, {"hotel-day": "march 12th"})  # FN span + FP span
    predict(8, {"hotel-stay": "21"})
    predict(9, {"hotel-price": "cheap", "restaurant-food": "ramen"})  # extra FP span
    return corpus, preds


class TestJointGoalAccuracy:
    def test_perfect_predictions(self, mini):
        preds = {
            (d.id, t.turn_id): dict(t.belief_state) for d in mini for t in d.turns
        }
        assert joint_goal_accuracy(preds, mini) == 1.0

    def test_half_right(self):
        turns = [
            turn(0, "north", [inform("hotel-area", "north")], {"hotel-area": "north"}),
            turn(1, "cheap", [inform("hotel-price", "cheap")],
                 {"hotel-area": "north", "hotel-price": "cheap"}),
        ]
        corpus = Corpus([Dialogue(id="d", turns=turns)])
        preds = {
            ("d", 0): {"hotel-area": "north"},
            ("d", 1): {"hotel-area": "north", "hotel-price": "expensive"},
        }
        assert joint_goal_accuracy(preds, corpus) == 0.5

    def test_missing_turn_counts_as_wrong(self, mini):
        preds = {
            (d.id, t.turn_id): dict(t.belief_state) for d in mini for t in d.turns
        }
        preds.pop(("mini-0001", 0))
        assert joint_goal_accuracy(preds, mini) == pytest.approx(11 / 12)

    def test_case_and_order_insensitive(self):
        turns = [turn(0, "north", [inform("hotel-area", "north")],
                      {"hotel-area": "north", "hotel-price": "cheap"})]
        corpus = Corpus([Dialogue(id="d", turns=turns)])
        preds = {("d", 0): {"hotel-price": "Cheap", "hotel-area": "NORTH"}}
        assert joint_goal_accuracy(preds, corpus) == 1.0

    def test_planted_errors_match_bruteforce_oracle(self, svdict):
        # twenty synthetic turns; the oracle is an independent set-equality count
        rng = np.random.default_rng(123)
        slots = sorted(svdict.entries)
        dialogues = []
        gold_states = {}
        for d in range(4):
            turns_ = []
            state = {}
            for t in range(5):
                slot = str(slots[int(rng.integers(len(slots)))])
                value = svdict.values_for(slot)[int(rng.integers(len(svdict.values_for(slot))))]
                state[slot] = value
                turns_.append(turn(t, f"i want {value}", [inform(slot, value)], state))
                gold_states[(f"d{d}", t)] = dict(state)
            dialogues.append(Dialogue(id=f"d{d}", turns=turns_))
        corpus = Corpus(dialogues)

        preds = {}
        for key, state in gold_states.items():
            pred = dict(state)
            roll = rng.random()
            if roll < 0.3 and pred:
                victim = sorted(pred)[int(rng.integers(len(pred)))]
                pred[victim] = "wrong value"
            elif roll < 0.5 and pred:
                victim = sorted(pred)[int(rng.integers(len(pred)))]
                del pred[victim]
            elif roll < 0.6:
                pred["attraction-name"] = "spurious"
            preds[key] = pred

        expected = sum(
            1
            for key, state in gold_states.items()
            if sorted((s, v) for s, v in preds[key].items())
            == sorted((s, v) for s, v in state.items())
        ) / len(gold_states)
        assert joint_goal_accuracy(preds, corpus) == expected


class TestCategorize:
    def test_boolean_true(self, svdict, coref):
        t = turn(0, "i need parking", [inform("hotel-parking", "yes")], {"hotel-parking": "yes"})
        assert categorize_slot(t, "hotel-parking", "yes", svdict, coref) == CLASS_TRUE

    def test_refer_precedence(self, svdict, coref):
        t = turn(0, "by the time of my reservation",
                 [inform("taxi-arrive", "17:26", refer="restaurant-time")],
                 {"taxi-arrive": "17:26"})
        assert categorize_slot(t, "taxi-arrive", "17:26", svdict, coref) == CLASS_REFER

    def test_system_informed_value(self, svdict, coref):
        t = turn(1, "yes pho bistro works",
                 [ActItem("confirm", "restaurant-name", "pho bistro")],
                 {"restaurant-name": "pho bistro"},
                 system_acts=[SystemAct("recommend", "restaurant-name", "pho bistro")])
        assert categorize_slot(t, "restaurant-name", "pho bistro", svdict, coref) == CLASS_INFORM

    def test_dontcare_beats_inform(self, svdict, coref):
        t = turn(1, "whatever", [inform("hotel-area", "dontcare")], {"hotel-area": "dontcare"},
                 system_acts=[SystemAct("inform", "hotel-area", "dontcare")])
        assert categorize_slot(t, "hotel-area", "dontcare", svdict, coref) == CLASS_DONTCARE

    def test_span_fallback_warns(self, svdict, coref, caplog):
        t = turn(0, "hello there", [inform("hotel-area", "north")], {"hotel-area": "north"})
        with caplog.at_level("WARNING"):
            assert categorize_slot(t, "hotel-area", "west", svdict, coref) == CLASS_SPAN
        assert "unclassifiable" in caplog.text


class TestSlotClassF1:
    def test_perfect_predictions_give_one(self, svdict, coref):
        corpus, _ = f1_fixture()
        preds = {
            (d.id, t.turn_id): dict(t.belief_state) for d in corpus for t in d.turns
        }
        f1 = slot_class_f1(preds, corpus, svdict, coref)
        for cls in (CLASS_SPAN, CLASS_TRUE, CLASS_FALSE, CLASS_DONTCARE, CLASS_INFORM, CLASS_REFER):
            assert f1[cls] == 1.0

    def test_empty_predictions_give_zero(self, svdict, coref):
        corpus, _ = f1_fixture()
        f1 = slot_class_f1({}, corpus, svdict, coref)
        assert all(v == 0.0 for v in f1.values())

    def test_hand_computed_confusions(self, svdict, coref):
        # hand counts: span TP4 FN1 FP2; true FN1; false TP1 FP1;
        # dontcare TP1; inform TP1; refer FN1
        corpus, preds = f1_fixture()
        f1 = slot_class_f1(preds, corpus, svdict, coref)
        assert f1[CLASS_SPAN] == pytest.approx(8 / 11, abs=1e-9)
        assert f1[CLASS_TRUE] == 0.0
        assert f1[CLASS_FALSE] == pytest.approx(2 / 3, abs=1e-9)
        assert f1[CLASS_DONTCARE] == 1.0
        assert f1[CLASS_INFORM] == 1.0
        assert f1[CLASS_REFER] == 0.0

    def test_fixture_jga_is_one_tenth(self, svdict, coref):
        corpus, preds = f1_fixture()
        assert joint_goal_accuracy(preds, corpus) == pytest.approx(0.1)


def distribution_fixture():
    """Four turns: one coreference turn, one multi-domain turn (hand counted)."""
    turns = [
        turn(0, "a hotel in the north", [inform("hotel-area", "north")],
             {"hotel-area": "north"}),
        turn(1, "i need parking", [inform("hotel-parking", "yes")],
             {"hotel-area": "north", "hotel-parking": "yes"}),
        turn(2, "the same day as the train",
             [inform("hotel-day", "march 12th", refer="train-day")],
             {"hotel-area": "north", "hotel-parking": "yes",
              "train-day": "march 12th", "hotel-day": "march 12th"}),
        turn(3, "a taxi to pho bistro", [inform("taxi-dest", "pho bistro")],
             {"hotel-area": "north", "hotel-parking": "yes",
              "train-day": "march 12th", "hotel-day": "march 12th",
              "taxi-dest": "pho bistro"}),
    ]
    return Corpus([Dialogue(id="dist", turns=turns)])


class TestSlotDistribution:
    def test_empty_corpus_all_zero(self, svdict, coref):
        report = slot_distribution(Corpus([]), svdict, coref)
        assert report.turns == 0
        assert (report.span, report.coreference, report.multi_domain) == (0.0, 0.0, 0.0)

    def test_hand_counted_fixture(self, svdict, coref):
        report = slot_distribution(distribution_fixture(), svdict, coref)
        assert report.turns == 4
        assert report.coreference == pytest.approx(25.0)
        assert report.multi_domain == pytest.approx(25.0)
        assert report.span == pytest.approx(50.0)
        assert report.confirm_true == pytest.approx(25.0)
        assert report.confirm_false == 0.0
        assert report.dontcare == 0.0

    def test_slot_unit(self, svdict, coref):
        report = slot_distribution(distribution_fixture(), svdict, coref, unit="slot")
        # four items total: 2 span, 1 confirm_true, 1 coreference, 1 off-domain
        assert report.span == pytest.approx(50.0)
        assert report.confirm_true == pytest.approx(25.0)
        assert report.coreference == pytest.approx(25.0)
        assert report.multi_domain == pytest.approx(25.0)

    def test_report_table_has_paper_rows(self, svdict, coref):
        table = slot_distribution(distribution_fixture(), svdict, coref).format_table()
        for row in ("Span", "Confirm (True)", "Confirm (False)", "Dontcare",
                    "Coreference", "Multi-domain", "#Turns"):
            assert row in table

    def test_percentages_bounded(self, mini, svdict, coref):
        report = slot_distribution(mini, svdict, coref)
        for value in (report.span, report.confirm_true, report.confirm_false,
                      report.dontcare, report.coreference, report.multi_domain):
            assert 0.0 <= value <= 100.0
        assert report.turns == 12
