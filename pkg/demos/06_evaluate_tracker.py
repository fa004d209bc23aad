"""Score tracker predictions: joint goal accuracy and per-slot-type F1."""

from actforge import bundled_coref_list, bundled_dictionary, bundled_mini_corpus
from actforge.metrics import joint_goal_accuracy, slot_class_f1

svdict = bundled_dictionary()
coref = bundled_coref_list()
corpus = bundled_mini_corpus()

# a fake tracker: perfect except it never resolves coreferences and
# mislabels one boolean slot
preds = {}
for dialogue in corpus:
    for turn in dialogue.turns:
        state = dict(turn.belief_state)
        for item in turn.user_act:
            if item.refer is not None:
                state.pop(item.slot, None)
        if state.get("hotel-parking") == "yes":
            state["hotel-parking"] = "no"
        preds[(dialogue.id, turn.turn_id)] = state

print("joint goal accuracy:", round(joint_goal_accuracy(preds, corpus), 4))
print()
print("per-class F1:")
for cls, score in sorted(slot_class_f1(preds, corpus, svdict, coref).items()):
    print(f"  {cls:9s} {score:.3f}")
