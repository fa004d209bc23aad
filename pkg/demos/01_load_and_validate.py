"""Load the bundled data files and check corpus invariants."""

from actforge import (
    bundled_coref_list,
    bundled_dictionary,
    bundled_mini_corpus,
    validate_corpus,
)

svdict = bundled_dictionary()
coref = bundled_coref_list()
corpus = bundled_mini_corpus()

print(f"dictionary: {len(svdict.entries)} slots, booleans = {sorted(svdict.boolean_slots)}")
print("hotel-type values:", svdict.values_for("hotel-type"))
print("taxi-arrive can refer to:", [p.referred for p in coref.pairs_for("taxi-arrive")])
print()

print(f"corpus: {len(corpus.dialogues)} dialogues, {corpus.num_turns()} turns")
for dialogue in corpus:
    first = dialogue.turns[0]
    print(f"  {dialogue.id}: {len(dialogue.turns)} turns, opens with {first.user_utterance!r}")
print()

violations = validate_corpus(corpus, svdict, coref)
print("violations:", violations or "none")

# break an invariant on purpose: belief state must contain every act value
broken = bundled_mini_corpus()
broken.dialogues[0].turns[0].belief_state.pop("restaurant-food")
for violation in validate_corpus(broken, svdict, coref):
    print("planted violation ->", violation)
