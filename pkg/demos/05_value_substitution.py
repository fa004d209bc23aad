"""The value-substitution baseline: swap span values in place."""

from actforge import bundled_dictionary, bundled_mini_corpus
from actforge.actgen import turn_rng
from actforge.augment import value_substitution

svdict = bundled_dictionary()
corpus = bundled_mini_corpus()

for dialogue in corpus:
    for turn in dialogue.turns:
        rng = turn_rng(7, dialogue.id, turn.turn_id)
        result = value_substitution(turn, svdict, rng)
        if result is None:
            continue
        new_turn, subs = result
        print(f"{dialogue.id} turn {turn.turn_id}")
        print(f"  before: {turn.user_utterance}")
        print(f"  after : {new_turn.user_utterance}")
        for slot, old, new in subs:
            print(f"  swap  : {slot}: {old} -> {new}")
        print()
