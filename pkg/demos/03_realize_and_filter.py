"""Realize an act as candidate utterances and run the state-match filter."""

import numpy as np

from actforge import bundled_coref_list, bundled_dictionary
from actforge.actgen import TurnContext
from actforge.corpus import ActItem, UserAct
from actforge.filtering import FilterDeps, check_consistency, filter_candidates, gate_rule
from actforge.genbridge import PhraseLexicon, realize_template

svdict = bundled_dictionary()
coref = bundled_coref_list()
lexicon = PhraseLexicon.default_for(svdict, coref)
ctx = TurnContext(system_utterance="do you need parking?", system_acts=[],
                  history=[], prior_state={"restaurant-time": "17:26"})

act = UserAct((
    ActItem("reply", "hotel-parking", "no"),
    ActItem("inform", "hotel-area", "dontcare"),
    ActItem("inform", "taxi-arrive", "17:26", refer="restaurant-time"),
))

candidates = realize_template(act, ctx, lexicon, np.random.default_rng(3), beam_size=4)
print("template candidates:")
for cand in candidates:
    print("  -", cand)

accepted, attempts = filter_candidates(candidates, ctx, act, FilterDeps(svdict, coref, lexicon))
print(f"\naccepted after {attempts} attempt(s): {accepted!r}")

# hand-written candidates show what the filter rejects and why
print("\nfilter on hand-written utterances:")
for text in (
    "no parking needed. any area works. arrive by the time of my reservation.",
    "i need free parking",           # gate mismatch: act says no
    "no parking needed",             # missing the other two slots
):
    verdict = check_consistency(ctx.system_utterance, text, act, svdict, coref)
    print(f"  {text!r} -> passed={verdict.passed} failures={verdict.failures}")

# the slot gates behind the boolean/dontcare decisions
print("\nslot gates:")
for utterance, slot in (
    ("i need free parking", "hotel-parking"),
    ("i don't care about parking", "hotel-parking"),
    ("any area is fine", "hotel-area"),
    ("somewhere in the north", "hotel-area"),
):
    print(f"  {utterance!r} / {slot} -> {gate_rule('', utterance, slot, svdict, coref)}")
