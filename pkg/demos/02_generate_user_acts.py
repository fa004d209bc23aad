"""Synthesize user dialogue acts under different probability settings."""

from actforge import AugConfig, TurnContext, bundled_coref_list, bundled_dictionary
from actforge.actgen import generate_user_act, turn_rng
from actforge.corpus import SystemAct

svdict = bundled_dictionary()
coref = bundled_coref_list()

# the system recommends a restaurant and asks for a time
ctx = TurnContext(
    system_utterance="pho bistro is great. what time should i book?",
    system_acts=[
        SystemAct("recommend", "restaurant-name", "pho bistro"),
        SystemAct("recommend", "restaurant-area", "centre"),
        SystemAct("request", "restaurant-time"),
    ],
    history=[("", "i need a restaurant")],
    prior_state={"restaurant-food": "taiwanese"},
    active_domain="restaurant",
)


def show(label, cfg, turn_id=0):
    rng = turn_rng(cfg.seed, "demo", turn_id)
    act, state = generate_user_act(ctx, svdict, coref, rng, cfg)
    print(f"--- {label}")
    for item in act:
        refer = f" (refers {item.refer})" if item.refer else ""
        print(f"  {item.act_type:8s} {item.slot} = {item.value}{refer}")
    print("  new state:", state)


# paper defaults: confirm 0.7, reply 0.9, domain 0.8, coref 0.6
for turn_id in range(3):
    show(f"defaults, turn seed {turn_id}", AugConfig(seed=11), turn_id)

# degenerate settings make the behavior exact
show("always confirm, nothing else",
     AugConfig(p_confirm=1, p_reply=0, p_coref=0, inform_count_weights=((0, 1.0),), seed=1))
show("never confirm, always reply",
     AugConfig(p_confirm=0, p_reply=1, p_coref=0, inform_count_weights=((0, 1.0),), seed=1))
show("inform three extra values",
     AugConfig(p_confirm=0, p_reply=0, p_coref=0, inform_count_weights=((3, 1.0),), seed=1))
