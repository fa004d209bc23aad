"""Conditioning text for the generator: history, system utterance, linearized act.

The act serialization is `act_type(slot=value[, refer=slot])` entries joined
by ";" so checkpoints trained elsewhere stay interchangeable.
"""

from __future__ import annotations


def linearize_act(act_items: list[dict]) -> str:
    parts = []
    for item in act_items:
        inner = f"{item['slot']}={item['value']}"
        if item.get("refer"):
            inner += f", refer={item['refer']}"
        parts.append(f"{item['act_type']}({inner})")
    return ";".join(parts)


def build_source(history, system_utterance: str, act_items: list[dict]) -> str:
    chunks = []
    for sys_utt, usr_utt in history:
        chunks.append(sys_utt or "")
        chunks.append(usr_utt or "")
    chunks.append(system_utterance or "")
    chunks.append("act: " + linearize_act(act_items))
    return " | ".join(chunks)
