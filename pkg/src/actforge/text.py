"""Text normalization, tokenization and keyword tables shared by realization and filtering.

All matching in the toolkit happens on normalized text: lowercase, whitespace
collapsed, terminal punctuation stripped. Values are matched with word
boundaries so "2" does not hit inside "20"; phrases are matched as token
subsequences within a sentence.
"""

from __future__ import annotations

import re

_WS = re.compile(r"\s+")
_SENT_SPLIT = re.compile(r"[.!?;]+")
_TOKEN_TRIM = re.compile(r"^\W+|[^\w']+$")

# Phrases that signal a dontcare value. "don't care" etc. are matched as token
# sequences, "any" as a single token, never as raw substrings.
DONTCARE_PHRASES = (
    "dontcare",
    "don't care",
    "do not care",
    "doesn't matter",
    "any",
    "anything is fine",
)

# Negation tokens for the boolean "no" rule (negator within NEGATION_WINDOW
# tokens before the slot keyword).
NEGATORS = ("no", "not", "don't", "dont", "never", "without", "doesn't", "won't", "can't", "cannot")
NEGATION_WINDOW = 3

# Keyword tokens per slot suffix; a slot is considered mentioned when one of
# its keywords occurs as a token. Suffixes not listed fall back to themselves.
SLOT_KEYWORDS = {
    "internet": ("internet", "wifi"),
    "parking": ("parking",),
    "area": ("area",),
    "price": ("price", "priced"),
    "day": ("day",),
    "people": ("people",),
    "stay": ("stay", "nights"),
    "stars": ("star", "stars"),
    "name": ("name",),
    "type": ("type", "kind"),
    "food": ("food", "cuisine"),
    "time": ("time",),
    "arrive": ("arrive", "arrival"),
    "leave": ("leave", "leaving"),
    "depart": ("depart", "departure"),
    "dest": ("destination",),
}


def normalize(text: str) -> str:
    """Lowercase, collapse whitespace, strip terminal punctuation."""
    out = _WS.sub(" ", text.lower()).strip()
    return out.rstrip(".!?,;: ")


def sentences(text: str) -> list[str]:
    """Split normalized text into sentences on . ! ? ; boundaries."""
    return [s.strip() for s in _SENT_SPLIT.split(normalize(text)) if s.strip()]


def tokenize(text: str) -> list[str]:
    """Whitespace tokens with surrounding punctuation trimmed (inner apostrophes kept)."""
    toks = []
    for raw in text.split():
        tok = _TOKEN_TRIM.sub("", raw)
        if tok:
            toks.append(tok)
    return toks


def contains_value(text: str, value: str) -> bool:
    """True when `value` occurs in `text` on word boundaries, after normalization."""
    needle = normalize(value)
    if not needle:
        return False
    pattern = r"(?<!\w)" + re.escape(needle) + r"(?!\w)"
    return re.search(pattern, normalize(text)) is not None


def replace_value(text: str, old: str, new: str) -> str:
    """Replace every word-boundary occurrence of `old` with `new` (case-insensitive)."""
    pattern = r"(?<!\w)" + re.escape(old) + r"(?!\w)"
    return re.sub(pattern, new, text, flags=re.IGNORECASE)


def keywords_for(slot: str) -> tuple[str, ...]:
    """Keyword tokens for a canonical "domain-slot" name."""
    suffix = slot.split("-", 1)[-1]
    return SLOT_KEYWORDS.get(suffix, (suffix,))


def _phrase_in_tokens(tokens: list[str], phrase: str) -> bool:
    want = phrase.split()
    n = len(want)
    return any(tokens[i : i + n] == want for i in range(len(tokens) - n + 1))


def has_dontcare_phrase(sentence: str) -> bool:
    toks = tokenize(sentence)
    return any(_phrase_in_tokens(toks, p) for p in DONTCARE_PHRASES)


def keyword_position(sentence: str, slot: str) -> int | None:
    """Index of the first keyword token of `slot` in the sentence, or None."""
    toks = tokenize(sentence)
    keys = keywords_for(slot)
    for i, tok in enumerate(toks):
        if tok in keys:
            return i
    return None


def keyword_negated(sentence: str, slot: str) -> bool:
    """True when a negator occurs within NEGATION_WINDOW tokens before a keyword of `slot`."""
    toks = tokenize(sentence)
    keys = keywords_for(slot)
    for i, tok in enumerate(toks):
        if tok in keys:
            window = toks[max(0, i - NEGATION_WINDOW) : i]
            if any(w in NEGATORS for w in window):
                return True
    return False
