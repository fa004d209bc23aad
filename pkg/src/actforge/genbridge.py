"""Realize user acts as candidate utterances.

Two generators share one interface: a deterministic template realizer whose
output passes the state-match filter by construction, and a client for an
external neural generator speaking newline-delimited JSON over a child
process's stdio or a TCP socket.
"""

from __future__ import annotations

import json
import select
import shlex
import socket
import subprocess
import threading
from dataclasses import dataclass, field

import numpy as np

from .corpus import ActItem, CorefList, SlotValueDict, UserAct
from .text import keywords_for

DEFAULT_TIMEOUT = 30.0

# Candidate utterances, best-first.
CandidateSet = list[str]

# Clause templates per value kind; {p} is the slot phrase, {v} the value,
# {np} the affirmative noun phrase, {kw} the keyword, {ph} the coref phrase
# with its article already attached.
_SPAN_TEMPLATES = (
    "the {p} should be {v}",
    "i would like {v} for the {p}",
    "{v} for the {p}, please",
    "i want the {p} to be {v}",
)
_REFER_TEMPLATES = (
    "the {p} should be {ph}",
    "i want {ph} for the {p}",
)
_YES_TEMPLATES = (
    "i need {np}",
    "the place should have {np}",
    "it must come with {np}",
)
_NO_TEMPLATES = (
    "i do not need {kw}",
    "no {kw} needed",
    "it should not have {kw}",
)
_DONTCARE_TEMPLATES = (
    "i don't care about the {p}",
    "any {p} is fine",
    "the {p} doesn't matter",
)
_ACCEPT_PREFIXES = ("yes, that sounds good", "yes, that works for me", "yes, perfect")
_CONNECTIVES = ("", "also, ", "and ", "in addition, ")
_EMPTY_ACT_LINES = (
    "ok, thank you.",
    "that works for me, thanks.",
    "sounds good, thank you.",
    "great, thanks for the help.",
    "thank you so much.",
)

_PHRASE_BY_SUFFIX = {
    "internet": "internet at the {d}",
    "parking": "parking at the {d}",
    "type": "type of {d}",
    "price": "price range of the {d}",
    "day": "day of the {d} booking",
    "people": "number of people for the {d}",
    "stay": "length of stay at the {d}",
    "area": "area of the {d}",
    "stars": "star rating of the {d}",
    "name": "name of the {d}",
    "food": "type of food",
    "time": "time of the {d} booking",
    "arrive": "arrival time of the {d}",
    "leave": "leaving time of the {d}",
    "depart": "departure place of the {d}",
    "dest": "destination of the {d}",
}
_BOOL_YES_PHRASES = {"parking": "free parking", "internet": "free internet"}


class LexiconError(KeyError):
    pass


class ProtocolError(RuntimeError):
    pass


@dataclass
class PhraseLexicon:
    """Surface phrases used by the template realizer and the appearance check."""

    slot_phrase: dict[str, str]
    bool_yes: dict[str, str]
    coref_phrases: dict[tuple[str, str], tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def default_for(cls, svdict: SlotValueDict, coref: CorefList | None = None) -> "PhraseLexicon":
        """Build a lexicon covering every dictionary slot (and coref pair)."""
        slot_phrase = {}
        bool_yes = {}
        for slot in svdict.entries:
            domain, suffix = slot.split("-", 1)
            template = _PHRASE_BY_SUFFIX.get(suffix, "{d} " + suffix)
            slot_phrase[slot] = template.format(d=domain)
            if svdict.is_boolean(slot):
                bool_yes[slot] = _BOOL_YES_PHRASES.get(suffix, keywords_for(slot)[0])
        pairs = {}
        if coref is not None:
            for slot, entry_pairs in coref.entries.items():
                for pair in entry_pairs:
                    pairs[(slot, pair.referred)] = pair.phrases
        return cls(slot_phrase=slot_phrase, bool_yes=bool_yes, coref_phrases=pairs)

    def phrase(self, slot: str) -> str:
        try:
            return self.slot_phrase[slot]
        except KeyError:
            raise LexiconError(f"lexicon has no phrase for slot {slot}") from None


@dataclass(frozen=True)
class GenRequest:
    id: int
    history: tuple[tuple[str, str], ...]
    system_utterance: str
    act: UserAct
    beam_size: int

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")


def act_to_wire(act: UserAct) -> list[dict]:
    return [
        {"act_type": it.act_type, "slot": it.slot, "value": it.value, "refer": it.refer}
        for it in act
    ]


def act_from_wire(raw: list[dict]) -> UserAct:
    return UserAct(
        tuple(ActItem(d["act_type"], d["slot"], d["value"], d.get("refer")) for d in raw)
    )


def encode_request(req: GenRequest) -> str:
    return json.dumps(
        {
            "id": req.id,
            "history": [list(pair) for pair in req.history],
            "system_utterance": req.system_utterance,
            "act": act_to_wire(req.act),
            "beam_size": req.beam_size,
        },
        ensure_ascii=False,
    )


def decode_request(line: str) -> GenRequest:
    raw = json.loads(line)
    return GenRequest(
        id=int(raw["id"]),
        history=tuple((h[0], h[1]) for h in raw.get("history", [])),
        system_utterance=raw.get("system_utterance", ""),
        act=act_from_wire(raw.get("act", [])),
        beam_size=int(raw.get("beam_size", 1)),
    )


def encode_response(request_id: int, candidates: list[str] | None, error: str | None = None) -> str:
    if error is not None:
        return json.dumps({"id": request_id, "error": error}, ensure_ascii=False)
    return json.dumps({"id": request_id, "candidates": list(candidates)}, ensure_ascii=False)


def decode_response(line: str, expect_id: int) -> list[str]:
    """Parse a generator response line, enforcing the protocol contract."""
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed response line: {exc}") from exc
    if raw.get("id") != expect_id:
        raise ProtocolError(f"response id {raw.get('id')!r} does not match request id {expect_id}")
    if "error" in raw:
        raise ProtocolError(f"generator error: {raw['error']}")
    candidates = raw.get("candidates")
    if not isinstance(candidates, list) or not candidates:
        raise ProtocolError("response carries no candidates")
    if any(not isinstance(c, str) or not c for c in candidates):
        raise ProtocolError("response contains empty or non-string candidates")
    return candidates


def _clause(item: ActItem, lexicon: PhraseLexicon, rng: np.random.Generator) -> str:
    def pick(options):
        return options[int(rng.integers(len(options)))]

    p = lexicon.phrase(item.slot)
    if item.refer is not None:
        phrases = lexicon.coref_phrases.get((item.slot, item.refer))
        if not phrases:
            raise LexiconError(f"lexicon has no coref phrases for ({item.slot} <- {item.refer})")
        ph = phrases[int(rng.integers(len(phrases)))]
        if not ph.startswith(("the ", "near ")):
            ph = "the " + ph
        return pick(_REFER_TEMPLATES).format(p=p, ph=ph)
    if item.value == "dontcare":
        return pick(_DONTCARE_TEMPLATES).format(p=p)
    if item.slot in lexicon.bool_yes and item.value in ("yes", "no"):
        if item.value == "yes":
            return pick(_YES_TEMPLATES).format(np=lexicon.bool_yes[item.slot])
        return pick(_NO_TEMPLATES).format(kw=keywords_for(item.slot)[0])
    return pick(_SPAN_TEMPLATES).format(p=p, v=item.value.lower())


def realize_template(
    act: UserAct,
    ctx,
    lexicon: PhraseLexicon,
    rng: np.random.Generator,
    beam_size: int,
) -> list[str]:
    """Deterministic surface realization: beam_size variants of the same act.

    Every non-refer value appears verbatim; refer items use one of their
    listed coreference phrases; variants differ in sentence order and
    connectives. Raises LexiconError when the lexicon misses a slot.
    """
    if beam_size < 1:
        raise ValueError("beam_size must be >= 1")
    if not len(act):
        return [_EMPTY_ACT_LINES[i % len(_EMPTY_ACT_LINES)] for i in range(beam_size)]

    groups = {"confirm": [], "reply": [], "inform": []}
    for item in act:
        groups[item.act_type].append(item)

    candidates = []
    for _ in range(beam_size):
        sents: list[str] = []
        confirm = groups["confirm"]
        if confirm:
            order = [confirm[i] for i in rng.permutation(len(confirm))]
            prefix = _ACCEPT_PREFIXES[int(rng.integers(len(_ACCEPT_PREFIXES)))]
            sents.append(f"{prefix}, {_clause(order[0], lexicon, rng)}")
            sents.extend(_clause(it, lexicon, rng) for it in order[1:])
        tail_groups = [groups["reply"], groups["inform"]]
        if rng.random() < 0.5:
            tail_groups.reverse()
        for group in tail_groups:
            order = [group[i] for i in rng.permutation(len(group))]
            sents.extend(_clause(it, lexicon, rng) for it in order)
        parts = []
        for i, sent in enumerate(sents):
            conn = "" if i == 0 else _CONNECTIVES[int(rng.integers(len(_CONNECTIVES)))]
            parts.append(f"{conn}{sent}.")
        candidates.append(" ".join(parts))
    return candidates


class JsonLinesClient:
    """Blocking newline-delimited JSON channel to `tcp:host:port` or `cmd:...`.

    One request in flight per connection; open several clients for
    concurrency. Close() terminates a spawned child process.
    """

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        self.endpoint = endpoint
        self.timeout = timeout
        self._lock = threading.Lock()
        self._proc = None
        self._sock = None
        try:
            if endpoint.startswith("tcp:"):
                _, host, port = endpoint.split(":", 2)
                self._sock = socket.create_connection((host, int(port)), timeout=timeout)
                self._reader = self._sock.makefile("r", encoding="utf-8")
            elif endpoint.startswith("cmd:"):
                self._proc = subprocess.Popen(
                    shlex.split(endpoint[4:]),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
                self._reader = self._proc.stdout
            else:
                raise ProtocolError(
                    f"unknown endpoint {endpoint!r}; use tcp:HOST:PORT or cmd:COMMAND"
                )
        except (OSError, ValueError) as exc:
            raise ProtocolError(f"cannot reach {endpoint}: {exc}") from exc

    def _write_line(self, line: str) -> None:
        if self._sock is not None:
            self._sock.sendall((line + "\n").encode("utf-8"))
        else:
            if self._proc.poll() is not None:
                raise ProtocolError(f"generator process at {self.endpoint} exited")
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()

    def _read_line(self) -> str:
        if self._sock is not None:
            try:
                line = self._reader.readline()
            except socket.timeout as exc:
                raise ProtocolError(
                    f"timeout after {self.timeout}s waiting on {self.endpoint}"
                ) from exc
        else:
            ready, _, _ = select.select([self._reader], [], [], self.timeout)
            if not ready:
                raise ProtocolError(f"timeout after {self.timeout}s waiting on {self.endpoint}")
            line = self._reader.readline()
        if not line:
            raise ProtocolError(f"connection to {self.endpoint} closed")
        return line

    def roundtrip(self, line: str) -> str:
        with self._lock:
            self._write_line(line)
            return self._read_line()

    def close(self) -> None:
        if self._sock is not None:
            self._sock.close()
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def request_external(endpoint: str, req: GenRequest, timeout: float = DEFAULT_TIMEOUT) -> list[str]:
    """One-shot candidate request against an external generator endpoint."""
    with JsonLinesClient(endpoint, timeout=timeout) as client:
        return decode_response(client.roundtrip(encode_request(req)), req.id)


class ExternalGenerator:
    """Persistent generator connection handing out sequential request ids."""

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        self._client = JsonLinesClient(endpoint, timeout=timeout)
        self._next_id = 0
        self._id_lock = threading.Lock()

    def generate(self, history, system_utterance: str, act: UserAct, beam_size: int) -> list[str]:
        with self._id_lock:
            self._next_id += 1
            rid = self._next_id
        req = GenRequest(
            id=rid,
            history=tuple(tuple(p) for p in history),
            system_utterance=system_utterance,
            act=act,
            beam_size=beam_size,
        )
        return decode_response(self._client.roundtrip(encode_request(req)), rid)

    def close(self) -> None:
        self._client.close()
