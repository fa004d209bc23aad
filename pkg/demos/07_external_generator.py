"""Talk to an external generator over the newline-delimited JSON protocol.

Spawns a tiny inline generator as a child process; a real neural server
(see the neural/ package) speaks exactly the same protocol.
"""

import sys
import tempfile
from pathlib import Path

from actforge.corpus import ActItem, UserAct
from actforge.genbridge import GenRequest, request_external

STUB = r'''
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    values = ", ".join(it["value"] for it in req["act"])
    cands = [f"candidate {i}: i would like {values}" for i in range(req["beam_size"])]
    print(json.dumps({"id": req["id"], "candidates": cands}), flush=True)
'''

with tempfile.NamedTemporaryFile("w", suffix=".py", delete=False) as fh:
    fh.write(STUB)
    stub_path = Path(fh.name)

req = GenRequest(
    id=1,
    history=(("", "i need a hotel"),),
    system_utterance="what area would you like?",
    act=UserAct((ActItem("reply", "hotel-area", "north"),)),
    beam_size=3,
)
candidates = request_external(f"cmd:{sys.executable} {stub_path}", req)
for cand in candidates:
    print("-", cand)
stub_path.unlink()
