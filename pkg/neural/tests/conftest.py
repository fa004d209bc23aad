import json
import select
import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
DICT_PATH = REPO_ROOT / "src" / "actforge" / "data" / "slot_value_dictionary.json"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def dict_path():
    assert DICT_PATH.exists()
    return str(DICT_PATH)


@pytest.fixture(scope="session")
def synth_corpus_path(tmp_path_factory, dict_path):
    from actforge_neural.synth import build_synthetic_corpus

    corpus = build_synthetic_corpus(dict_path, dialogues=25, turns=4, seed=3)
    path = tmp_path_factory.mktemp("data") / "synth.json"
    path.write_text(json.dumps(corpus), encoding="utf-8")
    return str(path)


class StdioServer:
    """Drive a protocol server subprocess line by line."""

    def __init__(self, module: str, *args: str):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", module, *args],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def ask(self, line: str, timeout: float = 60.0) -> dict:
        assert self.proc.poll() is None, "server exited"
        self.proc.stdin.write(line.rstrip("\n") + "\n")
        self.proc.stdin.flush()
        ready, _, _ = select.select([self.proc.stdout], [], [], timeout)
        assert ready, "server did not answer in time"
        return json.loads(self.proc.stdout.readline())

    def close(self):
        try:
            self.proc.stdin.close()
            self.proc.wait(timeout=5)
        except Exception:
            self.proc.kill()


@pytest.fixture(scope="module")
def gen_server(dict_path):
    server = StdioServer(
        "actforge_neural.gen_server", "--untrained", "--dict", dict_path, "--stdio"
    )
    yield server
    server.close()


@pytest.fixture(scope="module")
def filter_server(dict_path):
    server = StdioServer(
        "actforge_neural.filter_server", "--untrained", "--dict", dict_path, "--stdio"
    )
    yield server
    server.close()


def golden_lines(name: str) -> list[str]:
    return (GOLDEN / name).read_text(encoding="utf-8").splitlines()
