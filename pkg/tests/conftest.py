import sys
from pathlib import Path

import pytest
from dotenv import load_dotenv

load_dotenv()

# Ensure repo root is importable when running pytest directly.
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from services import graph_core


@pytest.fixture()
def p3():
    return graph_core.path(3)


@pytest.fixture()
def p4():
    return graph_core.path(4)


@pytest.fixture()
def c4():
    return graph_core.cycle(4)


@pytest.fixture()
def edgelist_file(tmp_path):
    def _write(text: str, name: str = "graph.txt") -> Path:
        target = tmp_path / name
        target.write_text(text, encoding="utf-8")
        return target

    return _write
