"""Bundled example graphs."""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import List

from .graph import Graph, read_edge_list

# files whose vertex tokens start at 1
_ONE_INDEXED = {"karate.txt"}


def fixture_path(name: str) -> Path:
    path = Path(str(resources.files("mdcolgen") / "data" / name))
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture named {name!r}")
    return path


def load_fixture(name: str) -> Graph:
    if not name.endswith(".txt"):
        name += ".txt"
    return read_edge_list(fixture_path(name), one_indexed=name in _ONE_INDEXED)


def fixture_names() -> List[str]:
    return sorted(p.name for p in fixture_path("bench.json").parent.glob("*.txt"))
