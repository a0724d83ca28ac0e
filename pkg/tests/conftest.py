from __future__ import annotations

import random
from pathlib import Path

import pytest

from gindex import ProgramDag, parse_dag
from gindex.flatland import FlatlandProgram, Loop, Move, Turn

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

NODE_TYPES = ["inject", "function", "switch", "debug"]
ATTR_KEYS = ["a", "b", "c", "d"]
ATTR_VALUES = [None, True, False, 0, 1, 2.5, "x", "y", [1, 2], {"k": 1}]


def random_dag(rng: random.Random, max_nodes: int = 10, edge_prob: float = 0.25) -> ProgramDag:
    """Random nonempty DAG over a small type/attribute pool; edges go forward."""
    n = rng.randint(1, max_nodes)
    vertices = []
    for _ in range(n):
        keys = rng.sample(ATTR_KEYS, rng.randint(0, len(ATTR_KEYS)))
        vertices.append((rng.choice(NODE_TYPES), {k: rng.choice(ATTR_VALUES) for k in keys}))
    edges = {
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < edge_prob
    }
    return ProgramDag(vertices=tuple(vertices), edges=frozenset(edges))


_MOVE_POOL = (5.0, 10.0, 15.0, 20.0)
_TURN_POOL = (30.0, 45.0, 90.0, 120.0)


def random_flatland_program(rng: random.Random, max_items: int = 6, depth: int = 0) -> FlatlandProgram:
    items: list = []
    for _ in range(rng.randint(1, max_items)):
        kind = rng.random()
        if kind < 0.4:
            items.append(Move(rng.choice(_MOVE_POOL)))
        elif kind < 0.8 or depth >= 2:
            items.append(Turn(rng.choice(_TURN_POOL)))
        else:
            body = random_flatland_program(rng, max_items=3, depth=depth + 1).items
            items.append(Loop(rng.randint(1, 3), body))
    return FlatlandProgram(tuple(items))


@pytest.fixture(scope="session")
def corpus_paths() -> list[Path]:
    paths = sorted((FIXTURES / "corpus").glob("**/*.json"))
    assert len(paths) == 35, "bundled corpus should hold 7 domains x 5 programs"
    return paths


@pytest.fixture(scope="session")
def corpus_dags(corpus_paths) -> list[ProgramDag]:
    return [parse_dag(p.read_text(encoding="utf-8")) for p in corpus_paths]


@pytest.fixture(scope="session")
def corpus_domains(corpus_paths) -> list[str]:
    return [p.parent.name for p in corpus_paths]
