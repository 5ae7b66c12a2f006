"""Shared fixtures: bundled example matrices and random corpora."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from maxplus import NEG_INF, TropicalMatrix, max_cycle_mean, scc_decompose
from maxplus.cli import parse_matrix, parse_vector

DATA = Path(__file__).parent / "data"


def load_matrix(name: str) -> TropicalMatrix:
    return parse_matrix((DATA / name).read_text())


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def ex1() -> TropicalMatrix:
    return load_matrix("example1.txt")


@pytest.fixture(scope="session")
def ex2() -> TropicalMatrix:
    return load_matrix("example2.txt")


@pytest.fixture(scope="session")
def ex3a() -> TropicalMatrix:
    return load_matrix("example3a.txt")


@pytest.fixture(scope="session")
def ex3b() -> TropicalMatrix:
    return load_matrix("example3b.txt")


@pytest.fixture(scope="session")
def ex3x() -> np.ndarray:
    return parse_vector((DATA / "example3x.txt").read_text())


# -------------------------------------------------------- random corpora

def random_matrix(rng, n: int, lo: int = -9, hi: int = 3,
                  density: float = 0.5) -> TropicalMatrix:
    """Integer weights in [lo, hi], each entry finite with the given
    probability and -inf otherwise."""
    vals = rng.integers(lo, hi + 1, size=(n, n)).astype(float)
    mask = rng.random((n, n)) < density
    return TropicalMatrix(np.where(mask, vals, NEG_INF), copy=False)


def has_cycle(a: TropicalMatrix) -> bool:
    return bool(scc_decompose(a).nontrivial())


def random_cyclic(rng, n: int, **kw) -> TropicalMatrix:
    while True:
        m = random_matrix(rng, n, **kw)
        if has_cycle(m):
            return m


def random_definite(rng, n: int, **kw) -> TropicalMatrix:
    m = random_cyclic(rng, n, **kw)
    return m.scale(-max_cycle_mean(m))


# ------------------------------------------------- acceptance reporting

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion in the final summary."""
    lines = {}
    for key, word in (("passed", "PASS"), ("failed", "FAIL"),
                      ("error", "FAIL"), ("skipped", "SKIP")):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if not name.startswith("test_criterion_"):
                continue
            num, _, rest = name[len("test_criterion_"):].partition("_")
            lines[int(num)] = (rest.replace("_", " "), word)
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for num in sorted(lines):
            rest, word = lines[num]
            terminalreporter.write_line(
                "criterion %d (%s): %s" % (num, rest, word))
