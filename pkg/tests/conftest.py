import os
import sys
from pathlib import Path

import pytest

from nesclust.graph import Graph

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(os.environ.get("NESCLUST_DATA_DIR", Path(__file__).resolve().parents[1] / "data"))

# SNAP file names; gzipped copies are not read, unpack them first
DATASETS = {
    "ca-grqc": "ca-GrQc.txt",
    "ego-facebook": "facebook_combined.txt",
    "brightkite": "loc-brightkite_edges.txt",
}

ACCEPTANCE_LINES = []


def record(criterion, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def dataset_path(key):
    return DATA_DIR / DATASETS[key]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


K3 = [(0, 1), (1, 2), (0, 2)]
P3 = [(0, 1), (1, 2)]
K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
DIAMOND = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
PAW = [(0, 1), (0, 2), (1, 2), (2, 3)]


@pytest.fixture
def k3():
    return Graph.from_edges(K3)


@pytest.fixture
def p3():
    return Graph.from_edges(P3)


@pytest.fixture
def k4():
    return Graph.from_edges(K4)


@pytest.fixture
def diamond():
    return Graph.from_edges(DIAMOND)


def write_edges(path, pairs, header="# test graph\n"):
    path.write_text(header + "".join(f"{u}\t{v}\n" for u, v in pairs))
    return path
