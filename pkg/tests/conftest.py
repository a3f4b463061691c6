"""Shared fixtures: the three worked data over the projective line."""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.gkz_core import assemble_system

HALF = Fraction(-1, 2)

EXAMPLE_WEIGHTS = {
    1: [[0], [1], [-1]],
    2: [[0], [1], [2], [-1]],
    3: [[0], [1], [2], [-1], [-2]],
}


def example_system(index: int):
    return assemble_system(1, 1, [EXAMPLE_WEIGHTS[index]], [HALF])


def example_problem(index: int) -> dict:
    return {"r": 1, "n": 1, "weights": [EXAMPLE_WEIGHTS[index]], "beta": ["-1/2"]}


@pytest.fixture
def example1():
    return example_system(1)


@pytest.fixture
def example2():
    return example_system(2)


@pytest.fixture
def example3():
    return example_system(3)
