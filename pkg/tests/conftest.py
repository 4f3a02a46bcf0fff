import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


# Reference replay rows for the 3-qubit, two-marked-item run under sk = (111, 111):
# (simulation result, keys for q2, q1, q0, decrypted result)
REFERENCE_ROWS = [
    ("00101000010010001", (0, 1), (1, 1), (0, 1), "011"),
    ("00110111010111100", (0, 1), (0, 0), (1, 0), "101"),
    ("01000000110110111", (0, 0), (1, 0), (0, 1), "101"),
    ("01001001001011010", (0, 0), (0, 0), (1, 0), "011"),
    ("01011110010010010", (0, 0), (0, 1), (1, 1), "011"),
    ("01101101101101011", (0, 1), (0, 1), (0, 0), "011"),
    ("10000010010001100", (1, 0), (1, 0), (1, 1), "011"),
    ("10101101111001111", (1, 1), (0, 0), (0, 0), "011"),
    ("10110110010110011", (0, 1), (0, 1), (0, 0), "011"),
    ("10111001100000011", (1, 1), (1, 0), (0, 1), "101"),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
