import os
from typing import List, Tuple

import pytest

from c_utils import make_rng
from GEOM.representation import FNCoords
from WORDS.family import eta, gamma0
from WORDS.words import CurveWord, parse_word

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def load_word_corpus() -> List[Tuple[CurveWord, int, bool]]:
    """tests/data/word_corpus.txt: "слово | i(w,w) | filling", род 2."""
    out = []
    with open(os.path.join(DATA_DIR, "word_corpus.txt"), encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, count, filling = (part.strip() for part in line.split("|"))
            out.append((parse_word(word, genus=2), int(count), filling == "1"))
    return out


@pytest.fixture(scope="session")
def word_corpus():
    return load_word_corpus()


@pytest.fixture
def g2_gamma0() -> CurveWord:
    return gamma0(2)


@pytest.fixture
def g2_eta() -> CurveWord:
    return eta(2)


@pytest.fixture
def rng():
    return make_rng(2024)


@pytest.fixture
def thick_g2() -> FNCoords:
    return FNCoords(2, (0.8, 1.9, 2.3), (0.3, 0.7, -0.4))


@pytest.fixture
def thin_eta_g2() -> FNCoords:
    return FNCoords(2, (0.05, 2.0, 2.0), (0.0, 0.5, 0.5))


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "out"
    path.mkdir()
    return str(path)
