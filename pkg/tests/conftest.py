from pathlib import Path

import pytest

from punctstat.tokenizer import load_lexicon

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def zh_lexicon():
    return load_lexicon(FIXTURES / "zh_lexicon.txt")
