from pathlib import Path

import pytest

from fordc import check_module, parse

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


def corpus_text(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


def load(name: str):
    """Parse a corpus module."""
    return parse(corpus_text(name))


def load_checked(name: str):
    """Parse and check a corpus module: (module, signature)."""
    m = load(name)
    return m, check_module(m)
