import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import flatbrowse as fb
from flatbrowse.analyses import ExternalFacts
from flatbrowse.catalog import default_registry
from flatbrowse.framework import AnalysisSession

CORPUS = Path(__file__).resolve().parents[1] / "corpus"
GOLDENS = Path(__file__).parent / "goldens"


@pytest.fixture
def corpus_store():
    return fb.open_project([CORPUS], "Example")


@pytest.fixture
def corpus_facts():
    return ExternalFacts.find([CORPUS])


@pytest.fixture
def corpus_session(corpus_store, corpus_facts):
    return AnalysisSession(corpus_store, default_registry(corpus_facts))


@pytest.fixture
def example_prog(corpus_store):
    return corpus_store.program("Example")


@pytest.fixture
def full_corpus(corpus_store):
    return fb.ensure_full_closure(corpus_store)


def golden(name: str) -> str:
    return (GOLDENS / name).read_text(encoding="utf-8")


def qn(text: str) -> fb.QName:
    module, name = text.rsplit(".", 1)
    return fb.QName(module, name)
