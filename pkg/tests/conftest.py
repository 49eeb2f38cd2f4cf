from __future__ import annotations

from pathlib import Path

import pytest

from onco_rewriter.model import load_model, load_thesaurus
from onco_rewriter.pipeline import prepare_context

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

CABIO_QUERY = (
    "Single_Nucleotide_Polymorphism and hasAssociation some "
    '(Gene and hasAttribute some (Gene_Symbol and hasValue value "TGFB1"))'
)


@pytest.fixture(scope="session")
def cabio_model():
    return load_model((FIXTURES / "cabio_fragment.model.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def ncit_thesaurus():
    return load_thesaurus((FIXTURES / "ncit_fragment.thesaurus.txt").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def cabio_context(cabio_model, ncit_thesaurus):
    return prepare_context(cabio_model, ncit_thesaurus)


@pytest.fixture(scope="session")
def biobank_model():
    return load_model((FIXTURES / "biobank.model.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def biobank_thesaurus():
    return load_thesaurus((FIXTURES / "biobank.thesaurus.txt").read_text(encoding="utf-8"))
