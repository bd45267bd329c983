from __future__ import annotations

import itertools

import pytest

from termflow.corpus import DocumentRecord, ingest


_counter = itertools.count()


def make_doc(discipline: str, year: int, text: str, title: str = "") -> DocumentRecord:
    return DocumentRecord(
        id=f"doc{next(_counter):06d}",
        discipline=discipline,
        year=year,
        title=title,
        abstract=text,
    )


@pytest.fixture
def small_index():
    """Two disciplines, two bins, a handful of hand-checkable documents."""
    records = [
        make_doc("math", 1974, "chaos theory and strange attractors"),
        make_doc("math", 1975, "chaos chaos chaos everywhere"),
        make_doc("math", 1976, "fixed point theorems"),
        make_doc("math", 1977, "nonlinear chaos dynamics"),
        make_doc("education", 1974, "classroom management practice"),
        make_doc("education", 1976, "chaos in the classroom"),
    ]
    return ingest(records, bin_width=2)
