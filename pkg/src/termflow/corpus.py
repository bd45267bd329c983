"""Corpus ingestion and the per-discipline, time-binned term index.

Documents are bibliographic records (id, discipline, year, title, abstract).
All counting is binary per document: a term occurring once or ten times in
the same title+abstract counts as one document. The index built here is
immutable; everything downstream is a pure read.
"""

from __future__ import annotations

import csv
import json
import re
import sys
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import TermflowError


class MalformedRecord(TermflowError):
    pass


class DuplicateId(TermflowError):
    pass


class UnknownDiscipline(TermflowError):
    pass


class UnknownBin(TermflowError):
    pass


RECORD_FIELDS = ("id", "discipline", "year", "title", "abstract")
YEAR_MIN = 1000
YEAR_MAX = 3000

# Runs of letters/digits; underscore is a separator like any other punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it on any non-alphanumeric character.

    Single-character tokens are dropped unless they are digits, so acronyms
    such as ADD or MBD survive while stray letters do not. No stemming is
    applied: discipline-specific term variants must stay distinct. Token
    order is preserved so phrase queries can check adjacency.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    return [t for t in tokens if len(t) > 1 or t.isdigit()]


@dataclass(frozen=True, order=True)
class TimeBin:
    """A half-open slice of the year axis: [start_year, start_year + width)."""

    start_year: int
    width_years: int = 2

    def __post_init__(self) -> None:
        if self.width_years < 1:
            raise ValueError("width_years must be >= 1")

    @property
    def end_year(self) -> int:
        """Last calendar year covered by this bin (inclusive)."""
        return self.start_year + self.width_years - 1

    def contains(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year


@dataclass(frozen=True)
class DocumentRecord:
    """One bibliographic item; title/abstract may be empty strings."""

    id: str
    discipline: str
    year: int
    title: str
    abstract: str


@dataclass(frozen=True)
class TermQuery:
    """A phrase (adjacent token sequence) plus optional required co-terms.

    ``term`` of length one matches a single token; longer tuples must appear
    as adjacent tokens. Every token in ``required_coterms`` must also occur
    somewhere in the same document (title or abstract).
    """

    term: tuple[str, ...]
    required_coterms: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.term:
            raise ValueError("query term must have at least one token")
        for tok in list(self.term) + list(self.required_coterms):
            if tokenize(tok) != [tok]:
                raise ValueError(f"query token {tok!r} is not normalized")

    @classmethod
    def parse(cls, term_text: str, coterms: Iterable[str] = ()) -> "TermQuery":
        """Build a query from raw text, normalizing through the tokenizer."""
        term = tuple(tokenize(term_text))
        required = frozenset(t for c in coterms for t in tokenize(c))
        if not term:
            raise ValueError(f"no tokens survive normalization of {term_text!r}")
        return cls(term=term, required_coterms=required)

    def label(self) -> str:
        """Stable human-readable form, e.g. ``cold fusion+attention``."""
        base = " ".join(self.term)
        if self.required_coterms:
            base += "+" + "+".join(sorted(self.required_coterms))
        return base


Cell = tuple[str, int]  # (discipline, bin start year)


@dataclass(frozen=True)
class CorpusIndex:
    """Immutable per-discipline, per-time-bin term occurrence index.

    ``postings`` maps each term to the number of distinct documents
    containing it per cell; ``doc_counts`` holds the total documents per
    cell. Per-document token sequences are retained so phrase and co-term
    queries can be evaluated after the build.
    """

    bin_width: int
    anchor_offset: int
    disciplines: tuple[str, ...]
    bins: tuple[TimeBin, ...]
    doc_counts: Mapping[Cell, int]
    postings: Mapping[str, Mapping[Cell, int]]
    discipline_totals: Mapping[str, int]
    n_documents: int
    doc_ids: frozenset = field(repr=False)
    cell_tokens: Mapping[Cell, tuple[tuple[str, ...], ...]] = field(
        repr=False, compare=False
    )

    def bin_start_for_year(self, year: int) -> int:
        return year - ((year - self.anchor_offset) % self.bin_width)

    def bin_for_year(self, year: int) -> TimeBin:
        return TimeBin(self.bin_start_for_year(year), self.bin_width)

    def bin_starts(self) -> tuple[int, ...]:
        return tuple(b.start_year for b in self.bins)

    def doc_count(self, discipline: str, time_bin: Union[TimeBin, int]) -> int:
        return self.doc_counts.get((discipline, _bin_start(time_bin)), 0)

    def vocabulary(self) -> Iterator[str]:
        return iter(self.postings)


def _bin_start(time_bin: Union[TimeBin, int]) -> int:
    return time_bin.start_year if isinstance(time_bin, TimeBin) else int(time_bin)


def _validate_record(rec: DocumentRecord) -> None:
    if not isinstance(rec.id, str) or not rec.id:
        raise MalformedRecord(f"record id must be a non-empty string, got {rec.id!r}")
    if not isinstance(rec.discipline, str) or not rec.discipline.strip():
        raise MalformedRecord(f"record {rec.id!r} has an empty discipline")
    if isinstance(rec.year, bool) or not isinstance(rec.year, int):
        raise MalformedRecord(f"record {rec.id!r} has unparsable year {rec.year!r}")
    if not YEAR_MIN <= rec.year <= YEAR_MAX:
        raise MalformedRecord(
            f"record {rec.id!r} year {rec.year} outside [{YEAR_MIN}, {YEAR_MAX}]"
        )
    if not isinstance(rec.title, str) or not isinstance(rec.abstract, str):
        raise MalformedRecord(f"record {rec.id!r} title/abstract must be strings")


def ingest(
    records: Iterable[DocumentRecord],
    bin_width: int = 2,
    anchor_year: Optional[int] = None,
) -> CorpusIndex:
    """Build a :class:`CorpusIndex` from a stream of records.

    Bins anchor at the earliest ingested year rounded down to a multiple of
    ``bin_width`` unless ``anchor_year`` pins the grid explicitly. Duplicate
    ids are an error, not a silent overwrite.
    """
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")

    seen_ids: set[str] = set()
    staged: list[tuple[DocumentRecord, tuple[str, ...]]] = []
    canon: dict[str, str] = {}
    for rec in records:
        _validate_record(rec)
        if rec.id in seen_ids:
            raise DuplicateId(f"duplicate document id {rec.id!r}")
        seen_ids.add(rec.id)
        toks = tuple(
            canon.setdefault(t, t) for t in tokenize(rec.title + " " + rec.abstract)
        )
        staged.append((rec, toks))

    if not staged:
        return CorpusIndex(
            bin_width=bin_width,
            anchor_offset=(anchor_year % bin_width) if anchor_year is not None else 0,
            disciplines=(),
            bins=(),
            doc_counts={},
            postings={},
            discipline_totals={},
            n_documents=0,
            doc_ids=frozenset(),
            cell_tokens={},
        )

    min_year = min(rec.year for rec, _ in staged)
    anchor = anchor_year if anchor_year is not None else min_year - (min_year % bin_width)
    offset = anchor % bin_width

    doc_counts: dict[Cell, int] = {}
    postings: dict[str, dict[Cell, int]] = {}
    discipline_totals: dict[str, int] = {}
    cell_tokens: dict[Cell, list[tuple[str, ...]]] = {}

    for rec, toks in staged:
        start = rec.year - ((rec.year - offset) % bin_width)
        cell = (rec.discipline, start)
        doc_counts[cell] = doc_counts.get(cell, 0) + 1
        discipline_totals[rec.discipline] = discipline_totals.get(rec.discipline, 0) + 1
        cell_tokens.setdefault(cell, []).append(toks)
        for tok in set(toks):
            per_cell = postings.setdefault(tok, {})
            per_cell[cell] = per_cell.get(cell, 0) + 1

    starts = sorted({cell[1] for cell in doc_counts})
    bins = tuple(
        TimeBin(s, bin_width) for s in range(starts[0], starts[-1] + 1, bin_width)
    )
    return CorpusIndex(
        bin_width=bin_width,
        anchor_offset=offset,
        disciplines=tuple(sorted(discipline_totals)),
        bins=bins,
        doc_counts=doc_counts,
        postings=postings,
        discipline_totals=discipline_totals,
        n_documents=len(staged),
        doc_ids=frozenset(seen_ids),
        cell_tokens={cell: tuple(docs) for cell, docs in cell_tokens.items()},
    )


def merge_indexes(parts: Sequence[CorpusIndex]) -> CorpusIndex:
    """Merge partition indexes by cell-wise addition.

    Partitions must share the bin grid (width and anchor parity); document
    ids must be disjoint across partitions.
    """
    if not parts:
        raise ValueError("nothing to merge")
    widths = {p.bin_width for p in parts}
    offsets = {p.anchor_offset for p in parts if p.n_documents}
    if len(widths) > 1 or len(offsets) > 1:
        raise ValueError("partition indexes are on incompatible bin grids")

    merged_ids: set[str] = set()
    for p in parts:
        overlap = merged_ids & p.doc_ids
        if overlap:
            raise DuplicateId(f"duplicate document id {sorted(overlap)[0]!r} across partitions")
        merged_ids |= p.doc_ids

    doc_counts: dict[Cell, int] = {}
    postings: dict[str, dict[Cell, int]] = {}
    discipline_totals: dict[str, int] = {}
    cell_tokens: dict[Cell, list[tuple[str, ...]]] = {}
    for p in parts:
        for cell, count in p.doc_counts.items():
            doc_counts[cell] = doc_counts.get(cell, 0) + count
        for term, cells in p.postings.items():
            tgt = postings.setdefault(term, {})
            for cell, count in cells.items():
                tgt[cell] = tgt.get(cell, 0) + count
        for disc, total in p.discipline_totals.items():
            discipline_totals[disc] = discipline_totals.get(disc, 0) + total
        for cell, docs in p.cell_tokens.items():
            cell_tokens.setdefault(cell, []).extend(docs)

    width = widths.pop()
    offset = offsets.pop() if offsets else 0
    if not doc_counts:
        bins: tuple[TimeBin, ...] = ()
    else:
        starts = sorted({cell[1] for cell in doc_counts})
        bins = tuple(TimeBin(s, width) for s in range(starts[0], starts[-1] + 1, width))
    return CorpusIndex(
        bin_width=width,
        anchor_offset=offset,
        disciplines=tuple(sorted(discipline_totals)),
        bins=bins,
        doc_counts=doc_counts,
        postings=postings,
        discipline_totals=discipline_totals,
        n_documents=sum(p.n_documents for p in parts),
        doc_ids=frozenset(merged_ids),
        cell_tokens={cell: tuple(docs) for cell, docs in cell_tokens.items()},
    )


def _has_phrase(tokens: tuple[str, ...], phrase: tuple[str, ...]) -> bool:
    n = len(phrase)
    if n == 1:
        return phrase[0] in tokens
    for i in range(len(tokens) - n + 1):
        if tokens[i : i + n] == phrase:
            return True
    return False


def count_matches(
    index: CorpusIndex,
    query: TermQuery,
    discipline: str,
    time_bin: Union[TimeBin, int],
) -> int:
    """Number of distinct documents in (discipline, bin) matching ``query``."""
    if discipline not in index.discipline_totals:
        raise UnknownDiscipline(f"unknown discipline {discipline!r}")
    start = _bin_start(time_bin)
    if not any(b.start_year == start for b in index.bins):
        raise UnknownBin(f"no bin starting at year {start}")
    cell = (discipline, start)

    if len(query.term) == 1 and not query.required_coterms:
        return index.postings.get(query.term[0], {}).get(cell, 0)

    count = 0
    for tokens in index.cell_tokens.get(cell, ()):
        token_set = set(tokens)
        if not query.required_coterms <= token_set:
            continue
        if not all(t in token_set for t in query.term):
            continue
        if _has_phrase(tokens, query.term):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Record I/O: JSON-lines and CSV with the same field names.
# ---------------------------------------------------------------------------


def _open_read(path: Union[str, IO[str]]):
    if hasattr(path, "read"):
        return path, False
    if path == "-":
        return sys.stdin, False
    return open(path, "r", encoding="utf-8"), True


def _record_from_mapping(obj: Mapping, where: str) -> DocumentRecord:
    if set(obj) != set(RECORD_FIELDS):
        raise MalformedRecord(
            f"{where}: expected exactly the fields {', '.join(RECORD_FIELDS)}"
        )
    return DocumentRecord(
        id=obj["id"],
        discipline=obj["discipline"],
        year=obj["year"],
        title=obj["title"],
        abstract=obj["abstract"],
    )


def read_jsonl_records(path: Union[str, IO[str]]) -> Iterator[DocumentRecord]:
    """Yield records from a JSON-lines file (one object per line)."""
    handle, owned = _open_read(path)
    try:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"line {lineno}: invalid JSON ({exc})") from exc
            if not isinstance(obj, dict):
                raise MalformedRecord(f"line {lineno}: expected a JSON object")
            rec = _record_from_mapping(obj, f"line {lineno}")
            _validate_record(rec)
            yield rec
    finally:
        if owned:
            handle.close()


def read_csv_records(path: Union[str, IO[str]]) -> Iterator[DocumentRecord]:
    """Yield records from a CSV file with header id,discipline,year,title,abstract."""
    handle, owned = _open_read(path)
    try:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or set(reader.fieldnames) != set(RECORD_FIELDS):
            raise MalformedRecord(
                f"CSV header must be exactly {', '.join(RECORD_FIELDS)}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                year = int(row["year"])
            except (TypeError, ValueError) as exc:
                raise MalformedRecord(
                    f"line {lineno}: unparsable year {row.get('year')!r}"
                ) from exc
            rec = DocumentRecord(
                id=row["id"],
                discipline=row["discipline"],
                year=year,
                title=row["title"] or "",
                abstract=row["abstract"] or "",
            )
            _validate_record(rec)
            yield rec
    finally:
        if owned:
            handle.close()


def write_jsonl_records(records: Iterable[DocumentRecord], handle: IO[str]) -> None:
    for rec in records:
        handle.write(
            json.dumps(
                {
                    "id": rec.id,
                    "discipline": rec.discipline,
                    "year": rec.year,
                    "title": rec.title,
                    "abstract": rec.abstract,
                },
                sort_keys=True,
            )
        )
        handle.write("\n")
