"""Precision/recall/F1 scoring against curated ground truth, plus the
tabular report writers.

Conventions that the report dynamics depend on: precision is 0 when
nothing was retrieved, F1 is 0 when precision and recall are both 0, and
displayed values round to two decimals with ties going to the even digit
(IEEE round-half-even, which is what ``format`` does to floats). CSV
exports keep full precision. A not-applicable (ontology, requirement)
pair renders as an en-dash in markdown and as empty CSV cells.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

from .matching import RetrievedSet
from .rdf import InvalidIriError, Iri

NOT_APPLICABLE_MARKER = "N/A"
DASH = "–"  # en-dash, the glyph the report uses for missing coverage


class GroundTruthError(ValueError):
    """Malformed or inconsistent ground-truth input."""


@dataclass(frozen=True)
class EvalRow:
    ontology: str
    requirement_id: str
    precision: float
    recall: float
    f1: float
    gt_count: int
    ext_count: int
    not_applicable: bool = False


@dataclass(frozen=True)
class GroundTruth:
    entries: dict  # (ontology, requirement_id) -> frozenset[Iri]
    not_applicable: frozenset  # of (ontology, requirement_id)

    def truth_for(self, ontology: str, requirement_id: str) -> frozenset[Iri] | None:
        return self.entries.get((ontology, requirement_id))

    def is_applicable(self, ontology: str, requirement_id: str) -> bool:
        return (ontology, requirement_id) in self.entries

    def is_marked_not_applicable(self, ontology: str, requirement_id: str) -> bool:
        return (ontology, requirement_id) in self.not_applicable

    def ontologies(self) -> list[str]:
        names = {o for o, _ in self.entries} | {o for o, _ in self.not_applicable}
        return sorted(names)


def score(retrieved: RetrievedSet, truth: Iterable[Iri], ontology: str = "") -> EvalRow:
    """Exact-IRI-match precision/recall/F1 for one retrieved set."""
    truth_set = frozenset(truth)
    if not truth_set:
        raise GroundTruthError("ground-truth set must be non-empty")
    retrieved_iris = set(retrieved.iris)
    hits = len(retrieved_iris & truth_set)
    ext = len(retrieved_iris)
    precision = hits / ext if ext else 0.0
    recall = hits / len(truth_set)
    f1 = 0.0 if precision + recall == 0.0 else 2 * precision * recall / (precision + recall)
    return EvalRow(
        ontology=ontology,
        requirement_id=retrieved.requirement_id,
        precision=precision,
        recall=recall,
        f1=f1,
        gt_count=len(truth_set),
        ext_count=ext,
    )


def not_applicable_row(ontology: str, requirement_id: str) -> EvalRow:
    return EvalRow(ontology, requirement_id, 0.0, 0.0, 0.0, 0, 0, not_applicable=True)


def load_ground_truth(
    data: bytes | str, known_requirement_ids: Iterable[str] | None = None
) -> GroundTruth:
    """Parse ground-truth CSV (header ``ontology,requirement_id,iri``).

    An ``iri`` value of literal ``N/A`` marks that (ontology, requirement)
    pair as not applicable. Duplicate rows collapse; IRI matching is exact,
    so differently-cased IRIs stay distinct.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    known = set(known_requirement_ids) if known_requirement_ids is not None else None
    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["ontology", "requirement_id", "iri"]:
        raise GroundTruthError("ground-truth header must be ontology,requirement_id,iri")
    entries: dict[tuple[str, str], set[Iri]] = {}
    na_pairs: set[tuple[str, str]] = set()
    for line_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise GroundTruthError(f"row {line_no}: expected 3 fields, got {len(row)}")
        ontology, requirement_id, iri_value = (field.strip() for field in row)
        if not ontology or not requirement_id or not iri_value:
            raise GroundTruthError(f"row {line_no}: empty field")
        if known is not None and requirement_id not in known:
            raise GroundTruthError(f"row {line_no}: unknown requirement_id {requirement_id!r}")
        pair = (ontology, requirement_id)
        if iri_value == NOT_APPLICABLE_MARKER:
            na_pairs.add(pair)
            continue
        try:
            iri = Iri(iri_value)
        except InvalidIriError as exc:
            raise GroundTruthError(f"row {line_no}: {exc}") from exc
        entries.setdefault(pair, set()).add(iri)
    conflict = na_pairs & set(entries)
    if conflict:
        raise GroundTruthError(
            f"pairs marked N/A but also given IRIs: {sorted(conflict)}"
        )
    return GroundTruth(
        entries={pair: frozenset(iris) for pair, iris in entries.items()},
        not_applicable=frozenset(na_pairs),
    )


# -- report rendering -------------------------------------------------------


def _requirement_order(rows: Sequence[EvalRow], explicit: Sequence[str] | None) -> list[str]:
    if explicit is not None:
        return list(explicit)
    seen: list[str] = []
    for row in rows:
        if row.requirement_id not in seen:
            seen.append(row.requirement_id)
    return seen


def _cells(row: EvalRow | None, rounded: bool) -> list[str]:
    """The P, R, F1, GT, Ext cell group for one (ontology, requirement)."""
    if row is None or row.not_applicable:
        return [""] * 5
    if rounded:
        return [
            f"{row.precision:.2f}",
            f"{row.recall:.2f}",
            f"{row.f1:.2f}",
            f"{row.gt_count:.1f}",
            f"{row.ext_count:.1f}",
        ]
    return [
        repr(row.precision),
        repr(row.recall),
        repr(row.f1),
        str(row.gt_count),
        str(row.ext_count),
    ]


def render_report(
    rows: Sequence[EvalRow],
    format: str = "markdown",
    requirement_order: Sequence[str] | None = None,
    requirement_titles: dict[str, str] | None = None,
) -> bytes:
    """One row per ontology, one P/R/F1/GT/Ext column group per
    requirement. Markdown rounds to 2 decimals and shows a dash for
    not-applicable cells; CSV keeps full precision and leaves them empty.
    """
    if format not in ("markdown", "csv"):
        raise ValueError("format must be 'markdown' or 'csv'")
    requirement_ids = _requirement_order(rows, requirement_order)
    titles = requirement_titles or {}
    by_cell: dict[tuple[str, str], EvalRow] = {}
    ontologies: list[str] = []
    for row in rows:
        key = (row.ontology, row.requirement_id)
        if key in by_cell:
            raise ValueError(f"duplicate report cell {key}")
        by_cell[key] = row
        if row.ontology not in ontologies:
            ontologies.append(row.ontology)

    if format == "csv":
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["ontology"]
        for rid in requirement_ids:
            header += [f"{rid}_{m}" for m in ("precision", "recall", "f1", "gt", "ext")]
        writer.writerow(header)
        for ontology in ontologies:
            record = [ontology]
            for rid in requirement_ids:
                record += _cells(by_cell.get((ontology, rid)), rounded=False)
            writer.writerow(record)
        return buf.getvalue().encode("utf-8")

    labels = [titles.get(rid, rid) for rid in requirement_ids]
    header = ["Ontology"]
    for label in labels:
        header += [f"{label} {m}" for m in ("P", "R", "F1", "GT", "Ext")]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    for ontology in ontologies:
        cells = [ontology]
        for rid in requirement_ids:
            group = _cells(by_cell.get((ontology, rid)), rounded=True)
            cells += [cell if cell else DASH for cell in group]
        lines.append("| " + " | ".join(cells) + " |")
    return ("\n".join(lines) + "\n").encode("utf-8")
