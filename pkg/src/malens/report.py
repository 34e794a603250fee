"""Aggregation of assignments and verdicts into distribution reports, with
deterministic emission (stable ordering: count desc, label asc)."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import NoAssignments, NoDecipherableWords
from .neighbor import NeighborAssignment
from .verdict import Verdict, WordVerdict

AXIS_TOKEN_LANGUAGE = "TokenLanguage"
AXIS_WORD_VERDICT = "WordVerdict"


@dataclass(frozen=True)
class DistributionReport:
    corpus_id: str
    axis: str
    counts: dict[str, int]
    # frames with no neighbor / words outside the counted basis
    excluded: int = 0
    decipherable_fraction: float | None = None

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def fractions(self) -> dict[str, float]:
        total = self.total
        return {label: count / total for label, count in self.counts.items()}

    def ordered_labels(self) -> list[str]:
        return sorted(self.counts, key=lambda label: (-self.counts[label], label))


def token_language_distribution(assignments: list[NeighborAssignment],
                                corpus_id: str = "") -> DistributionReport:
    """Counts per identified language over all frames; no-neighbor sentinel
    frames and language-less frames are excluded and reported separately."""
    if not assignments:
        raise NoAssignments("no assignments to aggregate")
    counts: dict[str, int] = {}
    excluded = 0
    for a in assignments:
        if a.is_no_neighbor or not a.language:
            excluded += 1
            continue
        counts[a.language] = counts.get(a.language, 0) + 1
    return DistributionReport(corpus_id=corpus_id, axis=AXIS_TOKEN_LANGUAGE,
                              counts=counts, excluded=excluded)


def verdict_distribution(verdicts: list[WordVerdict], corpus_id: str = "",
                         basis: str = "decipherable") -> DistributionReport:
    """Fractions over decipherable words (verdict != Unclear), matching the
    figure convention; basis='all' keeps Unclear in the counts."""
    if not verdicts:
        raise NoAssignments("no verdicts to aggregate")
    total = len(verdicts)
    decipherable = [v for v in verdicts if v.verdict is not Verdict.UNCLEAR]
    if basis == "decipherable":
        if not decipherable:
            raise NoDecipherableWords("every word is Unclear")
        counted, excluded = decipherable, total - len(decipherable)
    elif basis == "all":
        counted, excluded = verdicts, 0
    else:
        raise ValueError(f"unknown basis {basis!r}")
    counts: dict[str, int] = {}
    for v in counted:
        counts[v.verdict.value] = counts.get(v.verdict.value, 0) + 1
    return DistributionReport(
        corpus_id=corpus_id, axis=AXIS_WORD_VERDICT, counts=counts,
        excluded=excluded, decipherable_fraction=len(decipherable) / total,
    )


def merge(a: DistributionReport, b: DistributionReport) -> DistributionReport:
    """Additive merge of two reports over the same axis."""
    if a.axis != b.axis:
        raise ValueError(f"cannot merge axes {a.axis!r} and {b.axis!r}")
    counts = dict(a.counts)
    for label, count in b.counts.items():
        counts[label] = counts.get(label, 0) + count
    frac = None
    if a.decipherable_fraction is not None and b.decipherable_fraction is not None:
        total_a = (a.total + a.excluded)
        total_b = (b.total + b.excluded)
        decipherable = a.decipherable_fraction * total_a + b.decipherable_fraction * total_b
        frac = decipherable / (total_a + total_b)
    return DistributionReport(
        corpus_id=a.corpus_id if a.corpus_id == b.corpus_id else f"{a.corpus_id}+{b.corpus_id}",
        axis=a.axis, counts=counts, excluded=a.excluded + b.excluded,
        decipherable_fraction=frac,
    )


FORMAT_TABLE = "Table"
FORMAT_DELIMITED = "DelimitedValues"
FORMAT_STRUCTURED = "StructuredText"


def emit(report: DistributionReport, format: str, path) -> None:
    path = Path(path)
    if format == FORMAT_DELIMITED:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["corpus_id", "axis", "label", "count", "fraction"])
            fractions = report.fractions
            for label in report.ordered_labels():
                writer.writerow([report.corpus_id, report.axis, label,
                                 report.counts[label], repr(fractions[label])])
    elif format == FORMAT_STRUCTURED:
        doc = {
            "corpus_id": report.corpus_id,
            "axis": report.axis,
            "counts": {label: report.counts[label] for label in report.ordered_labels()},
            "excluded": report.excluded,
            "decipherable_fraction": report.decipherable_fraction,
        }
        path.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n",
                        encoding="utf-8")
    elif format == FORMAT_TABLE:
        lines = [f"# {report.corpus_id} / {report.axis}",
                 f"{'label':<20} {'count':>8} {'fraction':>10}"]
        fractions = report.fractions
        for label in report.ordered_labels():
            lines.append(f"{label:<20} {report.counts[label]:>8} {fractions[label]:>10.4f}")
        if report.excluded:
            lines.append(f"(excluded: {report.excluded})")
        if report.decipherable_fraction is not None:
            lines.append(f"(decipherable: {report.decipherable_fraction:.4f})")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown report format {format!r}")


def parse_structured(path) -> DistributionReport:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return DistributionReport(
        corpus_id=doc["corpus_id"], axis=doc["axis"], counts=dict(doc["counts"]),
        excluded=doc.get("excluded", 0),
        decipherable_fraction=doc.get("decipherable_fraction"),
    )
