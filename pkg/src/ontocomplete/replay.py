"""Replay an edit history of whole-ontology snapshots through the phase schedule."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .advisor import DEFAULT_THRESHOLD, gate_phase
from .model import ElementCounts
from .octree import ConditionNode, Phase, WeightProfile, builtin_profiles, default_tree, evaluate
from .parser import ParseDiagnostic, parse_ontology

CSV_HEADER = ("iteration", "phase", "oc", "classes", "properties", "axioms", "individuals", "gate_fired")


class ReplayError(ValueError):
    def __init__(self, iteration: int, diagnostics: Sequence[ParseDiagnostic], source: str | None = None):
        where = f" ({source})" if source else ""
        detail = "; ".join(str(d) for d in diagnostics if d.severity == "error")
        super().__init__(f"snapshot {iteration}{where} does not parse: {detail}")
        self.iteration = iteration
        self.diagnostics = list(diagnostics)


@dataclass(frozen=True)
class ReplayRecord:
    iteration: int
    phase: Phase
    oc: float
    counts: ElementCounts
    gate_fired: bool

    def row(self) -> list[str]:
        c = self.counts
        return [
            str(self.iteration),
            self.phase.value,
            f"{self.oc:.4f}",
            str(c.classes),
            str(c.properties),
            str(c.axioms),
            str(c.individuals),
            "true" if self.gate_fired else "false",
        ]


def replay(
    snapshots: Sequence[str],
    profiles: Mapping[Phase, WeightProfile] | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    tree: ConditionNode | None = None,
    names: Sequence[str] | None = None,
) -> list[ReplayRecord]:
    tree = tree or default_tree()
    profiles = profiles or builtin_profiles(tree)
    phase = Phase.BUSINESS_VOCABULARY
    records = []
    for i, text in enumerate(snapshots, start=1):
        parsed = parse_ontology(text)
        if parsed.ontology is None:
            raise ReplayError(i, parsed.diagnostics, names[i - 1] if names else None)
        result = evaluate(tree, profiles[phase], parsed.ontology)
        decision = gate_phase(result, phase, threshold)
        records.append(ReplayRecord(i, phase, result.oc, result.element_counts, decision.advance))
        if decision.advance:
            phase = decision.next_phase  # type: ignore[assignment]
    return records


def load_snapshots(directory: str | Path) -> tuple[list[str], list[str]]:
    """Snapshot documents in file-name order, with their names."""
    files = sorted(p for p in Path(directory).iterdir() if p.is_file() and p.suffix == ".ttl")
    return [p.read_text(encoding="utf-8") for p in files], [p.name for p in files]


def to_csv(records: Sequence[ReplayRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()
