"""Gold relation datasets: source/target records with conditional-probability scores."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    """Raised for structurally invalid dataset files."""


@dataclass(frozen=True)
class Record:
    source: str
    target: str
    gold: float


@dataclass
class RelationDataset:
    """A relation (e.g. object->room) with gold P(target | source) scores."""

    relation_name: str
    targets: list[str]
    records: list[Record]
    direction_templates: str | None = None

    def __post_init__(self) -> None:
        target_set = set(self.targets)
        if len(target_set) != len(self.targets):
            raise DatasetError(f"{self.relation_name}: duplicate targets")
        seen_pairs: set[tuple[str, str]] = set()
        for rec in self.records:
            if rec.target not in target_set:
                raise DatasetError(
                    f"{self.relation_name}: record ({rec.source!r}, {rec.target!r}) "
                    f"names an unknown target"
                )
            if not 0.0 <= rec.gold <= 1.0:
                raise DatasetError(
                    f"{self.relation_name}: gold {rec.gold} for "
                    f"({rec.source!r}, {rec.target!r}) outside [0, 1]"
                )
            pair = (rec.source, rec.target)
            if pair in seen_pairs:
                raise DatasetError(f"{self.relation_name}: duplicate pair {pair}")
            seen_pairs.add(pair)
        if not self.records:
            raise DatasetError(f"{self.relation_name}: no records")

    @property
    def sources(self) -> list[str]:
        """Unique sources in first-appearance order."""
        out: list[str] = []
        seen: set[str] = set()
        for rec in self.records:
            if rec.source not in seen:
                seen.add(rec.source)
                out.append(rec.source)
        return out

    def gold_of(self, source: str, target: str) -> float | None:
        for rec in self.records:
            if rec.source == source and rec.target == target:
                return rec.gold
        return None


@dataclass
class GoldMatrix:
    """Dense sources x targets gold matrix; unlisted pairs hold the fill value."""

    sources: list[str]
    targets: list[str]
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.sources), len(self.targets)):
            raise ValueError("gold matrix shape does not match source/target lists")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValueError("gold values outside [0, 1]")


def load_dataset(path: str | Path) -> RelationDataset:
    """Load a dataset from its JSON file (see docs/FORMATS.md)."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON: {exc}") from exc
    for key in ("relation", "targets", "records"):
        if key not in raw:
            raise DatasetError(f"{path}: missing field {key!r}")
    records = []
    for i, rec in enumerate(raw["records"]):
        try:
            records.append(Record(rec["source"], rec["target"], float(rec["gold"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"{path}: bad record #{i}: {exc}") from exc
    return RelationDataset(
        relation_name=raw["relation"],
        targets=list(raw["targets"]),
        records=records,
        direction_templates=raw.get("direction_templates"),
    )


def save_dataset(ds: RelationDataset, path: str | Path) -> None:
    """Serialize a dataset; load(save(ds)) == ds."""
    lines = ["{"]
    lines.append(f'  "relation": {json.dumps(ds.relation_name)},')
    lines.append(f'  "targets": {json.dumps(ds.targets, ensure_ascii=False)},')
    rec_lines = [
        "    " + json.dumps(
            {"source": r.source, "target": r.target, "gold": r.gold},
            ensure_ascii=False,
        )
        for r in ds.records
    ]
    trailer = "," if ds.direction_templates is not None else ""
    lines.append('  "records": [')
    lines.append(",\n".join(rec_lines))
    lines.append("  ]" + trailer)
    if ds.direction_templates is not None:
        lines.append(f'  "direction_templates": {json.dumps(ds.direction_templates)}')
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def to_gold_matrix(ds: RelationDataset, fill: str = "zeros") -> GoldMatrix:
    """Densify the dataset; pairs without a record take the fill value 0."""
    if fill != "zeros":
        raise ValueError(f"unknown fill policy: {fill!r}")
    sources = ds.sources
    src_index = {s: i for i, s in enumerate(sources)}
    tgt_index = {t: j for j, t in enumerate(ds.targets)}
    values = np.zeros((len(sources), len(ds.targets)), dtype=np.float64)
    for rec in ds.records:
        values[src_index[rec.source], tgt_index[rec.target]] = rec.gold
    return GoldMatrix(sources=sources, targets=list(ds.targets), values=values)
