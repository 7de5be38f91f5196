"""Writers for the scoring engine's interchange files (see its docs/FORMATS.md).

The exporter talks to the scoring engine only through these files, so the
formats are reimplemented here against the documented contract rather than
imported.
"""

from __future__ import annotations

import json


def write_contextual_vectors(path, model: str, dimension: int,
                             records: list[dict], meta: dict | None = None) -> None:
    """records: [{"word", "template_id", "vector"}] after a header line."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": "contextual-vectors", "version": 1, "model": model,
                  "dimension": dimension, "meta": meta or {}}
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for rec in records:
            fh.write(json.dumps(
                {"word": rec["word"], "template_id": rec["template_id"],
                 "vector": [float(x) for x in rec["vector"]]},
                ensure_ascii=False) + "\n")


def write_probability_table(path, model: str, records: list[dict],
                            meta: dict | None = None) -> None:
    """records: [{"kind", "template_id", "source", "target", "prob", "prior_prob"?}]."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": "probability-table", "version": 1, "model": model,
                  "meta": meta or {}}
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for rec in records:
            obj = {"kind": rec["kind"], "template_id": rec["template_id"],
                   "source": rec["source"], "target": rec["target"],
                   "prob": float(rec["prob"])}
            if rec.get("prior_prob") is not None:
                obj["prior_prob"] = float(rec["prior_prob"])
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_dataset(path) -> dict:
    """Minimal dataset reader: relation, targets, sources (unique, ordered)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    sources: list[str] = []
    seen: set[str] = set()
    for rec in raw["records"]:
        if rec["source"] not in seen:
            seen.add(rec["source"])
            sources.append(rec["source"])
    return {"relation": raw["relation"], "targets": list(raw["targets"]), "sources": sources}
