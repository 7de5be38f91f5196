"""Probability-table based association scores.

Masked-LM scores weight a word's probability in a filled template against a
doubly-masked prior (increased log probability). Causal-LM scores use the
next-token probability after an incomplete template, optionally weighted
against a neutral-prompt prior. Tables are produced by the exporter and
consumed here as opaque probabilities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .measures import AssociationMatrix

import numpy as np

KINDS = ("mlm_target", "mlm_source", "clm_next")
MLM_DIRECTIONS = {"mask_target": "mlm_target", "mask_source": "mlm_source"}
# clm_next template ids carry their prediction direction as a prefix
CLM_PREFIXES = {"predict_target": "pt:", "predict_source": "ps:"}

PROBTABLE_FORMAT = "probability-table"
PROBTABLE_VERSION = 1


class ProbabilityTableError(ValueError):
    """Structurally invalid probability table."""


class MissingProbabilityError(KeyError):
    """The table lacks records the requested association needs."""

    def __init__(self, message: str, missing: list | None = None):
        super().__init__(message)
        self.missing = missing or []

    def __str__(self) -> str:  # KeyError would repr() the message
        return self.args[0]


@dataclass(frozen=True)
class ProbRecord:
    kind: str
    template_id: str
    source: str
    target: str
    prob: float
    prior_prob: float | None = None


@dataclass
class ProbabilityTable:
    records: list[ProbRecord]
    model: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._index: dict[tuple[str, str, str, str], ProbRecord] = {}
        for rec in self.records:
            if rec.kind not in KINDS:
                raise ProbabilityTableError(f"unknown kind {rec.kind!r}")
            if not 0.0 < rec.prob <= 1.0:
                raise ProbabilityTableError(
                    f"prob {rec.prob} for ({rec.kind}, {rec.template_id!r}, "
                    f"{rec.source!r}, {rec.target!r}) outside (0, 1]"
                )
            if rec.prior_prob is not None and not 0.0 < rec.prior_prob <= 1.0:
                raise ProbabilityTableError(
                    f"prior_prob {rec.prior_prob} for ({rec.kind}, {rec.template_id!r}, "
                    f"{rec.source!r}, {rec.target!r}) outside (0, 1]"
                )
            key = (rec.kind, rec.template_id, rec.source, rec.target)
            if key in self._index:
                raise ProbabilityTableError(f"duplicate record key {key}")
            self._index[key] = rec

    def get(self, kind: str, template_id: str, source: str, target: str) -> ProbRecord | None:
        return self._index.get((kind, template_id, source, target))

    def template_ids(self, kind: str, prefix: str = "") -> list[str]:
        ids = {r.template_id for r in self.records
               if r.kind == kind and r.template_id.startswith(prefix)}
        return sorted(ids)


def increased_log_prob(prob: float, prior: float) -> float:
    """log(prob / prior), natural log."""
    if prob <= 0.0 or prior <= 0.0:
        raise ValueError("increased_log_prob requires strictly positive inputs")
    return math.log(prob / prior)


def _aggregate(
    table: ProbabilityTable,
    ds,
    kind: str,
    template_ids: list[str],
    cell_score,
    allow_drop: bool,
    method: str,
) -> AssociationMatrix:
    sources = ds.sources
    targets = list(ds.targets)
    missing: list[tuple[str, str, str]] = []
    cells: dict[tuple[str, str], float] = {}
    for s in sources:
        for t in targets:
            scores = []
            for tid in template_ids:
                rec = table.get(kind, tid, s, t)
                if rec is None:
                    missing.append((s, t, tid))
                else:
                    scores.append(cell_score(rec))
            if scores and len(scores) == len(template_ids):
                cells[(s, t)] = float(np.mean(scores))
    if missing and not allow_drop:
        shown = ", ".join(f"({s!r}, {t!r}, template {tid!r})" for s, t, tid in missing[:5])
        more = f" and {len(missing) - 5} more" if len(missing) > 5 else ""
        raise MissingProbabilityError(
            f"table lacks records for {len(missing)} (source, target, template) "
            f"combinations: {shown}{more}", missing)
    kept_sources = [s for s in sources if all((s, t) in cells for t in targets)]
    dropped = [s for s in sources if s not in kept_sources]
    if not kept_sources:
        raise MissingProbabilityError("no source has a complete probability row", missing)
    values = np.array([[cells[(s, t)] for t in targets] for s in kept_sources])
    return AssociationMatrix(
        sources=kept_sources,
        targets=targets,
        values=values,
        method=method,
        model=table.model,
        higher_is_stronger=True,
        dropped_sources=dropped,
    )


def mlm_association(
    table: ProbabilityTable,
    ds,
    direction: str,
    allow_drop: bool = False,
) -> AssociationMatrix:
    """Masked-LM increased log probability, averaged over the template battery.

    direction mask_target scores the target given the filled source and vice
    versa. Every record must carry the doubly-masked prior.
    """
    if direction not in MLM_DIRECTIONS:
        raise ValueError(f"unknown MLM direction: {direction!r}")
    kind = MLM_DIRECTIONS[direction]
    template_ids = table.template_ids(kind)
    if not template_ids:
        raise MissingProbabilityError(f"table has no {kind} records")

    def score(rec: ProbRecord) -> float:
        if rec.prior_prob is None:
            raise ProbabilityTableError(
                f"record ({rec.kind}, {rec.template_id!r}, {rec.source!r}, "
                f"{rec.target!r}) lacks the prior probability"
            )
        return increased_log_prob(rec.prob, rec.prior_prob)

    method = "m-t" if direction == "mask_target" else "m-s"
    return _aggregate(table, ds, kind, template_ids, score, allow_drop, method)


def clm_association(
    table: ProbabilityTable,
    ds,
    direction: str,
    weighting: str = "raw",
    allow_drop: bool = False,
) -> AssociationMatrix | None:
    """Causal-LM next-token score, averaged over the direction's templates.

    raw uses the probability itself; log_prior_ratio uses
    log(prob / neutral-prompt prior). Returns None when the table holds no
    template at all for the requested direction (e.g. no predict-target
    template exists for the verb relation), which is a legitimate absence.
    """
    if direction not in CLM_PREFIXES:
        raise ValueError(f"unknown CLM direction: {direction!r}")
    if weighting not in ("raw", "log_prior_ratio"):
        raise ValueError(f"unknown weighting: {weighting!r}")
    prefix = CLM_PREFIXES[direction]
    template_ids = table.template_ids("clm_next", prefix)
    if not template_ids:
        return None

    if weighting == "raw":
        def score(rec: ProbRecord) -> float:
            return rec.prob
    else:
        def score(rec: ProbRecord) -> float:
            if rec.prior_prob is None:
                raise ProbabilityTableError(
                    f"record ({rec.kind}, {rec.template_id!r}, {rec.source!r}, "
                    f"{rec.target!r}) lacks the neutral-prompt prior"
                )
            return increased_log_prob(rec.prob, rec.prior_prob)

    short = {"predict_target": "p-t", "predict_source": "p-s"}[direction]
    method = short if weighting == "raw" else short + "-l"
    return _aggregate(table, ds, "clm_next", template_ids, score, allow_drop, method)


def rank_candidates(
    table: ProbabilityTable,
    context_key: tuple[str, str, str],
    candidates: list[str],
) -> list[tuple[str, float]]:
    """Rank relation candidates for one (template, source, target) context.

    Candidate probabilities are stored under the compound template id
    `<template_id>|<candidate>`. Sorted descending by probability, ties
    broken lexicographically.
    """
    template_id, source, target = context_key
    scored: list[tuple[str, float]] = []
    for cand in candidates:
        tid = f"{template_id}|{cand}"
        matches = [r for r in table.records
                   if r.template_id == tid and r.source == source and r.target == target]
        if not matches:
            raise MissingProbabilityError(
                f"no probability for candidate {cand!r} under context "
                f"({template_id!r}, {source!r}, {target!r})")
        if len(matches) > 1:
            raise ProbabilityTableError(
                f"candidate {cand!r} is ambiguous under context "
                f"({template_id!r}, {source!r}, {target!r})")
        scored.append((cand, matches[0].prob))
    return sorted(scored, key=lambda cp: (-cp[1], cp[0]))


def save_probability_table(table: ProbabilityTable, path: str | Path) -> None:
    """Write the JSONL interchange file (header line, then one record per line)."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format": PROBTABLE_FORMAT,
            "version": PROBTABLE_VERSION,
            "model": table.model,
            "meta": table.meta,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for rec in table.records:
            obj = {
                "kind": rec.kind,
                "template_id": rec.template_id,
                "source": rec.source,
                "target": rec.target,
                "prob": rec.prob,
            }
            if rec.prior_prob is not None:
                obj["prior_prob"] = rec.prior_prob
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_probability_table(path: str | Path) -> ProbabilityTable:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise ProbabilityTableError(f"{path}: empty file, expected header line")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ProbabilityTableError(f"{path}:1: invalid JSON header: {exc}") from exc
        if header.get("format") != PROBTABLE_FORMAT:
            raise ProbabilityTableError(f"{path}: not a {PROBTABLE_FORMAT} file")
        records: list[ProbRecord] = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProbabilityTableError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                records.append(ProbRecord(
                    kind=rec["kind"],
                    template_id=rec["template_id"],
                    source=rec["source"],
                    target=rec["target"],
                    prob=float(rec["prob"]),
                    prior_prob=float(rec["prior_prob"]) if "prior_prob" in rec else None,
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ProbabilityTableError(f"{path}:{lineno}: bad record: {exc}") from exc
    try:
        return ProbabilityTable(records=records, model=header.get("model", ""),
                                meta=header.get("meta", {}))
    except ProbabilityTableError as exc:
        raise ProbabilityTableError(f"{path}: {exc}") from exc
