"""Static word-embedding files: parsing and phrase-to-vector resolution."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

FORMAT_HEADER = "text-with-header"
FORMAT_HEADERLESS = "text-headerless"


class EmbeddingFormatError(ValueError):
    """Raised when an embedding file cannot be parsed at all."""


@dataclass
class EmbeddingStore:
    """Immutable word -> dense vector map with a fixed dimension.

    `skipped_rows` counts input lines that were dropped at load time
    (wrong length, non-finite values, duplicates).
    """

    dimension: int
    entries: dict[str, np.ndarray]
    name: str = ""
    skipped_rows: int = 0
    _matrix_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, token: str) -> np.ndarray | None:
        return self.entries.get(token)


def sniff_embedding_format(path: str | Path) -> str:
    """Guess header vs headerless: a two-field all-integer first line is a header."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    parts = first.split(" ")
    if len(parts) == 2:
        try:
            int(parts[0]), int(parts[1])
            return FORMAT_HEADER
        except ValueError:
            pass
    return FORMAT_HEADERLESS


def load_static_embeddings(
    path: str | Path,
    format: str = FORMAT_HEADERLESS,
    vocab_filter: set[str] | None = None,
    name: str | None = None,
) -> EmbeddingStore:
    """Parse a text embedding file into an EmbeddingStore.

    Rows are `token v1 ... vd` separated by single spaces; with
    `text-with-header` the first line is `count dim`. Rows whose length
    disagrees with the first valid row, rows with non-finite components and
    duplicate tokens are skipped and counted. Dimension is inferred from the
    first valid row.
    """
    if format not in (FORMAT_HEADER, FORMAT_HEADERLESS):
        raise ValueError(f"unknown embedding format: {format!r}")
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    dimension: int | None = None
    skipped = 0
    with open(path, encoding="utf-8", newline=None) as fh:
        if format == FORMAT_HEADER:
            header = fh.readline()
            if not header.strip():
                raise EmbeddingFormatError(f"{path}: empty file, expected header line")
        for lineno, line in enumerate(fh, start=2 if format == FORMAT_HEADER else 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split(" ")
            token = parts[0]
            if vocab_filter is not None and token not in vocab_filter:
                continue
            if dimension is None:
                if len(parts) < 2:
                    skipped += 1
                    continue
                dimension = len(parts) - 1
            if len(parts) - 1 != dimension:
                skipped += 1
                continue
            try:
                vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
            except ValueError:
                skipped += 1
                continue
            if not np.all(np.isfinite(vec)):
                skipped += 1
                continue
            if token in entries:
                skipped += 1
                continue
            entries[token] = vec
    if not entries:
        raise EmbeddingFormatError(f"{path}: no usable embedding rows after filtering")
    if skipped:
        log.warning("%s: skipped %d malformed/duplicate rows", path, skipped)
    return EmbeddingStore(
        dimension=dimension,
        entries=entries,
        name=name if name is not None else path.stem,
        skipped_rows=skipped,
    )


def lookup_phrase(store: EmbeddingStore, phrase: str, lowercase: bool = True) -> np.ndarray | None:
    """Resolve a phrase to a vector.

    Tries the raw phrase, then the underscore-joined variant (multiword
    entries in word2vec-style files), then falls back to the componentwise
    mean over in-vocabulary component tokens. Returns None when nothing
    resolves.
    """
    if not phrase:
        raise ValueError("phrase must be non-empty")
    if lowercase:
        phrase = phrase.lower()
    direct = store.get(phrase)
    if direct is not None:
        return direct
    tokens = phrase.split()
    if len(tokens) > 1:
        joined = store.get("_".join(tokens))
        if joined is not None:
            return joined
    found = [store.entries[t] for t in tokens if t in store.entries]
    if not found:
        return None
    if len(found) == 1:
        return found[0]
    return np.mean(np.stack(found), axis=0)
