"""Vector-pair and set-pair association measures.

Includes the two-set/two-attribute bias statistic (sum-of-cosines form), its
source->target set-mean variant, componentwise dependence measures between
word vectors, and the association-matrix builder shared by all downstream
scoring.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats as sstats
from scipy.linalg import cho_factor, cho_solve

log = logging.getLogger(__name__)

DEPENDENCE_KINDS = ("pearson", "spearman", "kendall", "distance_correlation", "neg_mahalanobis")
VECTOR_MEASURES = ("cosine", "set_mean_cosine") + DEPENDENCE_KINDS


class ZeroVectorError(ValueError):
    """Cosine is undefined for an all-zero vector."""


@dataclass
class ContextualVectorSet:
    """word -> list of (template_id, vector) from a contextualized model."""

    data: dict[str, list[tuple[str, np.ndarray]]]
    dimension: int
    model: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for word, pairs in self.data.items():
            if not pairs:
                raise ValueError(f"word {word!r} has no vectors")
            for tid, vec in pairs:
                if vec.shape != (self.dimension,):
                    raise ValueError(
                        f"vector for ({word!r}, {tid!r}) has length {vec.shape}, "
                        f"expected {self.dimension}"
                    )
                if not np.all(np.isfinite(vec)):
                    raise ValueError(f"non-finite vector for ({word!r}, {tid!r})")

    def __contains__(self, word: str) -> bool:
        return word in self.data

    def vectors_of(self, word: str) -> np.ndarray:
        """All template vectors of a word as an (n_templates, dim) array."""
        return np.stack([vec for _, vec in self.data[word]])

    def mean_of(self, word: str) -> np.ndarray:
        pairs = self.data[word]
        if len(pairs) == 1:
            return pairs[0][1]
        return np.mean(self.vectors_of(word), axis=0)


@dataclass
class AssociationMatrix:
    """sources x targets extraction scores; always stored higher-is-stronger."""

    sources: list[str]
    targets: list[str]
    values: np.ndarray = field(repr=False)
    method: str = ""
    model: str = ""
    higher_is_stronger: bool = True
    dropped_sources: list[str] = field(default_factory=list)
    dropped_targets: list[str] = field(default_factory=list)
    degenerate_cells: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.sources), len(self.targets)):
            raise ValueError("association matrix shape mismatch")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("association matrix contains non-finite values")


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between two vectors, in [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for zero vector")
    return float(np.dot(u, v) / (nu * nv))


def set_mean_cosine(X: Sequence[np.ndarray], A: Sequence[np.ndarray]) -> float:
    """Mean cosine over all cross pairs of two vector sets.

    Reduces to plain cosine for singleton sets (bit-exactly: the single
    pairwise cosine is divided by 1).
    """
    X = list(X)
    A = list(A)
    if not X or not A:
        raise ValueError("set_mean_cosine requires non-empty sets")
    total = 0.0
    for x in X:
        for a in A:
            total += cosine(x, a)
    return total / (len(X) * len(A))


def weat_s(
    X: Sequence[np.ndarray],
    Y: Sequence[np.ndarray],
    A: Sequence[np.ndarray],
    B: Sequence[np.ndarray],
) -> float:
    """Two-set association difference: sum_x s(x,A,B) - sum_y s(y,A,B).

    s(w, A, B) = sum_a cos(w,a) - sum_b cos(w,b); all sums, no means.
    """
    X, Y, A, B = list(X), list(Y), list(A), list(B)
    if not (X and Y and A and B):
        raise ValueError("weat_s requires four non-empty sets")

    def s_w(w: np.ndarray) -> float:
        return sum(cosine(w, a) for a in A) - sum(cosine(w, b) for b in B)

    return sum(s_w(x) for x in X) - sum(s_w(y) for y in Y)


def _is_constant(u: np.ndarray) -> bool:
    return bool(np.all(u == u[0]))


def dependence_with_flag(
    u: np.ndarray,
    v: np.ndarray,
    kind: str,
    cov: np.ndarray | None = None,
) -> tuple[float, bool]:
    """componentwise_dependence plus a degenerate indicator.

    Degenerate means a constant input made a correlation undefined; the
    value is then 0 by definition.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("u and v must be 1-d of equal length")
    d = u.shape[0]
    if d < 2:
        raise ValueError("dependence measures need dimension >= 2")
    if kind == "neg_mahalanobis":
        if cov is None:
            raise ValueError("neg_mahalanobis requires a covariance matrix")
        delta = u - v
        try:
            factor = cho_factor(np.asarray(cov, dtype=np.float64))
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariance matrix is not positive definite") from exc
        d2 = float(delta @ cho_solve(factor, delta))
        return -math.sqrt(max(d2, 0.0)), False
    if kind not in DEPENDENCE_KINDS:
        raise ValueError(f"unknown dependence kind: {kind!r}")
    if _is_constant(u) or _is_constant(v):
        return 0.0, True
    if kind == "pearson":
        return float(sstats.pearsonr(u, v).statistic), False
    if kind == "spearman":
        return float(sstats.spearmanr(u, v).statistic), False
    if kind == "kendall":
        # tau-b: tie-corrected
        return float(sstats.kendalltau(u, v, variant="b").statistic), False
    # distance_correlation
    from .evaluation import dcor

    return dcor(u, v), False


def componentwise_dependence(
    u: np.ndarray,
    v: np.ndarray,
    kind: str,
    cov: np.ndarray | None = None,
) -> float:
    """Dependence between the components of two word vectors.

    pearson/spearman/kendall in [-1,1], distance_correlation in [0,1];
    neg_mahalanobis returns the negated Mahalanobis distance so that higher
    always means a stronger association. Constant input for a correlation
    kind yields 0 (degenerate, see dependence_with_flag).
    """
    value, _ = dependence_with_flag(u, v, kind, cov)
    return value


def ridge_covariance(vectors: Sequence[np.ndarray], ridge: float = 0.1) -> np.ndarray:
    """Sample covariance over the given vectors, regularized by ridge*mean(diag)*I.

    The word count is usually far below the embedding dimension, so the raw
    sample covariance is singular; the ridge keeps it positive definite.
    """
    M = np.stack(list(vectors))
    if M.shape[0] < 2:
        raise ValueError("covariance estimation needs at least 2 vectors")
    S = np.cov(M, rowvar=False, ddof=1)
    lam = ridge * float(np.mean(np.diag(S)))
    if lam <= 0.0:
        lam = 1.0
    return S + lam * np.eye(S.shape[0])


def build_association_matrix(
    repr_input,
    ds,
    measure: str,
    lowercase: bool = True,
    cov: np.ndarray | None = None,
) -> AssociationMatrix:
    """Score every (source, target) pair of a dataset with one measure.

    `repr_input` is either an EmbeddingStore or a (source ContextualVectorSet,
    target ContextualVectorSet) pair. Words that resolve to no vector are
    dropped with a warning. For contextual input, every measure except
    set_mean_cosine consumes the per-word mean vector.
    """
    from .embeddings import EmbeddingStore, lookup_phrase

    if measure not in VECTOR_MEASURES:
        raise ValueError(f"unknown measure: {measure!r}")

    contextual = not isinstance(repr_input, EmbeddingStore)
    if contextual:
        src_set, tgt_set = repr_input
        model = src_set.model or tgt_set.model

        def resolve_sets(word: str, vset: ContextualVectorSet):
            if word in vset:
                return [vec for _, vec in vset.data[word]]
            if lowercase and word.lower() in vset:
                return [vec for _, vec in vset.data[word.lower()]]
            return None

        src_vecs = {w: resolve_sets(w, src_set) for w in ds.sources}
        tgt_vecs = {t: resolve_sets(t, tgt_set) for t in ds.targets}
    else:
        store = repr_input
        model = store.name
        src_vecs = {w: lookup_phrase(store, w, lowercase) for w in ds.sources}
        tgt_vecs = {t: lookup_phrase(store, t, lowercase) for t in ds.targets}
        if measure == "set_mean_cosine":
            src_vecs = {w: None if v is None else [v] for w, v in src_vecs.items()}
            tgt_vecs = {t: None if v is None else [v] for t, v in tgt_vecs.items()}

    dropped_sources = [w for w, v in src_vecs.items() if v is None]
    dropped_targets = [t for t, v in tgt_vecs.items() if v is None]
    sources = [w for w in ds.sources if src_vecs[w] is not None]
    targets = [t for t in ds.targets if tgt_vecs[t] is not None]
    if dropped_sources or dropped_targets:
        log.warning(
            "dropped %d sources and %d targets without vectors: %s %s",
            len(dropped_sources), len(dropped_targets), dropped_sources, dropped_targets,
        )
    if not sources or not targets:
        raise ValueError("no resolvable vocabulary for this dataset/representation")

    def as_single(vecs):
        if isinstance(vecs, list):
            if len(vecs) == 1:
                return vecs[0]
            return np.mean(np.stack(vecs), axis=0)
        return vecs

    if measure == "neg_mahalanobis" and cov is None:
        pool = [as_single(src_vecs[w]) for w in sources]
        pool += [as_single(tgt_vecs[t]) for t in targets]
        cov = ridge_covariance(pool)

    values = np.zeros((len(sources), len(targets)), dtype=np.float64)
    degenerate: list[tuple[str, str]] = []
    for i, w in enumerate(sources):
        for j, t in enumerate(targets):
            if measure == "set_mean_cosine":
                sv = src_vecs[w] if isinstance(src_vecs[w], list) else [src_vecs[w]]
                tv = tgt_vecs[t] if isinstance(tgt_vecs[t], list) else [tgt_vecs[t]]
                values[i, j] = set_mean_cosine(sv, tv)
            elif measure == "cosine":
                values[i, j] = cosine(as_single(src_vecs[w]), as_single(tgt_vecs[t]))
            else:
                val, flag = dependence_with_flag(
                    as_single(src_vecs[w]), as_single(tgt_vecs[t]), measure, cov
                )
                values[i, j] = val
                if flag:
                    degenerate.append((w, t))

    return AssociationMatrix(
        sources=sources,
        targets=targets,
        values=values,
        method=measure,
        model=model,
        higher_is_stronger=True,
        dropped_sources=dropped_sources,
        dropped_targets=dropped_targets,
        degenerate_cells=degenerate,
    )


CONTEXTUAL_FORMAT = "contextual-vectors"
CONTEXTUAL_VERSION = 1


def save_contextual_vectors(vset: ContextualVectorSet, path: str | Path) -> None:
    """Write the JSONL interchange file (header line, then one record per line)."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format": CONTEXTUAL_FORMAT,
            "version": CONTEXTUAL_VERSION,
            "model": vset.model,
            "dimension": vset.dimension,
            "meta": vset.meta,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for word, pairs in vset.data.items():
            for tid, vec in pairs:
                rec = {"word": word, "template_id": tid, "vector": [float(x) for x in vec]}
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_contextual_vectors(path: str | Path) -> ContextualVectorSet:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise ValueError(f"{path}: empty file, expected header line")
        header = json.loads(header_line)
        if header.get("format") != CONTEXTUAL_FORMAT:
            raise ValueError(f"{path}: not a {CONTEXTUAL_FORMAT} file")
        dimension = int(header["dimension"])
        data: dict[str, list[tuple[str, np.ndarray]]] = {}
        seen: set[tuple[str, str]] = set()
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            rec = json.loads(line)
            word, tid = rec["word"], rec["template_id"]
            if (word, tid) in seen:
                raise ValueError(f"{path}:{lineno}: duplicate (word, template_id) ({word!r}, {tid!r})")
            seen.add((word, tid))
            vec = np.array(rec["vector"], dtype=np.float64)
            if vec.shape != (dimension,):
                raise ValueError(
                    f"{path}:{lineno}: vector length {vec.shape[0]} != header dimension {dimension}"
                )
            data.setdefault(word, []).append((tid, vec))
    return ContextualVectorSet(
        data=data, dimension=dimension, model=header.get("model", ""), meta=header.get("meta", {})
    )
