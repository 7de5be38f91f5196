"""Scoring association matrices against gold distributions.

Distance correlation (Székely's original double-centered definition, not the
bias-corrected variant), computed per target and concatenated over all
targets (CONC), with permutation-test significance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .seeding import derive_seed

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TargetScore:
    dcor: float
    p_value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.dcor <= 1.0:
            raise ValueError(f"dcor {self.dcor} outside [0, 1]")
        if not 0.0 < self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside (0, 1]")


@dataclass
class ScoreReport:
    """Evaluation result for one (model, method) pair on one relation."""

    model: str
    method: str
    relation: str
    per_target: dict[str, TargetScore]
    conc: TargetScore
    degenerate_flags: list[str] = field(default_factory=list)


def _centered_distances(x: np.ndarray) -> np.ndarray:
    """Double-centered pairwise absolute-difference matrix."""
    d = np.abs(x[:, None] - x[None, :])
    return d - d.mean(axis=0)[None, :] - d.mean(axis=1)[:, None] + d.mean()


def _dcor_parts(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    A = _centered_distances(x)
    B = _centered_distances(y)
    dcov2 = float((A * B).mean())
    dvar2_x = float((A * A).mean())
    dvar2_y = float((B * B).mean())
    return dcov2, dvar2_x, dvar2_y


def _check_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        raise ValueError("distance correlation needs at least 2 observations")
    return x, y


def dcor_with_flag(x, y) -> tuple[float, bool]:
    """Distance correlation plus a degenerate indicator (zero distance variance)."""
    x, y = _check_pair(x, y)
    dcov2, dvar2_x, dvar2_y = _dcor_parts(x, y)
    denom = np.sqrt(dvar2_x * dvar2_y)
    if denom == 0.0:
        return 0.0, True
    ratio = max(dcov2, 0.0) / denom
    return float(np.sqrt(min(ratio, 1.0))), False


def dcor(x, y) -> float:
    """Székely distance correlation of two equal-length sequences, in [0, 1].

    dCov^2 is the mean elementwise product of the double-centered pairwise
    distance matrices; dCor = dCov / sqrt(dVar_x * dVar_y), defined as 0 when
    either distance variance vanishes.
    """
    value, _ = dcor_with_flag(x, y)
    return value


def permutation_p(x, y, n_perm: int = 10000, seed: int = 0) -> float:
    """Permutation p-value for dcor(x, y) with add-one smoothing.

    p = (1 + #{perm : dcor(x, y  o  perm) >= dcor(x, y)}) / (n_perm + 1).
    Permuting y only reorders its centered distance matrix, so each draw
    costs one elementwise product.
    """
    x, y = _check_pair(x, y)
    if n_perm < 0:
        raise ValueError("n_perm must be >= 0")
    A = _centered_distances(x)
    B = _centered_distances(y)
    dcov2_obs = max(float((A * B).mean()), 0.0)
    denom = np.sqrt(float((A * A).mean()) * float((B * B).mean()))
    rng = np.random.default_rng(seed)
    n = x.shape[0]
    count = 0
    for _ in range(n_perm):
        idx = rng.permutation(n)
        dcov2_perm = max(float((A * B[np.ix_(idx, idx)]).mean()), 0.0)
        if denom == 0.0 or dcov2_perm >= dcov2_obs:
            count += 1
    return (1 + count) / (n_perm + 1)


def align_matrices(assoc, gold) -> tuple[np.ndarray, np.ndarray, list[str], list[str]]:
    """Restrict both matrices to the shared sources/targets, in gold order.

    Sources the association matrix dropped (missing vectors) are mirrored out
    of the gold matrix, and vice versa.
    """
    a_src = {s: i for i, s in enumerate(assoc.sources)}
    a_tgt = {t: j for j, t in enumerate(assoc.targets)}
    sources = [s for s in gold.sources if s in a_src]
    targets = [t for t in gold.targets if t in a_tgt]
    if not sources or not targets:
        raise ValueError("no shared sources/targets between association and gold matrices")
    g_src = {s: i for i, s in enumerate(gold.sources)}
    g_tgt = {t: j for j, t in enumerate(gold.targets)}
    A = assoc.values[np.ix_([a_src[s] for s in sources], [a_tgt[t] for t in targets])]
    G = gold.values[np.ix_([g_src[s] for s in sources], [g_tgt[t] for t in targets])]
    return A, G, sources, targets


def score_per_target(assoc, gold) -> dict[str, float]:
    """dcor of association column vs gold column, for every shared target."""
    A, G, _, targets = align_matrices(assoc, gold)
    return {t: dcor(A[:, j], G[:, j]) for j, t in enumerate(targets)}


def score_conc(assoc, gold) -> float:
    """dcor over both matrices flattened column-major into single sequences."""
    A, G, _, _ = align_matrices(assoc, gold)
    return dcor(A.ravel(order="F"), G.ravel(order="F"))


def evaluate(
    assoc,
    gold,
    relation: str,
    n_perm: int = 10000,
    seed: int = 0,
) -> ScoreReport:
    """Full per-target + CONC report with permutation p-values.

    Permutation seeds are derived per column: target j uses
    derive_seed(seed, 1, j); CONC uses derive_seed(seed, 2, 0). Results are
    therefore independent of evaluation order.
    """
    A, G, _, targets = align_matrices(assoc, gold)
    flags: list[str] = []
    per_target: dict[str, TargetScore] = {}
    for j, t in enumerate(targets):
        value, degen = dcor_with_flag(A[:, j], G[:, j])
        if degen:
            flags.append(f"per-target:{t}:zero-distance-variance")
        p = permutation_p(A[:, j], G[:, j], n_perm=n_perm, seed=derive_seed(seed, 1, j))
        per_target[t] = TargetScore(dcor=value, p_value=p)
    xa, xg = A.ravel(order="F"), G.ravel(order="F")
    conc_value, conc_degen = dcor_with_flag(xa, xg)
    if conc_degen:
        flags.append("conc:zero-distance-variance")
    conc_p = permutation_p(xa, xg, n_perm=n_perm, seed=derive_seed(seed, 2, 0))
    return ScoreReport(
        model=assoc.model,
        method=assoc.method,
        relation=relation,
        per_target=per_target,
        conc=TargetScore(dcor=conc_value, p_value=conc_p),
        degenerate_flags=flags,
    )


def _argmax_targets(gold) -> dict[str, int]:
    # first-listed target wins ties, matching the label-assignment rule
    return {s: int(np.argmax(gold.values[i])) for i, s in enumerate(gold.sources)}


def frequency_correlation(assoc, freq: dict[str, float], gold) -> dict[str, float]:
    """Per-target dcor between association scores and word frequencies.

    For each target, only the sources whose gold argmax is that target are
    considered; sources without a frequency are dropped with a warning.
    Targets left with fewer than 2 sources score 0 (degenerate).
    """
    result, _ = frequency_correlation_with_stats(assoc, freq, gold)
    return {t: v[0] for t, v in result.items()}


def frequency_correlation_with_stats(
    assoc,
    freq: dict[str, float],
    gold,
    n_perm: int = 0,
    seed: int = 0,
) -> tuple[dict[str, tuple[float, float]], list[str]]:
    """As frequency_correlation, returning (dcor, p_value) per target plus flags."""
    A, G, sources, targets = align_matrices(assoc, gold)
    owner = {s: int(np.argmax(G[i])) for i, s in enumerate(sources)}
    missing = [s for s in sources if s not in freq]
    if missing:
        log.warning("no frequency for %d sources, dropped: %s", len(missing), missing)
    flags: list[str] = []
    out: dict[str, tuple[float, float]] = {}
    for j, t in enumerate(targets):
        rows = [i for i, s in enumerate(sources) if owner[s] == j and s in freq]
        if len(rows) < 2:
            flags.append(f"frequency:{t}:fewer-than-2-sources")
            out[t] = (0.0, 1.0)
            continue
        scores = A[rows, j]
        freqs = np.array([freq[sources[i]] for i in rows], dtype=np.float64)
        value, degen = dcor_with_flag(scores, freqs)
        if degen:
            flags.append(f"frequency:{t}:zero-distance-variance")
        if n_perm > 0:
            p = permutation_p(scores, freqs, n_perm=n_perm, seed=derive_seed(seed, 3, j))
        else:
            p = 1.0
        out[t] = (value, p)
    return out, flags


def load_frequencies(path) -> dict[str, float]:
    """Parse a `phrase<TAB>value` frequency file."""
    out: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected phrase<TAB>value")
            phrase, _, raw = line.partition("\t")
            try:
                value = float(raw)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad frequency value {raw!r}") from exc
            if phrase in out:
                raise ValueError(f"{path}:{lineno}: duplicate phrase {phrase!r}")
            out[phrase] = value
    return out
