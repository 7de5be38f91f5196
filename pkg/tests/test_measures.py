import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relprobe.datasets import Record, RelationDataset
from relprobe.embeddings import EmbeddingStore
from relprobe.measures import (
    AssociationMatrix,
    ContextualVectorSet,
    ZeroVectorError,
    build_association_matrix,
    componentwise_dependence,
    cosine,
    dependence_with_flag,
    load_contextual_vectors,
    ridge_covariance,
    save_contextual_vectors,
    set_mean_cosine,
    weat_s,
)

import oracles


def test_cosine_identity():
    assert cosine(np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 3.0])) == pytest.approx(1.0)


def test_cosine_orthogonal():
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0


def test_cosine_45_degrees():
    assert cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(
        1 / math.sqrt(2), abs=1e-15)


def test_cosine_zero_vector_errors():
    with pytest.raises(ZeroVectorError):
        cosine(np.zeros(3), np.ones(3))


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError):
        cosine(np.ones(3), np.ones(4))


@given(st.floats(min_value=0.01, max_value=100.0))
def test_cosine_positive_scale_invariance(alpha):
    u = np.array([0.3, -1.2, 2.5, 0.7])
    v = np.array([1.1, 0.4, -0.6, 2.0])
    assert cosine(alpha * u, v) == pytest.approx(cosine(u, v), abs=1e-12)


def test_set_mean_cosine_singleton_reduces_to_cosine(rng):
    u = rng.normal(size=6)
    v = rng.normal(size=6)
    assert set_mean_cosine([u], [v]) == cosine(u, v)


def test_set_mean_cosine_duplicate_invariance(rng):
    u = rng.normal(size=4)
    v = rng.normal(size=4)
    assert set_mean_cosine([u, u], [v]) == pytest.approx(cosine(u, v), abs=1e-15)


def test_set_mean_cosine_matches_double_loop_oracle(rng):
    for nx in (1, 3, 8):
        for na in (1, 2, 8):
            X = [rng.normal(size=5) for _ in range(nx)]
            A = [rng.normal(size=5) for _ in range(na)]
            assert set_mean_cosine(X, A) == pytest.approx(
                oracles.naive_set_mean_cosine(X, A), abs=1e-12)


def test_set_mean_cosine_empty_set_errors():
    with pytest.raises(ValueError):
        set_mean_cosine([], [np.ones(2)])


def test_weat_same_concept_sets_zero(rng):
    X = [rng.normal(size=4) for _ in range(3)]
    A = [rng.normal(size=4) for _ in range(2)]
    B = [rng.normal(size=4) for _ in range(2)]
    assert weat_s(X, X, A, B) == pytest.approx(0.0, abs=1e-12)


def test_weat_same_attribute_sets_zero(rng):
    X = [rng.normal(size=4) for _ in range(2)]
    Y = [rng.normal(size=4) for _ in range(3)]
    A = [rng.normal(size=4) for _ in range(2)]
    assert weat_s(X, Y, A, A) == pytest.approx(0.0, abs=1e-12)


def test_weat_matches_quadruple_loop_oracle(rng):
    X = [rng.normal(size=5) for _ in range(3)]
    Y = [rng.normal(size=5) for _ in range(2)]
    A = [rng.normal(size=5) for _ in range(4)]
    B = [rng.normal(size=5) for _ in range(2)]
    assert weat_s(X, Y, A, B) == pytest.approx(
        oracles.naive_weat_s(X, Y, A, B), abs=1e-12)


def test_kendall_perfect_agreement():
    u = np.array([1.0, 2.0, 3.0])
    assert componentwise_dependence(u, u, "kendall") == 1.0


def test_kendall_perfect_disagreement():
    assert componentwise_dependence(
        np.array([1.0, 2.0, 3.0]), np.array([3.0, 2.0, 1.0]), "kendall") == -1.0


def test_distance_correlation_affine_dependence(rng):
    u = rng.normal(size=12)
    v = 2 * u + 1
    assert componentwise_dependence(u, v, "distance_correlation") == pytest.approx(1.0, abs=1e-9)


def test_pearson_matches_textbook_oracle(rng):
    u = rng.normal(size=10)
    v = rng.normal(size=10)
    assert componentwise_dependence(u, v, "pearson") == pytest.approx(
        oracles.naive_pearson(u, v), abs=1e-12)


@pytest.mark.parametrize("kind", ["pearson", "spearman", "kendall", "distance_correlation"])
def test_dependence_symmetry(kind, rng):
    u = rng.normal(size=9)
    v = rng.normal(size=9)
    assert componentwise_dependence(u, v, kind) == pytest.approx(
        componentwise_dependence(v, u, kind), abs=1e-12)


def test_spearman_equals_pearson_of_average_ranks(rng):
    u = np.array([3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])  # contains a tie
    v = rng.normal(size=8)
    expected = oracles.naive_pearson(oracles.average_ranks(list(u)), oracles.average_ranks(list(v)))
    assert componentwise_dependence(u, v, "spearman") == pytest.approx(expected, abs=1e-12)


def test_kendall_tau_b_with_ties_matches_oracle(rng):
    u = np.array([1.0, 2.0, 2.0, 3.0, 1.0, 4.0])
    v = np.array([2.0, 2.0, 1.0, 4.0, 3.0, 4.0])
    assert componentwise_dependence(u, v, "kendall") == pytest.approx(
        oracles.naive_kendall_tau_b(list(u), list(v)), abs=1e-12)


def test_constant_vector_degenerate_flag():
    u = np.full(5, 3.3)
    v = np.arange(5.0)
    for kind in ("pearson", "spearman", "kendall", "distance_correlation"):
        value, degenerate = dependence_with_flag(u, v, kind)
        assert value == 0.0 and degenerate


def test_neg_mahalanobis_identity_cov_is_neg_euclidean():
    u = np.array([1.0, 2.0, 3.0])
    v = np.array([2.0, 2.0, 5.0])
    value = componentwise_dependence(u, v, "neg_mahalanobis", cov=np.eye(3))
    assert value == pytest.approx(-math.sqrt(5.0), abs=1e-12)


def test_neg_mahalanobis_matches_loop_oracle(rng):
    M = rng.normal(size=(30, 4))
    cov = ridge_covariance(list(M))
    u, v = rng.normal(size=4), rng.normal(size=4)
    value = componentwise_dependence(u, v, "neg_mahalanobis", cov=cov)
    oracle = oracles.naive_mahalanobis(list(u), list(v), np.linalg.inv(cov).tolist())
    assert value == pytest.approx(-oracle, abs=1e-9)


def test_neg_mahalanobis_symmetric(rng):
    M = rng.normal(size=(20, 5))
    cov = ridge_covariance(list(M))
    u, v = rng.normal(size=5), rng.normal(size=5)
    a = componentwise_dependence(u, v, "neg_mahalanobis", cov=cov)
    b = componentwise_dependence(v, u, "neg_mahalanobis", cov=cov)
    assert a == pytest.approx(b, abs=1e-12)


def test_neg_mahalanobis_non_pd_cov_errors():
    with pytest.raises(ValueError):
        componentwise_dependence(np.ones(2), np.zeros(2), "neg_mahalanobis",
                                 cov=np.array([[1.0, 2.0], [2.0, 1.0]]))


@settings(max_examples=25)
@given(
    a=st.floats(min_value=0.1, max_value=10.0),
    b=st.floats(min_value=-5.0, max_value=5.0),
    c=st.floats(min_value=-10.0, max_value=-0.1),
    d=st.floats(min_value=-5.0, max_value=5.0),
)
def test_dcor_invariant_under_independent_affine_maps(a, b, c, d):
    rng = np.random.default_rng(7)
    u = rng.normal(size=10)
    v = rng.normal(size=10)
    base = componentwise_dependence(u, v, "distance_correlation")
    mapped = componentwise_dependence(a * u + b, c * v + d, "distance_correlation")
    assert mapped == pytest.approx(base, abs=1e-9)


def _orthonormal_store():
    return EmbeddingStore(
        dimension=2,
        entries={"s1": np.array([1.0, 0.0]), "s2": np.array([0.0, 1.0]),
                 "t1": np.array([1.0, 0.0]), "t2": np.array([0.0, 1.0])},
        name="toy",
    )


def _two_by_two_ds():
    return RelationDataset(
        "toy", ["t1", "t2"],
        [Record("s1", "t1", 1.0), Record("s2", "t2", 1.0)],
    )


def test_build_matrix_orthonormal_cosine_identity_pattern():
    assoc = build_association_matrix(_orthonormal_store(), _two_by_two_ds(), "cosine")
    assert np.allclose(assoc.values, np.eye(2))
    assert assoc.model == "toy" and assoc.method == "cosine"


def test_build_matrix_drops_missing_words_with_warning(caplog):
    store = _orthonormal_store()
    ds = RelationDataset(
        "toy", ["t1", "t2"],
        [Record("s1", "t1", 1.0), Record("unknown thing", "t2", 1.0)],
    )
    with caplog.at_level("WARNING"):
        assoc = build_association_matrix(store, ds, "cosine")
    assert assoc.sources == ["s1"]
    assert assoc.dropped_sources == ["unknown thing"]


def test_build_matrix_empty_vocabulary_errors():
    store = _orthonormal_store()
    ds = RelationDataset("toy", ["t1"], [Record("zzz", "t1", 1.0)])
    with pytest.raises(ValueError, match="no resolvable"):
        build_association_matrix(store, ds, "cosine")


def test_singleton_contextual_sets_reduce_to_static(rng):
    words = {"s1": rng.normal(size=4), "s2": rng.normal(size=4)}
    tgts = {"t1": rng.normal(size=4), "t2": rng.normal(size=4)}
    src_set = ContextualVectorSet({w: [("tpl0", v)] for w, v in words.items()}, 4, model="ctx")
    tgt_set = ContextualVectorSet({w: [("tpl0", v)] for w, v in tgts.items()}, 4, model="ctx")
    store = EmbeddingStore(4, {**words, **tgts}, name="static")
    ds = _two_by_two_ds()
    ctx = build_association_matrix((src_set, tgt_set), ds, "set_mean_cosine")
    static = build_association_matrix(store, ds, "cosine")
    assert np.array_equal(ctx.values, static.values)


def test_build_matrix_contextual_cell_oracle(rng):
    src_set = ContextualVectorSet(
        {"s1": [("a", rng.normal(size=3)), ("b", rng.normal(size=3))],
         "s2": [("a", rng.normal(size=3))]},
        3, model="ctx")
    tgt_set = ContextualVectorSet(
        {"t1": [("a", rng.normal(size=3)), ("b", rng.normal(size=3))],
         "t2": [("a", rng.normal(size=3))]},
        3, model="ctx")
    assoc = build_association_matrix((src_set, tgt_set), _two_by_two_ds(), "set_mean_cosine")
    for i, s in enumerate(["s1", "s2"]):
        for j, t in enumerate(["t1", "t2"]):
            X = [v for _, v in src_set.data[s]]
            A = [v for _, v in tgt_set.data[t]]
            assert assoc.values[i, j] == pytest.approx(
                oracles.naive_set_mean_cosine(X, A), abs=1e-12)


def test_build_matrix_room_fixture_seeded_embeddings_cell_oracle(data_dir, rng):
    from relprobe.datasets import load_dataset

    ds = load_dataset(data_dir / "room.json")
    vocab = ds.sources + ds.targets
    store = EmbeddingStore(8, {w: rng.normal(size=8) for w in vocab}, name="synthetic")
    assoc = build_association_matrix(store, ds, "cosine")
    assert assoc.sources == ds.sources and assoc.targets == ds.targets
    for i in (0, 17, 49):
        for j in (0, 4):
            expected = oracles.naive_cosine(
                list(store.get(assoc.sources[i])), list(store.get(assoc.targets[j])))
            assert assoc.values[i, j] == pytest.approx(expected, abs=1e-12)


def test_association_matrix_rejects_non_finite():
    with pytest.raises(ValueError, match="non-finite"):
        AssociationMatrix(sources=["s"], targets=["t"], values=np.array([[np.nan]]))


def test_contextual_roundtrip(tmp_path, rng):
    vset = ContextualVectorSet(
        {"w1": [("t0", rng.normal(size=3)), ("t1", rng.normal(size=3))],
         "w2": [("t0", rng.normal(size=3))]},
        3, model="m", meta={"layer": "final"})
    path = tmp_path / "ctx.jsonl"
    save_contextual_vectors(vset, path)
    again = load_contextual_vectors(path)
    assert again.model == "m" and again.dimension == 3
    assert set(again.data) == {"w1", "w2"}
    assert np.allclose(again.vectors_of("w1"), vset.vectors_of("w1"))


def test_contextual_dimension_mismatch_rejected(tmp_path):
    path = tmp_path / "ctx.jsonl"
    path.write_text(
        '{"format": "contextual-vectors", "version": 1, "model": "m", "dimension": 2}\n'
        '{"word": "w", "template_id": "t", "vector": [1.0, 2.0, 3.0]}\n',
        encoding="utf-8")
    with pytest.raises(ValueError, match="dimension"):
        load_contextual_vectors(path)
