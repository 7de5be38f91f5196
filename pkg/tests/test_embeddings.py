import numpy as np
import pytest

from relprobe.embeddings import (
    EmbeddingFormatError,
    load_static_embeddings,
    lookup_phrase,
    sniff_embedding_format,
)

from conftest import write_embedding_file


def test_headerless_two_rows(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0", "b 0 1"])
    store = load_static_embeddings(path)
    assert store.dimension == 2
    assert len(store) == 2
    assert np.array_equal(store.get("a"), [1.0, 0.0])


def test_vocab_filter(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0", "b 0 1"])
    store = load_static_embeddings(path, vocab_filter={"a"})
    assert len(store) == 1
    assert "b" not in store


def test_malformed_middle_row_skipped(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0", "c 1", "b 0 1"])
    store = load_static_embeddings(path)
    assert len(store) == 2
    assert store.skipped_rows == 1


def test_header_format(tmp_path):
    path = write_embedding_file(tmp_path / "e.vec", ["a 1 0 3", "b 0 1 4"], header="2 3")
    assert sniff_embedding_format(path) == "text-with-header"
    store = load_static_embeddings(path, format="text-with-header")
    assert store.dimension == 3 and len(store) == 2


def test_sniff_headerless(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0", "b 0 1"])
    assert sniff_embedding_format(path) == "text-headerless"


def test_nonfinite_rows_rejected(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0", "b nan 1", "c inf 2"])
    store = load_static_embeddings(path)
    assert len(store) == 1
    assert store.skipped_rows == 2


def test_duplicate_keeps_first(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0", "a 9 9"])
    store = load_static_embeddings(path)
    assert np.array_equal(store.get("a"), [1.0, 0.0])
    assert store.skipped_rows == 1


def test_empty_after_filter_errors(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0"])
    with pytest.raises(EmbeddingFormatError):
        load_static_embeddings(path, vocab_filter={"zzz"})


def test_crlf_accepted(tmp_path):
    path = tmp_path / "e.txt"
    path.write_bytes(b"a 1 0\r\nb 0 1\r\n")
    store = load_static_embeddings(path)
    assert len(store) == 2 and store.skipped_rows == 0


def test_lookup_direct_hit_bit_exact(tiny_store):
    vec = lookup_phrase(tiny_store, "a")
    assert vec is tiny_store.get("a")


def test_lookup_mean_of_components(tiny_store):
    vec = lookup_phrase(tiny_store, "a b")
    assert np.array_equal(vec, [0.5, 0.5])


def test_lookup_partial_phrase_falls_back_to_present_token(tiny_store):
    # independent summation oracle over the in-vocab subset {a}
    vec = lookup_phrase(tiny_store, "a c")
    assert np.array_equal(vec, tiny_store.get("a"))


def test_lookup_underscore_join_preferred(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["new 1 0", "york 0 1", "new_york 5 5"])
    store = load_static_embeddings(path)
    assert np.array_equal(lookup_phrase(store, "new york"), [5.0, 5.0])


def test_lookup_whole_phrase_beats_components(tmp_path):
    path = write_embedding_file(tmp_path / "e.txt", ["a 1 0", "b 0 1"])
    store = load_static_embeddings(path)
    store.entries["a b"] = np.array([9.0, 9.0])
    assert np.array_equal(lookup_phrase(store, "a b"), [9.0, 9.0])


def test_lookup_absent(tiny_store):
    assert lookup_phrase(tiny_store, "zzz yyy") is None


def test_lookup_lowercase_flag(tiny_store):
    assert lookup_phrase(tiny_store, "A") is not None
    assert lookup_phrase(tiny_store, "A", lowercase=False) is None


def test_lookup_deterministic_idempotent(tiny_store):
    v1 = lookup_phrase(tiny_store, "a b")
    v2 = lookup_phrase(tiny_store, "a b")
    assert np.array_equal(v1, v2)


def test_mean_matches_summation_oracle(rng):
    from relprobe.embeddings import EmbeddingStore

    dim = 7
    tokens = [f"w{i}" for i in range(5)]
    entries = {t: rng.normal(size=dim) for t in tokens}
    store = EmbeddingStore(dimension=dim, entries=entries)
    vec = lookup_phrase(store, " ".join(tokens))
    oracle = [sum(entries[t][k] for t in tokens) / len(tokens) for k in range(dim)]
    assert np.allclose(vec, oracle, rtol=1e-12, atol=0)
