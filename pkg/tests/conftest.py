import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def write_embedding_file(path: Path, rows: list[str], header: str | None = None) -> Path:
    lines = ([header] if header is not None else []) + rows
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture()
def tiny_store(tmp_path):
    from relprobe.embeddings import load_static_embeddings

    path = write_embedding_file(
        tmp_path / "tiny.txt",
        ["a 1 0", "b 0 1", "d 1 1"],
    )
    return load_static_embeddings(path)
