import json
import sys
from pathlib import Path

import pytest
import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import (
    BertConfig,
    BertForMaskedLM,
    BertTokenizerFast,
    GPT2Config,
    GPT2LMHeadModel,
)

sys.path.insert(0, str(Path(__file__).resolve().parent))

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "a", "an", "the", "this", "that", "there", "here", "is", "in", "usually",
    "part", "of", "do", "i", "you", "something", "anything",
    "shower", "curtain", "sofa", "toilet", "bathroom", "living", "room",
    "kitchen", "bath", "##tub", "eat", "food", "near", ".", ",",
]


def _build_tokenizer() -> BertTokenizerFast:
    vocab = {w: i for i, w in enumerate(VOCAB)}
    backend = Tokenizer(models.WordPiece(vocab=vocab, unk_token="[UNK]"))
    backend.normalizer = normalizers.BertNormalizer(lowercase=True)
    backend.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    backend.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    return BertTokenizerFast(
        tokenizer_object=backend, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]")


@pytest.fixture(scope="session")
def tiny_mlm_dir(tmp_path_factory) -> str:
    out = tmp_path_factory.mktemp("tiny-mlm")
    torch.manual_seed(1234)
    model = BertForMaskedLM(BertConfig(
        vocab_size=len(VOCAB), hidden_size=24, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=48, max_position_embeddings=64))
    model.save_pretrained(out)
    _build_tokenizer().save_pretrained(out)
    return str(out)


@pytest.fixture(scope="session")
def tiny_clm_dir(tmp_path_factory) -> str:
    out = tmp_path_factory.mktemp("tiny-clm")
    torch.manual_seed(4321)
    model = GPT2LMHeadModel(GPT2Config(
        vocab_size=len(VOCAB), n_embd=24, n_layer=2, n_head=2, n_positions=64,
        bos_token_id=VOCAB.index("[CLS]"), eos_token_id=VOCAB.index("[SEP]")))
    model.save_pretrained(out)
    _build_tokenizer().save_pretrained(out)
    return str(out)


@pytest.fixture(scope="session")
def room_dataset(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("data") / "mini_room.json"
    path.write_text(json.dumps({
        "relation": "room",
        "targets": ["bathroom", "living room"],
        "records": [
            {"source": "shower curtain", "target": "bathroom", "gold": 1.0},
            {"source": "toilet", "target": "bathroom", "gold": 0.9},
            {"source": "sofa", "target": "living room", "gold": 0.8},
        ],
    }), encoding="utf-8")
    return str(path)


@pytest.fixture(scope="session")
def verb_dataset(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("data") / "mini_verb.json"
    path.write_text(json.dumps({
        "relation": "verb",
        "targets": ["eat"],
        "records": [{"source": "food", "target": "eat", "gold": 0.13}],
    }), encoding="utf-8")
    return str(path)
