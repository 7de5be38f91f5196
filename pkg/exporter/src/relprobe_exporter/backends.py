"""Thin inference wrappers around huggingface masked and causal LMs.

Everything runs in eval mode under no_grad on CPU; probabilities are
computed with a float64 softmax so they never underflow to zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModelForCausalLM, AutoModelForMaskedLM, AutoTokenizer

LOCKFILE = Path(__file__).resolve().parent.parent.parent / "models.lock.json"


def pinned_revision(model_id: str) -> str | None:
    """Revision pinned in the repo lockfile, if any."""
    if LOCKFILE.exists():
        locked = json.loads(LOCKFILE.read_text(encoding="utf-8"))
        return locked.get(model_id)
    return None


@dataclass
class LMBackend:
    """A loaded model + tokenizer pair of a fixed kind ('mlm' or 'clm')."""

    model: object
    tokenizer: object
    kind: str
    model_id: str
    revision: str = "unpinned"
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def load(cls, model_id: str, kind: str, revision: str | None = None) -> "LMBackend":
        if kind not in ("mlm", "clm"):
            raise ValueError(f"unknown backend kind: {kind!r}")
        revision = revision or pinned_revision(model_id)
        kwargs = {"revision": revision} if revision else {}
        tokenizer = AutoTokenizer.from_pretrained(model_id, **kwargs)
        loader = AutoModelForMaskedLM if kind == "mlm" else AutoModelForCausalLM
        model = loader.from_pretrained(model_id, **kwargs)
        model.eval()
        return cls(model=model, tokenizer=tokenizer, kind=kind, model_id=model_id,
                   revision=revision or "unpinned")

    def first_token_id(self, word: str, prefix_space: bool = True) -> int:
        """Vocabulary id of the word's first subword piece (mid-sentence form)."""
        text = (" " + word) if prefix_space else word
        ids = self.tokenizer(text, add_special_tokens=False)["input_ids"]
        if not ids:
            raise ValueError(f"{word!r} tokenizes to nothing")
        return ids[0]

    def token_string(self, token_id: int) -> str:
        return self.tokenizer.convert_ids_to_tokens([token_id])[0]

    def final_hidden_states(self, sentence: str) -> tuple[np.ndarray, list[tuple[int, int]]]:
        """Final-layer hidden states and character offsets per token."""
        enc = self.tokenizer(sentence, return_offsets_mapping=True, return_tensors="pt",
                             add_special_tokens=self.kind == "mlm")
        offsets = [tuple(o) for o in enc.pop("offset_mapping")[0].tolist()]
        with torch.no_grad():
            out = self.model(**enc, output_hidden_states=True)
        hidden = out.hidden_states[-1][0].to(torch.float32).numpy()
        return hidden, offsets

    def word_vector(self, sentence: str, span: tuple[int, int]) -> np.ndarray:
        """Elementwise max over the hidden states of the span's subword positions."""
        hidden, offsets = self.final_hidden_states(sentence)
        start, end = span
        rows = [i for i, (s, e) in enumerate(offsets)
                if e > s and s < end and e > start]
        if not rows:
            raise ValueError(
                f"word at {span} of {sentence!r} tokenizes to zero in-sentence positions")
        return hidden[rows].max(axis=0)

    def mask_token_prob(self, sentence: str, token_id: int, mask_index: int = 0) -> float:
        """P(mask = token) at the mask_index-th mask token of the sentence."""
        if self.kind != "mlm":
            raise ValueError("mask probabilities need an MLM backend")
        enc = self.tokenizer(sentence, return_tensors="pt")
        ids = enc["input_ids"][0]
        mask_positions = (ids == self.tokenizer.mask_token_id).nonzero(as_tuple=True)[0]
        if len(mask_positions) <= mask_index:
            raise ValueError(
                f"sentence {sentence!r} has {len(mask_positions)} mask tokens, "
                f"needed index {mask_index}")
        with torch.no_grad():
            logits = self.model(**enc).logits[0]
        row = logits[mask_positions[mask_index]].to(torch.float64)
        probs = torch.softmax(row, dim=-1)
        return float(probs[token_id])

    def next_token_prob(self, prompt: str, token_id: int) -> float:
        """P(next = token) after the prompt."""
        if self.kind != "clm":
            raise ValueError("next-token probabilities need a CLM backend")
        enc = self.tokenizer(prompt, return_tensors="pt", add_special_tokens=False)
        with torch.no_grad():
            logits = self.model(**enc).logits[0]
        row = logits[-1].to(torch.float64)
        probs = torch.softmax(row, dim=-1)
        return float(probs[token_id])
