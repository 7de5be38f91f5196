"""Export operations: contextual vector sets and probability tables."""

from __future__ import annotations

from .backends import LMBackend
from .templates import (
    CLM_PROMPT_TEMPLATES,
    MLM_PAIR_TEMPLATES,
    PairTemplate,
    PromptTemplate,
    WordTemplate,
    designated_word,
)
from .writers import write_contextual_vectors, write_probability_table


def _base_meta(backend: LMBackend) -> dict:
    return {"model_id": backend.model_id, "revision": backend.revision}


def export_contextual_vectors(backend: LMBackend, words: list[str],
                              templates: list[WordTemplate], out_path) -> int:
    """One record per (word, template): subword-max over final-layer states.

    Returns the record count.
    """
    records = []
    dimension = None
    for word in words:
        for tpl in templates:
            sentence, start, end = tpl.fill(word)
            vec = backend.word_vector(sentence, (start, end))
            dimension = len(vec)
            records.append({"word": word, "template_id": tpl.id, "vector": vec})
    if dimension is None:
        raise ValueError("no words to export")
    meta = _base_meta(backend)
    meta.update({"layer": "final", "pooling": "subword-max",
                 "templates": [t.id for t in templates]})
    write_contextual_vectors(out_path, backend.model_id, dimension, records, meta)
    return len(records)


def _mlm_records(backend: LMBackend, ds: dict, direction: str,
                 template: PairTemplate) -> list[dict]:
    mask = backend.tokenizer.mask_token
    masked_slot = "tgt" if direction == "mask_target" else "src"
    slot_index = template.slot_order().index(masked_slot)
    kind = "mlm_target" if direction == "mask_target" else "mlm_source"
    prior_sentence = template.fill(src=None, tgt=None, mask_token=mask)
    records = []
    for source in ds["sources"]:
        for target in ds["targets"]:
            if direction == "mask_target":
                role, word = "target", target
                filled = template.fill(src=source, tgt=None, mask_token=mask)
            else:
                role, word = "source", source
                filled = template.fill(src=None, tgt=target, mask_token=mask)
            token_id = backend.first_token_id(designated_word(word, role))
            prob = backend.mask_token_prob(filled, token_id, mask_index=0)
            prior = backend.mask_token_prob(prior_sentence, token_id, mask_index=slot_index)
            records.append({"kind": kind, "template_id": template.id,
                            "source": source, "target": target,
                            "prob": prob, "prior_prob": prior})
    return records


def export_mlm_probs(backend: LMBackend, ds: dict, direction: str, out_path,
                     template: PairTemplate | None = None) -> int:
    """Masked-word probabilities with doubly-masked priors for every pair.

    direction mask_target scores the target slot given the filled source,
    mask_source the reverse, both emits the two kinds into one table. The
    prior masks both slots and scores the same token at the same slot.
    """
    if direction not in ("mask_target", "mask_source", "both"):
        raise ValueError(f"unknown MLM direction: {direction!r}")
    template = template or MLM_PAIR_TEMPLATES[ds["relation"]]
    directions = ["mask_target", "mask_source"] if direction == "both" else [direction]
    records = []
    for d in directions:
        records.extend(_mlm_records(backend, ds, d, template))
    meta = _base_meta(backend)
    meta.update({"directions": directions, "template": template.text})
    write_probability_table(out_path, backend.model_id, records, meta)
    return len(records)


def export_clm_probs(backend: LMBackend, ds: dict, direction: str, out_path,
                     templates: list[PromptTemplate] | None = None) -> int:
    """Next-token probabilities with neutral-prompt priors for every pair.

    Writes no records for a direction the relation has no template for (the
    scoring engine treats that as a legitimately absent matrix, e.g.
    predict_target on the verb relation).
    """
    if direction not in ("predict_target", "predict_source", "both"):
        raise ValueError(f"unknown CLM direction: {direction!r}")
    all_templates = templates or CLM_PROMPT_TEMPLATES[ds["relation"]]
    if direction == "both":
        battery = all_templates
    else:
        wanted = "target" if direction == "predict_target" else "source"
        battery = [t for t in all_templates if t.predicts == wanted]
    records = []
    neutral_prompts = {}
    for tpl in battery:
        for source in ds["sources"]:
            for target in ds["targets"]:
                given = source if tpl.predicts == "target" else target
                predicted = target if tpl.predicts == "target" else source
                scored = designated_word(predicted, tpl.predicts)
                token_id = backend.first_token_id(scored)
                prompt, neutral = tpl.fill(given, predicted_article_word=scored)
                prob = backend.next_token_prob(prompt, token_id)
                prior = backend.next_token_prob(neutral, token_id)
                records.append({"kind": "clm_next", "template_id": tpl.id,
                                "source": source, "target": target,
                                "prob": prob, "prior_prob": prior})
        neutral_prompts[tpl.id] = tpl.neutral
    meta = _base_meta(backend)
    meta.update({"direction": direction, "neutral_prompts": neutral_prompts})
    write_probability_table(out_path, backend.model_id, records, meta)
    return len(records)


def export_relation_probs(backend: LMBackend, pairs: list[tuple[str, str]],
                          candidates: list[str], template_id: str, template_text: str,
                          out_path) -> int:
    """Masked-relation candidate probabilities per (source, target) pair.

    template_text contains {src}, {tgt} and {rel}; the relation slot is
    masked and each candidate's first token is scored there. Records use the
    compound template id `<template_id>|<candidate>`.
    """
    if "{rel}" not in template_text:
        raise ValueError("relation template must contain {rel}")
    mask = backend.tokenizer.mask_token
    records = []
    for source, target in pairs:
        sentence = (template_text.replace("{src}", source)
                    .replace("{tgt}", target).replace("{rel}", mask))
        for cand in candidates:
            token_id = backend.first_token_id(designated_word(cand, "target"))
            prob = backend.mask_token_prob(sentence, token_id, mask_index=0)
            records.append({"kind": "mlm_target",
                            "template_id": f"{template_id}|{cand}",
                            "source": source, "target": target, "prob": prob})
    meta = _base_meta(backend)
    meta.update({"template": template_text, "candidates": candidates})
    write_probability_table(out_path, backend.model_id, records, meta)
    return len(records)
