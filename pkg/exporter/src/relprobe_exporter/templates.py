"""Sentence template batteries and slot filling.

Slot syntax: `{x}` is the word slot of single-word templates, `{src}` and
`{tgt}` the pair slots. `{a}` / `{A}` resolve to the indefinite article of
the following slot's word (capitalized variant at sentence start); masked
slots always take the article `a`.
"""

from __future__ import annotations

from dataclasses import dataclass

_VOWELS = "aeiou"


def indefinite_article(word: str) -> str:
    """a/an by first-letter heuristic."""
    return "an" if word[:1].lower() in _VOWELS else "a"


@dataclass(frozen=True)
class WordTemplate:
    """Single-slot declarative template for contextual vector extraction."""

    id: str
    text: str  # contains {x}; may contain {a}/{A}

    def fill(self, word: str) -> tuple[str, int, int]:
        """Instantiate and return (sentence, span_start, span_end) of the word."""
        text = self.text.replace("{a}", indefinite_article(word))
        text = text.replace("{A}", indefinite_article(word).capitalize())
        start = text.index("{x}")
        sentence = text[:start] + word + text[start + len("{x}"):]
        return sentence, start, start + len(word)


NOUN_TEMPLATES = [
    WordTemplate("decl1", "This is {a} {x}."),
    WordTemplate("decl2", "That is {a} {x}."),
    WordTemplate("decl3", "There is {a} {x}."),
    WordTemplate("decl4", "Here is {a} {x}."),
    WordTemplate("decl5", "{A} {x} is here."),
    WordTemplate("decl6", "{A} {x} is there."),
]

VERB_TEMPLATES = [
    WordTemplate("verb1", "I {x} something."),
    WordTemplate("verb2", "I {x} anything."),
    WordTemplate("verb3", "I {x}."),
    WordTemplate("verb4", "You {x} something."),
    WordTemplate("verb5", "You {x} anything."),
    WordTemplate("verb6", "You {x}."),
]


def battery_for(relation: str, side: str) -> list[WordTemplate]:
    """Template battery for one side of a relation (verb targets are verbs)."""
    if relation == "verb" and side == "target":
        return VERB_TEMPLATES
    return NOUN_TEMPLATES


@dataclass(frozen=True)
class PairTemplate:
    """Two-slot template for masked-LM scoring.

    `{a_src}`/`{A_src}` and `{a_tgt}` resolve against the filled word, or to
    `a` when the slot is masked.
    """

    id: str
    text: str  # contains {src} and {tgt}

    def fill(self, src: str | None, tgt: str | None, mask_token: str) -> str:
        """Instantiate; None fills a slot with the mask token."""
        def article(word, cap=False):
            art = "a" if word is None else indefinite_article(word)
            return art.capitalize() if cap else art

        text = self.text
        text = text.replace("{A_src}", article(src, cap=True))
        text = text.replace("{a_src}", article(src))
        text = text.replace("{a_tgt}", article(tgt))
        text = text.replace("{src}", mask_token if src is None else src)
        text = text.replace("{tgt}", mask_token if tgt is None else tgt)
        return text

    def slot_order(self) -> list[str]:
        """Slot names by appearance; maps mask positions back to slots."""
        positions = {name: self.text.index("{" + name + "}") for name in ("src", "tgt")}
        return sorted(positions, key=positions.get)


MLM_PAIR_TEMPLATES = {
    "room": PairTemplate("room1", "{A_src} {src} is usually in the {tgt}."),
    "part": PairTemplate("part1", "{A_src} {src} is usually part of {a_tgt} {tgt}."),
    "verb": PairTemplate("verb1", "I usually {tgt} this {src}."),
}


@dataclass(frozen=True)
class PromptTemplate:
    """Incomplete-sentence template for causal-LM scoring.

    The id prefix (`pt:`/`ps:`) states which side the model predicts. The
    prompt mentions the given word; `{a_pred}` resolves to the article of
    the predicted word's designated token. `neutral` is the prior prompt
    with the given word replaced by a neutral equivalent.
    """

    id: str
    text: str     # contains {src} or {tgt}
    neutral: str

    @property
    def predicts(self) -> str:
        return "target" if self.id.startswith("pt:") else "source"

    def fill(self, given: str, predicted_article_word: str | None = None) -> tuple[str, str]:
        """Instantiate (prompt, neutral_prompt)."""
        slot = "{src}" if self.predicts == "target" else "{tgt}"

        def resolve(text: str, with_slot: bool) -> str:
            text = text.replace("{A_src}", indefinite_article(given).capitalize())
            if predicted_article_word is not None:
                text = text.replace("{a_pred}", indefinite_article(predicted_article_word))
            if with_slot:
                text = text.replace(slot, given)
            return text

        return resolve(self.text, True), resolve(self.neutral, False)


CLM_PROMPT_TEMPLATES = {
    "room": [
        PromptTemplate("pt:room1", "{A_src} {src} is usually in the",
                       "This is usually in the"),
        PromptTemplate("ps:room1", "In the {tgt} is usually {a_pred}",
                       "In here is usually {a_pred}"),
    ],
    "part": [
        PromptTemplate("pt:part1", "{A_src} {src} is usually part of a",
                       "This is usually part of a"),
        PromptTemplate("ps:part1", "In the {tgt} is usually {a_pred}",
                       "In here is usually {a_pred}"),
    ],
    # no easily applicable predict-target template exists for verbs
    "verb": [
        PromptTemplate("ps:verb1", "I usually {tgt} this", "I usually do this"),
    ],
}


def designated_word(phrase: str, role: str) -> str:
    """The scored word of a (possibly multiword) phrase.

    Sources score their last word (the head noun, e.g. `curtain` of
    `shower curtain`); targets their first (the discriminating modifier,
    e.g. `living` of `living room`).
    """
    words = phrase.split()
    if not words:
        raise ValueError("empty phrase")
    if role == "source":
        return words[-1]
    if role == "target":
        return words[0]
    raise ValueError(f"unknown role: {role!r}")
