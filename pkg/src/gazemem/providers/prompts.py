"""Prompt templates, one per model-backed operation kind.

The wording here is this project's own; rendering fails loudly when a
placeholder is left unbound.
"""

from __future__ import annotations

import enum
import string


class PromptKind(enum.Enum):
    REGION_PROPOSE = "region_propose"
    FOCAL_DESCRIBE = "focal_describe"
    BACKGROUND_SUMMARIZE = "background_summarize"
    ANSWER_SYNTHESIZE = "answer_synthesize"
    JUDGE = "judge"


class PromptRenderError(ValueError):
    """A template placeholder was left unbound (or an unknown one supplied)."""


TEMPLATES: dict[PromptKind, str] = {
    PromptKind.REGION_PROPOSE: (
        "This is an egocentric photo. The viewer's focal region is the pixel box "
        "{focal_box} given as (x, y, width, height). List every object or text "
        "block a person fixating there would plausibly want to remember, "
        "including items only partially inside the focal box. Respond with ONLY "
        "a fenced JSON code block containing an array of [x, y, width, height] "
        "integer pixel boxes, one per target; use an empty array if there are none."
    ),
    PromptKind.FOCAL_DESCRIBE: (
        "The first image is the focal crop {focal_box} of an egocentric photo; "
        "the second is the surrounding context crop {contextual_box}. Describe "
        "exactly what the viewer is looking at, prioritizing legible text, "
        "labels, numbers, and fine visual detail from the focal crop, and using "
        "the context crop only to ground those details. Write at most {gamma} "
        "sentences."
    ),
    PromptKind.BACKGROUND_SUMMARIZE: (
        "Summarize the overall scene in this photo in at most {sentence_budget} "
        "sentences: the setting, notable surroundings, and anything that would "
        "help recall where this happened."
    ),
    PromptKind.ANSWER_SYNTHESIZE: (
        "You answer questions about a person's stored visual memories.\n"
        "Question: {question}\n\n"
        "Memory entries, most relevant first:\n{memories}\n\n"
        "Answer the question using only these memories{image_note}. "
        "If they do not contain the answer, say so plainly."
    ),
    PromptKind.JUDGE: (
        "Compare a generated answer against a reference answer. Reply with "
        "exactly one word: full if the generated answer conveys the same "
        "meaning as the reference (minor wording or formatting differences "
        "allowed), partial if it is partially correct or relevant, none if it "
        "is wrong or unrelated.\n\n"
        "Reference: {reference}\nGenerated: {generated}"
    ),
}

_FORMATTER = string.Formatter()


def placeholders(kind: PromptKind) -> set[str]:
    return {
        name
        for _, name, _, _ in _FORMATTER.parse(TEMPLATES[kind])
        if name is not None
    }


def render(kind: PromptKind, **values: object) -> str:
    """Render a template; every placeholder must be bound, no extras allowed."""
    wanted = placeholders(kind)
    got = set(values)
    if wanted - got:
        raise PromptRenderError(
            f"{kind.value}: unbound placeholders {sorted(wanted - got)}"
        )
    if got - wanted:
        raise PromptRenderError(
            f"{kind.value}: unknown placeholders {sorted(got - wanted)}"
        )
    return TEMPLATES[kind].format(**values)
