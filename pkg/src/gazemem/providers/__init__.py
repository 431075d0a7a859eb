"""Model-backed operations: region proposal, description, answering, judging, embedding."""

from .base import (
    JudgeVerdict,
    ProviderConfig,
    ProviderError,
    ProviderParseError,
    ProviderTransportError,
    Providers,
    judge_short_circuit,
    normalize_answer,
)
from .mock import (
    EMPTY_SCENE_TEXT,
    MOCK_EMBED_DIM,
    UNREADABLE_REGION_TEXT,
    MockProviders,
    hash_embedding,
    load_fixtures,
    mock_answer_key,
    mock_image_key,
    mock_judge_key,
)
from .parsing import boxes_from_payload, parse_box_proposals
from .prompts import TEMPLATES, PromptKind, PromptRenderError, placeholders, render
from .remote import RemoteProviders, config_from_env

__all__ = [
    "EMPTY_SCENE_TEXT",
    "MOCK_EMBED_DIM",
    "TEMPLATES",
    "UNREADABLE_REGION_TEXT",
    "JudgeVerdict",
    "MockProviders",
    "PromptKind",
    "PromptRenderError",
    "ProviderConfig",
    "ProviderError",
    "ProviderParseError",
    "ProviderTransportError",
    "Providers",
    "RemoteProviders",
    "boxes_from_payload",
    "config_from_env",
    "hash_embedding",
    "judge_short_circuit",
    "load_fixtures",
    "mock_answer_key",
    "mock_image_key",
    "mock_judge_key",
    "normalize_answer",
    "parse_box_proposals",
    "placeholders",
    "render",
]
