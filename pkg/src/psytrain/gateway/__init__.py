from psytrain.gateway.gateway import Gateway, ProviderConfig
from psytrain.gateway.prompts import PromptLayer, PromptTemplate, render_prompt, single_layer
from psytrain.gateway.providers import (
    HttpProvider,
    Provider,
    ProviderRequest,
    ProviderResponse,
    ScriptedProvider,
    UNSCRIPTED_MARKER,
    load_script,
    prompt_digest,
)

__all__ = [
    "Gateway",
    "ProviderConfig",
    "PromptLayer",
    "PromptTemplate",
    "render_prompt",
    "single_layer",
    "HttpProvider",
    "Provider",
    "ProviderRequest",
    "ProviderResponse",
    "ScriptedProvider",
    "UNSCRIPTED_MARKER",
    "load_script",
    "prompt_digest",
]
