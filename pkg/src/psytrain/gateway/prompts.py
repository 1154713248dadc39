"""Layered prompt templates and rendering.

A template is an ordered stack of layers (framework, content, style); rendering
substitutes named ``{placeholder}`` tokens and concatenates the layers in
declared order.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from psytrain.errors import MissingPlaceholder

logger = logging.getLogger(__name__)

LAYER_NAMES = ("framework", "content", "style")

_PLACEHOLDER_RE = re.compile(r"\{([a-zA-Z_][a-zA-Z0-9_]*)\}")


@dataclass(frozen=True)
class PromptLayer:
    name: str
    body: str


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    layers: tuple[PromptLayer, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.layers:
            raise ValueError("template needs at least one layer")
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise ValueError("layer names must be unique")
        for name in names:
            if name not in LAYER_NAMES:
                raise ValueError(f"unknown layer name '{name}'")

    def placeholders(self) -> set[str]:
        found: set[str] = set()
        for layer in self.layers:
            found.update(_PLACEHOLDER_RE.findall(layer.body))
        return found


def render_prompt(template: PromptTemplate, params: dict[str, str]) -> str:
    """Substitute params into every layer and join layers in declared order.

    Pure: identical inputs produce byte-identical output. Unknown params are
    ignored (logged); a placeholder without a param raises MissingPlaceholder.
    """
    needed = template.placeholders()
    for name in sorted(needed):
        if name not in params:
            raise MissingPlaceholder(name)
    extra = set(params) - needed
    if extra:
        logger.debug("ignoring unknown prompt params: %s", sorted(extra))

    parts = []
    for layer in template.layers:
        body = _PLACEHOLDER_RE.sub(lambda m: params[m.group(1)], layer.body)
        parts.append(body)
    return "\n".join(parts)


def single_layer(template_id: str, body: str, layer: str = "content") -> PromptTemplate:
    return PromptTemplate(id=template_id, layers=(PromptLayer(layer, body),))
