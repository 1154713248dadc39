"""Simulated psychiatric consultation training platform."""

from psytrain.kb import KnowledgeBase, load_kb

__version__ = "0.1.0"

__all__ = ["KnowledgeBase", "load_kb", "__version__"]
