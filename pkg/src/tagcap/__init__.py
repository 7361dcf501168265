"""Tag-to-caption toolkit: LLM pseudo-caption generation, caption quality
metrics, balanced sampling, and a pairwise A-vs-B rating service."""

__version__ = "0.1.0"
