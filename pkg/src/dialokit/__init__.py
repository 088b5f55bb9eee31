"""dialokit: deterministic preprocessing and evaluation toolkit for dialogue
summarization corpora."""

__version__ = "0.1.0"
