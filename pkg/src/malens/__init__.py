"""malens: nearest-token analysis, probing, and ASR scoring for spoken
language model adapter representations."""

__version__ = "0.1.0"
