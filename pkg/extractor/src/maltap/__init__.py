"""Extraction side of the interchange contract: dumps embedding matrices,
representation sequences, and provider fixtures that the analysis toolkit
consumes as files."""

__version__ = "0.1.0"
