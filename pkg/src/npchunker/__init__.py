"""Probabilistic chunking and finite-state noun-phrase extraction for
LOB-tagged English, trained and evaluated on SUSANNE-format treebanks."""

__version__ = "0.1.0"
