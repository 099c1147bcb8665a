"""Corpus refinement, augmentation, and evaluation toolkit for low-resource MT."""

from .corpus import (
    Corpus,
    MonoCorpus,
    Provenance,
    SentencePair,
    StageReport,
    StatsReport,
    corpus_stats,
    read_parallel,
    write_parallel,
)

__all__ = [
    "Corpus",
    "MonoCorpus",
    "Provenance",
    "SentencePair",
    "StageReport",
    "StatsReport",
    "corpus_stats",
    "read_parallel",
    "write_parallel",
]

__version__ = "0.1.0"
