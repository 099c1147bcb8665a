"""Semantic-similarity denoising with pluggable sentence-embedding scorers.

The embedding model itself stays outside the toolkit. Two scorer transports
cover the common setups: pre-computed per-line embedding files, and an
external command that reads TSV pairs on stdin and emits one score per line.
Pairs scoring below the threshold (default 0.7) are excluded; scoring is a
pure annotation that never reorders or rewrites pairs.
"""

from __future__ import annotations

import math
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .corpus import Corpus, SentencePair, StageReport
from .errors import CorpusFormatError, StageError


@dataclass(frozen=True)
class DenoiseConfig:
    threshold: float = 0.7

    def __post_init__(self) -> None:
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [-1, 1], got {self.threshold}")


def cosine_similarity(a: list[float], b: list[float]) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("vectors must have dimension >= 1")
    dot = math.fsum(x * y for x, y in zip(a, b))
    norm_a = math.sqrt(math.fsum(x * x for x in a))
    norm_b = math.sqrt(math.fsum(y * y for y in b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return max(-1.0, min(1.0, dot / (norm_a * norm_b)))


class SimilarityScorer(Protocol):
    def score(self, corpus: Corpus) -> list[float]: ...


def _read_vectors(path: Path) -> list[list[float]]:
    vectors = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            fields = line.split()
            try:
                vectors.append([float(x) for x in fields])
            except ValueError:
                raise CorpusFormatError(
                    f"{path}:{lineno}: non-numeric embedding component"
                ) from None
    return vectors


@dataclass(frozen=True)
class EmbeddingFileScorer:
    """Scores pairs by cosine similarity of pre-computed per-line embeddings."""

    source_path: Path
    target_path: Path

    def score(self, corpus: Corpus) -> list[float]:
        src = _read_vectors(Path(self.source_path))
        tgt = _read_vectors(Path(self.target_path))
        for name, vecs in (("source", src), ("target", tgt)):
            if len(vecs) != len(corpus):
                raise CorpusFormatError(
                    f"{name} embedding file has {len(vecs)} lines, corpus has "
                    f"{len(corpus)} pairs"
                )
        return [cosine_similarity(a, b) for a, b in zip(src, tgt)]


@dataclass(frozen=True)
class ExternalScorer:
    """Scores pairs via an external command: TSV pairs in, one score per line out."""

    command: str

    def score(self, corpus: Corpus) -> list[float]:
        payload = "".join(f"{p.source}\t{p.target}\n" for p in corpus)
        result = subprocess.run(
            shlex.split(self.command),
            input=payload,
            capture_output=True,
            text=True,
        )
        if result.returncode != 0:
            raise StageError(
                f"scorer command {self.command!r} exited with "
                f"{result.returncode}: {result.stderr.strip()}"
            )
        lines = result.stdout.splitlines()
        if len(lines) != len(corpus):
            raise StageError(
                f"scorer emitted {len(lines)} scores for {len(corpus)} pairs"
            )
        scores = []
        for lineno, line in enumerate(lines, start=1):
            try:
                scores.append(float(line.strip()))
            except ValueError:
                raise StageError(
                    f"scorer output line {lineno} is not a number: {line!r}"
                ) from None
        return scores


def score_corpus(corpus: Corpus, scorer: SimilarityScorer) -> Corpus:
    """Annotate every pair with its similarity score; contents and order unchanged."""
    scores = scorer.score(corpus)
    return corpus.with_pairs(
        SentencePair(p.source, p.target, p.provenance, p.align_score, s)
        for p, s in zip(corpus, scores)
    )


def filter_by_similarity(
    corpus: Corpus, cfg: DenoiseConfig | None = None
) -> tuple[Corpus, StageReport]:
    """Drop pairs whose similarity score falls below the threshold."""
    cfg = cfg or DenoiseConfig()
    for i, p in enumerate(corpus):
        if p.sim_score is None:
            raise ValueError(f"pair {i} has no similarity score; run score_corpus first")
    kept = [p for p in corpus if p.sim_score >= cfg.threshold]
    report = StageReport(
        stage="denoise",
        input_count=len(corpus),
        output_count=len(kept),
        removed={"below_threshold": len(corpus) - len(kept)},
    )
    return corpus.with_pairs(kept), report
