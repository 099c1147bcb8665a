"""Bitext data model and corpus file I/O.

The atom is a SentencePair carrying provenance and optional quality scores.
Corpora are immutable ordered sequences; stage determinism is defined over
that order. Interchange formats:

  plain TSV      source TAB target, one pair per line, LF line ends
  extended TSV   header line "#bitext-v1", then
                 source TAB target TAB provenance TAB align_score TAB sim_score
                 (score columns empty when unset)
  two-file       two aligned plain-text files with equal line counts

Writers pick the extended variant automatically when a corpus carries
non-default provenance or scores; readers detect it by the header line.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import CorpusFormatError

_LANG_CODE_RE = re.compile(r"[a-z]{2,8}")

EXTENDED_TSV_HEADER = "#bitext-v1"


def validate_lang_code(code: str) -> str:
    if not _LANG_CODE_RE.fullmatch(code):
        raise ValueError(f"invalid language code {code!r}: expected 2-8 lowercase letters")
    return code


class Provenance(Enum):
    AUTHENTIC = "authentic"
    FORWARD_SYNTHETIC = "forward_synthetic"
    BACK_SYNTHETIC = "back_synthetic"
    TRANSDUCTIVE = "transductive"


def _check_text(text: str, side: str) -> None:
    if "\n" in text or "\r" in text:
        raise ValueError(f"{side} text contains a line break: {text!r}")


def _check_score(value: float | None, name: str) -> None:
    if value is not None and not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SentencePair:
    source: str
    target: str
    provenance: Provenance = Provenance.AUTHENTIC
    align_score: float | None = None
    sim_score: float | None = None

    def __post_init__(self) -> None:
        _check_text(self.source, "source")
        _check_text(self.target, "target")
        _check_score(self.align_score, "align_score")
        _check_score(self.sim_score, "sim_score")


@dataclass(frozen=True)
class Corpus:
    source_lang: str
    target_lang: str
    pairs: tuple[SentencePair, ...] = ()

    def __post_init__(self) -> None:
        validate_lang_code(self.source_lang)
        validate_lang_code(self.target_lang)
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def with_pairs(self, pairs) -> "Corpus":
        return replace(self, pairs=tuple(pairs))


@dataclass(frozen=True)
class MonoCorpus:
    lang: str
    lines: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        validate_lang_code(self.lang)
        object.__setattr__(self, "lines", tuple(self.lines))
        for line in self.lines:
            _check_text(line, "mono")

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)


@dataclass(frozen=True)
class StatsReport:
    total: int
    by_provenance: dict[str, int] = field(default_factory=dict)
    source_tokens: int = 0
    target_tokens: int = 0


@dataclass(frozen=True)
class StageReport:
    """Per-stage accounting: what went in, what survived, what each rule removed."""

    stage: str
    input_count: int
    output_count: int
    removed: dict[str, int] = field(default_factory=dict)

    @property
    def total_removed(self) -> int:
        return self.input_count - self.output_count


def concat_corpora(corpora: list[Corpus]) -> Corpus:
    """Concatenate corpora of the same direction, preserving order."""
    if not corpora:
        raise ValueError("cannot concatenate zero corpora")
    first = corpora[0]
    for c in corpora[1:]:
        if (c.source_lang, c.target_lang) != (first.source_lang, first.target_lang):
            raise ValueError(
                f"direction mismatch: {c.source_lang}-{c.target_lang} vs "
                f"{first.source_lang}-{first.target_lang}"
            )
    pairs: list[SentencePair] = []
    for c in corpora:
        pairs.extend(c.pairs)
    return first.with_pairs(pairs)


def swap_direction(corpus: Corpus) -> Corpus:
    """Reverse a corpus's translation direction (sources become targets)."""
    return Corpus(
        corpus.target_lang,
        corpus.source_lang,
        tuple(
            SentencePair(p.target, p.source, p.provenance, p.align_score, p.sim_score)
            for p in corpus
        ),
    )


def corpus_stats(corpus: Corpus) -> StatsReport:
    """Count pairs (total and per provenance) and whitespace tokens per side."""
    by_prov = Counter(p.provenance.value for p in corpus)
    src_tokens = sum(len(p.source.split()) for p in corpus)
    tgt_tokens = sum(len(p.target.split()) for p in corpus)
    return StatsReport(
        total=len(corpus),
        by_provenance=dict(by_prov),
        source_tokens=src_tokens,
        target_tokens=tgt_tokens,
    )


_PROVENANCE_BY_VALUE = {p.value: p for p in Provenance}


def _format_score(value: float | None) -> str:
    return "" if value is None else repr(value)


def _parse_score(text: str, path: Path, lineno: int, column: str) -> float | None:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise CorpusFormatError(
            f"{path}:{lineno}: non-numeric {column} field {text!r}"
        ) from None


def _read_lines(path: Path) -> list[str]:
    # Split on LF only: str.splitlines() also breaks on \x1c-\x1e, \x85,
    # U+2028/U+2029, which are legal in-line data and must roundtrip.
    with open(path, "r", encoding="utf-8", newline="") as f:
        text = f.read()
    if text == "":
        return []
    if text.endswith("\n"):
        text = text[:-1]
    return text.split("\n")


def _parse_extended_row(
    fields: list[str], path: Path, lineno: int
) -> SentencePair:
    if not 2 <= len(fields) <= 5:
        raise CorpusFormatError(
            f"{path}:{lineno}: expected 2-5 tab-separated fields, got {len(fields)}"
        )
    prov = Provenance.AUTHENTIC
    if len(fields) >= 3 and fields[2] != "":
        try:
            prov = _PROVENANCE_BY_VALUE[fields[2]]
        except KeyError:
            raise CorpusFormatError(
                f"{path}:{lineno}: unknown provenance tag {fields[2]!r}"
            ) from None
    align = _parse_score(fields[3], path, lineno, "align_score") if len(fields) >= 4 else None
    sim = _parse_score(fields[4], path, lineno, "sim_score") if len(fields) >= 5 else None
    return SentencePair(fields[0], fields[1], prov, align, sim)


def read_parallel(
    path: str | Path,
    source_lang: str = "src",
    target_lang: str = "tgt",
    *,
    fmt: str = "tsv",
    target_path: str | Path | None = None,
) -> Corpus:
    """Read a parallel corpus from TSV (plain or extended) or two aligned files.

    Raises CorpusFormatError with a 1-based line number for malformed rows,
    or with both line counts for two-file length mismatches.
    """
    path = Path(path)
    if fmt == "tsv":
        lines = _read_lines(path)
        extended = bool(lines) and lines[0] == EXTENDED_TSV_HEADER
        start = 1 if extended else 0
        pairs = []
        for lineno, line in enumerate(lines[start:], start=start + 1):
            fields = line.split("\t")
            if extended:
                pairs.append(_parse_extended_row(fields, path, lineno))
            else:
                if len(fields) != 2:
                    raise CorpusFormatError(
                        f"{path}:{lineno}: expected 2 tab-separated fields, got {len(fields)}"
                    )
                pairs.append(SentencePair(fields[0], fields[1]))
        return Corpus(source_lang, target_lang, tuple(pairs))
    if fmt == "two-file":
        if target_path is None:
            raise ValueError("two-file format requires target_path")
        src_lines = _read_lines(path)
        tgt_lines = _read_lines(Path(target_path))
        if len(src_lines) != len(tgt_lines):
            raise CorpusFormatError(
                f"two-file length mismatch: {path} has {len(src_lines)} lines, "
                f"{target_path} has {len(tgt_lines)} lines"
            )
        pairs = tuple(SentencePair(s, t) for s, t in zip(src_lines, tgt_lines))
        return Corpus(source_lang, target_lang, pairs)
    raise ValueError(f"unknown corpus format {fmt!r}")


def _needs_extended(corpus: Corpus) -> bool:
    return any(
        p.provenance is not Provenance.AUTHENTIC
        or p.align_score is not None
        or p.sim_score is not None
        for p in corpus
    )


def write_parallel(
    corpus: Corpus,
    path: str | Path,
    *,
    fmt: str = "tsv",
    target_path: str | Path | None = None,
) -> None:
    """Write a corpus; read_parallel reproduces texts and order byte-exactly."""
    path = Path(path)
    if fmt == "tsv":
        for i, p in enumerate(corpus, start=1):
            if "\t" in p.source or "\t" in p.target:
                raise ValueError(
                    f"pair {i} contains a tab, which collides with the TSV "
                    f"delimiter; use the two-file format"
                )
        extended = _needs_extended(corpus)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            if extended:
                f.write(EXTENDED_TSV_HEADER + "\n")
            for p in corpus:
                if extended:
                    f.write(
                        "\t".join(
                            (
                                p.source,
                                p.target,
                                p.provenance.value,
                                _format_score(p.align_score),
                                _format_score(p.sim_score),
                            )
                        )
                        + "\n"
                    )
                else:
                    f.write(f"{p.source}\t{p.target}\n")
        return
    if fmt == "two-file":
        if target_path is None:
            raise ValueError("two-file format requires target_path")
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for p in corpus:
                f.write(p.source + "\n")
        with open(Path(target_path), "w", encoding="utf-8", newline="\n") as f:
            for p in corpus:
                f.write(p.target + "\n")
        return
    raise ValueError(f"unknown corpus format {fmt!r}")


def read_mono(path: str | Path, lang: str = "xx") -> MonoCorpus:
    return MonoCorpus(lang, tuple(_read_lines(Path(path))))


def write_mono(mono: MonoCorpus, path: str | Path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as f:
        for line in mono:
            f.write(line + "\n")
