"""Rule-based bitext cleaning: text normalization, dedup, length and repeat filters.

All operations are pure, deterministic, and order-preserving on survivors.
clean_corpus applies them in a fixed order: normalize both sides, then
dedup, length filter, repeat filter.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .corpus import Corpus, MonoCorpus, SentencePair, StageReport

# The distinct-token ratio rule only fires on sentences at least this long;
# shorter sentences legitimately repeat words.
MIN_TOKENS_FOR_RATIO_RULE = 10

_ENTITY_RE = re.compile(r"&(amp|lt|gt|quot|apos|#[0-9]+|#[xX][0-9a-fA-F]+);")
_NAMED_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


@dataclass(frozen=True)
class CleaningConfig:
    max_tokens: int = 80
    max_consecutive_repeats: int = 3
    min_distinct_ratio: float = 0.3

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.max_consecutive_repeats < 2:
            raise ValueError(
                f"max_consecutive_repeats must be >= 2, got {self.max_consecutive_repeats}"
            )
        if not 0 < self.min_distinct_ratio <= 1:
            raise ValueError(
                f"min_distinct_ratio must be in (0, 1], got {self.min_distinct_ratio}"
            )


def _decode_entity(match: re.Match) -> str:
    body = match.group(1)
    if body in _NAMED_ENTITIES:
        return _NAMED_ENTITIES[body]
    if body[1] in "xX":
        codepoint = int(body[2:], 16)
    else:
        codepoint = int(body[1:])
    # Out-of-range and surrogate references are left verbatim.
    if codepoint > 0x10FFFF or 0xD800 <= codepoint <= 0xDFFF:
        return match.group(0)
    return chr(codepoint)


def fold_width(ch: str) -> str:
    """Map one fullwidth ASCII form (or ideographic space) to halfwidth."""
    code = ord(ch)
    if 0xFF01 <= code <= 0xFF5E:
        return chr(code - 0xFEE0)
    if code == 0x3000:
        return " "
    return ch


def normalize_text(text: str) -> str:
    """Normalize one line of text.

    Decodes the five named XML entities and numeric character references in
    a single pass (no recursive decoding), drops invisible Cc/Cf characters
    (TAB becomes a space), folds fullwidth ASCII forms and the ideographic
    space to their halfwidth counterparts, collapses space runs, and trims.
    """
    text = _ENTITY_RE.sub(_decode_entity, text)
    chars = []
    for ch in text:
        if ch == "\t":
            chars.append(" ")
            continue
        if unicodedata.category(ch) in ("Cc", "Cf"):
            continue
        chars.append(fold_width(ch))
    text = re.sub(r" {2,}", " ", "".join(chars))
    return text.strip()


def dedup(corpus: Corpus) -> Corpus:
    """Keep the first occurrence of each exact (source, target) pair."""
    seen: set[tuple[str, str]] = set()
    kept = []
    for pair in corpus:
        key = (pair.source, pair.target)
        if key in seen:
            continue
        seen.add(key)
        kept.append(pair)
    return corpus.with_pairs(kept)


def dedup_mono(mono: MonoCorpus) -> MonoCorpus:
    """Keep the first occurrence of each exact line."""
    seen: set[str] = set()
    kept = []
    for line in mono:
        if line in seen:
            continue
        seen.add(line)
        kept.append(line)
    return MonoCorpus(mono.lang, tuple(kept))


def _too_long(text: str, max_tokens: int) -> bool:
    return len(text.split()) > max_tokens


def filter_length(corpus: Corpus, cfg: CleaningConfig) -> Corpus:
    """Drop pairs where either side has more than max_tokens whitespace tokens."""
    kept = [
        p
        for p in corpus
        if not (_too_long(p.source, cfg.max_tokens) or _too_long(p.target, cfg.max_tokens))
    ]
    return corpus.with_pairs(kept)


def _degenerate_repeats(text: str, cfg: CleaningConfig) -> bool:
    tokens = text.split()
    run = 1
    for prev, cur in zip(tokens, tokens[1:]):
        run = run + 1 if cur == prev else 1
        if run >= cfg.max_consecutive_repeats:
            return True
    if len(tokens) >= MIN_TOKENS_FOR_RATIO_RULE:
        if len(set(tokens)) / len(tokens) < cfg.min_distinct_ratio:
            return True
    return False


def filter_repeats(corpus: Corpus, cfg: CleaningConfig) -> Corpus:
    """Drop pairs where either side is dominated by repeated tokens.

    A side is degenerate when some token occurs max_consecutive_repeats or
    more times in a row, or when a long sentence's distinct/total token
    ratio falls below min_distinct_ratio.
    """
    kept = [
        p
        for p in corpus
        if not (_degenerate_repeats(p.source, cfg) or _degenerate_repeats(p.target, cfg))
    ]
    return corpus.with_pairs(kept)


def clean_corpus(corpus: Corpus, cfg: CleaningConfig | None = None) -> tuple[Corpus, StageReport]:
    """Run the full rule-based cleaning sequence and report per-rule removals."""
    cfg = cfg or CleaningConfig()
    normalized = corpus.with_pairs(
        SentencePair(
            normalize_text(p.source),
            normalize_text(p.target),
            p.provenance,
            p.align_score,
            p.sim_score,
        )
        for p in corpus
    )
    deduped = dedup(normalized)
    lengthed = filter_length(deduped, cfg)
    final = filter_repeats(lengthed, cfg)
    report = StageReport(
        stage="clean",
        input_count=len(corpus),
        output_count=len(final),
        removed={
            "dedup": len(normalized) - len(deduped),
            "length": len(deduped) - len(lengthed),
            "repeats": len(lengthed) - len(final),
        },
    )
    return final, report
