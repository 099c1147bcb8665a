"""Corpus-level BLEU and chrF++ scoring.

BLEU: clipped n-gram precisions for n=1..4 aggregated over the corpus,
geometric mean, multiplied by the brevity penalty exp(1 - r/c) when the
hypothesis side is shorter. Tokenization splits punctuation from words
(plus fullwidth-to-halfwidth folding) and is case-sensitive; the exact rule
set is pinned by fixture parity tests against the reference scorer rather
than re-documented here. Unsmoothed: any zero precision gives a 0 score.

chrF++: per-order F2 over character n-grams (orders 1..6, whitespace
stripped) and word n-grams (orders 1..2, edge punctuation split off),
computed from corpus-aggregated counts and averaged over the orders that
occur in either side. Both metrics live on a 0..100 scale and score exactly
100 on identical inputs.
"""

from __future__ import annotations

import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass

from .cleaning import fold_width

BLEU_ORDER = 4
CHRF_CHAR_ORDER = 6
CHRF_WORD_ORDER = 2
CHRF_BETA = 2.0


@dataclass(frozen=True)
class MetricReport:
    bleu: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    chrf_pp: float | None = None


_PUNCT_SPLIT_RES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]
_BLEU_ENTITIES = (("&quot;", '"'), ("&amp;", "&"), ("&lt;", "<"), ("&gt;", ">"))


def tokenize(line: str) -> list[str]:
    """Metric tokenization: width folding, entity unescape, punctuation splitting."""
    norm = "".join(fold_width(ch) for ch in line)
    norm = norm.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    for entity, char in _BLEU_ENTITIES:
        norm = norm.replace(entity, char)
    norm = f" {norm} "
    for pattern, repl in _PUNCT_SPLIT_RES:
        norm = pattern.sub(repl, norm)
    return norm.split()


def _ngram_counts(tokens: list[str], max_order: int) -> Counter:
    counts: Counter = Counter()
    for n in range(1, max_order + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i : i + n])] += 1
    return counts


def bleu_corpus(hypotheses: list[str], references: list[str]) -> MetricReport:
    """Corpus BLEU of one hypothesis per reference, on a 0..100 scale."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"length mismatch: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise ValueError("cannot score an empty corpus")

    correct = [0] * BLEU_ORDER
    total = [0] * BLEU_ORDER
    sys_len = 0
    ref_len = 0
    for lineno, (hyp, ref) in enumerate(zip(hypotheses, references), start=1):
        ref_tokens = tokenize(ref)
        if not ref_tokens:
            raise ValueError(f"reference line {lineno} is empty")
        hyp_tokens = tokenize(hyp)
        sys_len += len(hyp_tokens)
        ref_len += len(ref_tokens)
        hyp_ngrams = _ngram_counts(hyp_tokens, BLEU_ORDER)
        ref_ngrams = _ngram_counts(ref_tokens, BLEU_ORDER)
        for ngram, count in hyp_ngrams.items():
            n = len(ngram)
            total[n - 1] += count
            correct[n - 1] += min(count, ref_ngrams.get(ngram, 0))

    precisions = tuple(
        100.0 * c / t if t > 0 else 0.0 for c, t in zip(correct, total)
    )
    if sys_len == 0:
        brevity_penalty = 0.0
    elif sys_len < ref_len:
        brevity_penalty = math.exp(1.0 - ref_len / sys_len)
    else:
        brevity_penalty = 1.0

    if any(p == 0.0 for p in precisions):
        bleu = 0.0
    else:
        # Geometric mean on the 0..1 scale so a perfect match is exactly 100.
        bleu = 100.0 * brevity_penalty * math.exp(
            sum(math.log(p / 100.0) for p in precisions) / BLEU_ORDER
        )
    return MetricReport(bleu=bleu, precisions=precisions, brevity_penalty=brevity_penalty)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def split_edge_punctuation(line: str) -> list[str]:
    """Word tokens with one trailing (or else leading) punctuation char split off."""
    words: list[str] = []
    for w in line.split():
        if len(w) == 1:
            words.append(w)
        elif _is_punct(w[-1]):
            words.extend((w[:-1], w[-1]))
        elif _is_punct(w[0]):
            words.extend((w[0], w[1:]))
        else:
            words.append(w)
    return words


def _char_ngram_counts(line: str, n: int) -> Counter:
    s = "".join(line.split())
    return Counter(s[i : i + n] for i in range(len(s) - n + 1))


def _word_ngram_counts(words: list[str], n: int) -> Counter:
    return Counter(tuple(words[i : i + n]) for i in range(len(words) - n + 1))


def chrf_corpus(hypotheses: list[str], references: list[str]) -> float:
    """chrF++ over a corpus, on a 0..100 scale."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"length mismatch: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise ValueError("cannot score an empty corpus")

    n_orders = CHRF_CHAR_ORDER + CHRF_WORD_ORDER
    hyp_totals = [0] * n_orders
    ref_totals = [0] * n_orders
    matches = [0] * n_orders

    for hyp, ref in zip(hypotheses, references):
        hyp_words = split_edge_punctuation(hyp)
        ref_words = split_edge_punctuation(ref)
        for order in range(n_orders):
            if order < CHRF_CHAR_ORDER:
                h = _char_ngram_counts(hyp, order + 1)
                r = _char_ngram_counts(ref, order + 1)
            else:
                n = order - CHRF_CHAR_ORDER + 1
                h = _word_ngram_counts(hyp_words, n)
                r = _word_ngram_counts(ref_words, n)
            hyp_totals[order] += sum(h.values())
            ref_totals[order] += sum(r.values())
            matches[order] += sum((h & r).values())

    beta_sq = CHRF_BETA**2
    f_scores = []
    for h_total, r_total, match in zip(hyp_totals, ref_totals, matches):
        if h_total == 0 and r_total == 0:
            continue  # order absent from the whole corpus on both sides
        precision = match / h_total if h_total > 0 else 0.0
        recall = match / r_total if r_total > 0 else 0.0
        denom = beta_sq * precision + recall
        f_scores.append((1 + beta_sq) * precision * recall / denom if denom > 0 else 0.0)
    if not f_scores:
        return 0.0
    return 100.0 * sum(f_scores) / len(f_scores)


def score_both(hypotheses: list[str], references: list[str]) -> MetricReport:
    """BLEU and chrF++ in one report."""
    report = bleu_corpus(hypotheses, references)
    return MetricReport(
        bleu=report.bleu,
        precisions=report.precisions,
        brevity_penalty=report.brevity_penalty,
        chrf_pp=chrf_corpus(hypotheses, references),
    )
