"""Joint subword segmentation via byte-pair merges.

One model is trained over both sides of a language pair (or any mix of
corpora), so source and target share a single piece inventory. Words are
whitespace pre-tokenized; a word-boundary marker makes segmentation fully
reversible without escaping. Training is deterministic: the most frequent
adjacent symbol pair wins each round, ties broken by lexicographic order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, MonoCorpus
from .errors import CorpusFormatError

WORD_BOUNDARY_MARKER = "▁"  # lower one eighth block, never natural text


@dataclass
class BpeModel:
    merges: list[tuple[str, str]]
    vocab: dict[str, int]
    marker: str = WORD_BOUNDARY_MARKER
    vocab_size: int = 0
    _cache: dict[str, tuple[str, ...]] = field(default_factory=dict, repr=False)

    def pieces_to_ids(self, pieces: list[str]) -> list[int]:
        return [self.vocab[p] for p in pieces]


def _iter_lines(inputs: list[Corpus | MonoCorpus]) -> list[str]:
    lines: list[str] = []
    for item in inputs:
        if isinstance(item, Corpus):
            for pair in item:
                lines.append(pair.source)
                lines.append(pair.target)
        elif isinstance(item, MonoCorpus):
            lines.extend(item.lines)
        else:
            raise TypeError(f"expected Corpus or MonoCorpus, got {type(item).__name__}")
    return lines


def _word_symbols(word: str, marker: str) -> tuple[str, ...]:
    return (marker + word[0], *word[1:])


def _merge_once(symbols: tuple[str, ...], pair: tuple[str, str]) -> tuple[str, ...]:
    """Merge all non-overlapping occurrences of pair, left to right."""
    a, b = pair
    out: list[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
            out.append(a + b)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def train_bpe(inputs: list[Corpus | MonoCorpus], vocab_size: int = 32000) -> BpeModel:
    """Learn merges until vocab_size pieces exist or no pair occurs twice.

    The base inventory is every character of the training text, the marker
    forms of word-initial characters, and the bare marker. Merge selection
    is by highest frequency, ties going to the lexicographically smallest
    (left, right) pair.
    """
    lines = _iter_lines(inputs)
    word_counts: Counter[str] = Counter()
    for line in lines:
        word_counts.update(line.split())
    if not word_counts:
        raise ValueError("training text is empty")

    marker = WORD_BOUNDARY_MARKER
    base: set[str] = {marker}
    for word in word_counts:
        base.update(word)
        base.add(marker + word[0])
    if vocab_size < len(base):
        raise ValueError(
            f"vocab_size {vocab_size} is smaller than the base character "
            f"inventory of {len(base)} symbols"
        )

    segmentations = {w: _word_symbols(w, marker) for w in word_counts}
    vocab_pieces: list[str] = sorted(base)
    known = set(vocab_pieces)
    merges: list[tuple[str, str]] = []

    while len(known) < vocab_size:
        pair_counts: Counter[tuple[str, str]] = Counter()
        for word, symbols in segmentations.items():
            count = word_counts[word]
            for left, right in zip(symbols, symbols[1:]):
                pair_counts[(left, right)] += count
        best_pair: tuple[str, str] | None = None
        best_count = 0
        for pair, count in pair_counts.items():
            if count > best_count or (count == best_count and best_pair is not None and pair < best_pair):
                best_pair = pair
                best_count = count
        if best_pair is None or best_count < 2:
            break
        merges.append(best_pair)
        segmentations = {
            w: _merge_once(s, best_pair) for w, s in segmentations.items()
        }
        merged_symbol = best_pair[0] + best_pair[1]
        if merged_symbol not in known:
            known.add(merged_symbol)
            vocab_pieces.append(merged_symbol)

    vocab = {piece: idx for idx, piece in enumerate(vocab_pieces)}
    return BpeModel(merges=merges, vocab=vocab, marker=marker, vocab_size=vocab_size)


def encode(model: BpeModel, text: str) -> list[str]:
    """Segment text into pieces by replaying merges in model order per word.

    Unknown characters pass through as single-character pieces; a word whose
    initial character has no marker form in the vocabulary is segmented as
    (marker, characters...) so every emitted piece is either in the
    vocabulary or a bare unseen character.
    """
    pieces: list[str] = []
    for word in text.split():
        cached = model._cache.get(word)
        if cached is None:
            symbols = _word_symbols(word, model.marker)
            if symbols[0] not in model.vocab:
                symbols = (model.marker, *word)
            for pair in model.merges:
                if len(symbols) < 2:
                    break
                symbols = _merge_once(symbols, pair)
            cached = symbols
            model._cache[word] = cached
        pieces.extend(cached)
    return pieces


def decode(model: BpeModel, pieces: list[str]) -> str:
    """Invert encode: concatenate, turn markers into spaces, trim the lead."""
    text = "".join(pieces).replace(model.marker, " ")
    return text.removeprefix(" ")


def write_bpe_model(model: BpeModel, path: str | Path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as f:
        f.write("#bpe-v1\n")
        f.write(f"vocab_size\t{model.vocab_size}\n")
        f.write(f"marker\t{model.marker}\n")
        f.write(f"merges\t{len(model.merges)}\n")
        for a, b in model.merges:
            f.write(f"{a} {b}\n")
        f.write(f"vocab\t{len(model.vocab)}\n")
        for piece, idx in model.vocab.items():
            f.write(f"{piece}\t{idx}\n")


def read_bpe_model(path: str | Path) -> BpeModel:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        lines = f.read().rstrip("\n").split("\n")
    if not lines or lines[0] != "#bpe-v1":
        raise CorpusFormatError(f"{path}: not a subword model file (missing #bpe-v1)")
    try:
        vocab_size = int(lines[1].split("\t")[1])
        marker = lines[2].split("\t")[1]
        n_merges = int(lines[3].split("\t")[1])
        merges = []
        for line in lines[4 : 4 + n_merges]:
            a, b = line.split(" ")
            merges.append((a, b))
        vocab_header = lines[4 + n_merges].split("\t")
        n_vocab = int(vocab_header[1])
        vocab = {}
        for line in lines[5 + n_merges : 5 + n_merges + n_vocab]:
            piece, idx = line.split("\t")
            vocab[piece] = int(idx)
    except (IndexError, ValueError) as exc:
        raise CorpusFormatError(f"{path}: malformed subword model file: {exc}") from None
    return BpeModel(merges=merges, vocab=vocab, marker=marker, vocab_size=vocab_size)
