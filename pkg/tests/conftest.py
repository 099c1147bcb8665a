"""Shared fixtures: synthetic corpora used across test modules."""

import random

import pytest

from mtkit.corpus import Corpus, MonoCorpus, Provenance, SentencePair


def make_corpus(rows, src="es", tgt="ast", provenance=Provenance.AUTHENTIC):
    return Corpus(
        src, tgt, tuple(SentencePair(s, t, provenance) for s, t in rows)
    )


def dictionary_vocab(n_words=50):
    """One-to-one bilingual lexicon: source word i maps to target word i."""
    return (
        [f"es{i:02d}" for i in range(n_words)],
        [f"at{i:02d}" for i in range(n_words)],
    )


def dictionary_corpus(n_words=50, n_sentences=500, max_len=8, seed=3, src="es", tgt="ast"):
    """Synthetic bitext where targets are word-for-word translations in order,
    so the true alignment is the diagonal."""
    src_vocab, tgt_vocab = dictionary_vocab(n_words)
    rng = random.Random(seed)
    pairs = []
    for _ in range(n_sentences):
        length = rng.randint(1, max_len)
        idx = [rng.randrange(n_words) for _ in range(length)]
        pairs.append(
            SentencePair(
                " ".join(src_vocab[i] for i in idx),
                " ".join(tgt_vocab[i] for i in idx),
            )
        )
    return Corpus(src, tgt, tuple(pairs))


def shuffled_mismatch(corpus, seed=11):
    """Mismatched pairs: each source paired with a random other target."""
    rng = random.Random(seed)
    targets = [p.target for p in corpus]
    rng.shuffle(targets)
    return corpus.with_pairs(
        SentencePair(p.source, t) for p, t in zip(corpus, targets)
    )


@pytest.fixture
def tiny_corpus():
    return make_corpus([("hola mundo", "ola mundu"), ("adios amigo", "adeu amigu")])
