import unicodedata
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mtkit.metrics import bleu_corpus, chrf_corpus, score_both, tokenize

# Five-sentence parity fixture. The BLEU value was pinned once by running the
# published reference scorer (13a tokenization, default smoothing; no n-gram
# order has zero matches here, so smoothing is inert): 53.04950005319615 with
# precisions (85.714286, 60.0, 44.0, 35.0) and brevity penalty 1.0. The chrF++
# value comes from the exact-fraction oracle below: 74.61699185985972.
FIXTURE_REFS = [
    "El gato duerme en la cocina.",
    "Los científicos descubrieron una técnica nueva.",
    "Hoy llueve mucho en la montaña.",
    "La niña lee un libro interesante.",
    "Mañana viajamos a la ciudad vieja.",
]
FIXTURE_HYPS = [
    "El gato duerme en la cocina.",
    "Los científicos descubren una nueva técnica.",
    "Hoy llueve bastante en la montaña.",
    "La niña lee un libro muy interesante.",
    "Viajamos mañana a la ciudad.",
]
FIXTURE_BLEU = 53.04950005319615
FIXTURE_CHRF_PP = 74.61699185985972


# --- independent chrF++ oracle: exact Fraction arithmetic, no shared code ---

def _oracle_char_ngrams(line, n):
    s = "".join(line.split())
    out = {}
    for i in range(len(s) - n + 1):
        out[s[i : i + n]] = out.get(s[i : i + n], 0) + 1
    return out


def _oracle_words(line):
    words = []
    for w in line.split():
        if len(w) > 1 and unicodedata.category(w[-1]).startswith("P"):
            words += [w[:-1], w[-1]]
        elif len(w) > 1 and unicodedata.category(w[0]).startswith("P"):
            words += [w[0], w[1:]]
        else:
            words.append(w)
    return words


def _oracle_word_ngrams(words, n):
    out = {}
    for i in range(len(words) - n + 1):
        key = tuple(words[i : i + n])
        out[key] = out.get(key, 0) + 1
    return out


def _oracle_overlap(a, b):
    return sum(min(c, b.get(g, 0)) for g, c in a.items())


def chrf_pp_oracle(hyps, refs):
    stats = [[0, 0, 0] for _ in range(8)]
    for h, r in zip(hyps, refs):
        hw, rw = _oracle_words(h), _oracle_words(r)
        for k in range(8):
            if k < 6:
                hc, rc = _oracle_char_ngrams(h, k + 1), _oracle_char_ngrams(r, k + 1)
            else:
                hc = _oracle_word_ngrams(hw, k - 5)
                rc = _oracle_word_ngrams(rw, k - 5)
            stats[k][0] += sum(hc.values())
            stats[k][1] += sum(rc.values())
            stats[k][2] += _oracle_overlap(hc, rc)
    beta_sq = Fraction(4)
    f_scores = []
    for h_total, r_total, match in stats:
        if h_total == 0 and r_total == 0:
            continue
        p = Fraction(match, h_total) if h_total else Fraction(0)
        r = Fraction(match, r_total) if r_total else Fraction(0)
        denom = beta_sq * p + r
        f_scores.append((1 + beta_sq) * p * r / denom if denom else Fraction(0))
    if not f_scores:
        return 0.0
    return float(100 * sum(f_scores) / len(f_scores))


class TestBleu:
    def test_identical_scores_exactly_100(self):
        assert bleu_corpus(FIXTURE_REFS, FIXTURE_REFS).bleu == 100.0

    def test_fixture_parity_with_reference_scorer(self):
        report = bleu_corpus(FIXTURE_HYPS, FIXTURE_REFS)
        assert report.bleu == pytest.approx(FIXTURE_BLEU, abs=0.1)
        assert report.bleu == pytest.approx(FIXTURE_BLEU, abs=1e-9)
        assert report.precisions[0] == pytest.approx(85.71428571428571, abs=1e-9)
        assert report.precisions == pytest.approx((85.714286, 60.0, 44.0, 35.0), abs=1e-4)
        assert report.brevity_penalty == 1.0

    def test_all_empty_hypotheses_score_zero(self):
        assert bleu_corpus(["", ""], ["un gato", "dos perros"]).bleu == 0.0

    def test_empty_hypothesis_line_contributes_nothing(self):
        full = bleu_corpus(["un gato grande feo", ""], ["un gato grande feo", "x y"])
        assert 0.0 < full.bleu < 100.0

    def test_brevity_penalty_below_one_for_short_hypotheses(self):
        report = bleu_corpus(["el gato negro duerme"], ["el gato negro duerme mucho hoy"])
        assert report.brevity_penalty < 1.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length mismatch"):
            bleu_corpus(["a"], ["a", "b"])

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError, match="reference line 2"):
            bleu_corpus(["a", "b"], ["a", ""])

    def test_joint_permutation_invariance(self):
        base = bleu_corpus(FIXTURE_HYPS, FIXTURE_REFS).bleu
        perm = [3, 0, 4, 1, 2]
        shuffled = bleu_corpus(
            [FIXTURE_HYPS[i] for i in perm], [FIXTURE_REFS[i] for i in perm]
        ).bleu
        assert shuffled == pytest.approx(base, abs=1e-12)

    def test_reference_whitespace_normalization_invariance(self):
        base = bleu_corpus(FIXTURE_HYPS, FIXTURE_REFS).bleu
        padded_refs = ["  " + r.replace(" ", "  ") + " " for r in FIXTURE_REFS]
        assert bleu_corpus(FIXTURE_HYPS, padded_refs).bleu == pytest.approx(base, abs=1e-12)

    def test_tokenizer_splits_punctuation_and_folds_width(self):
        assert tokenize("Hola, mundo！") == ["Hola", ",", "mundo", "!"]
        assert tokenize("el 3.5 no se separa.") == ["el", "3.5", "no", "se", "separa", "."]


class TestChrf:
    def test_identical_scores_exactly_100(self):
        assert chrf_corpus(FIXTURE_REFS, FIXTURE_REFS) == 100.0

    def test_identical_short_texts_score_100(self):
        # Degenerate corpus: too short for most n-gram orders.
        assert chrf_corpus(["ab"], ["ab"]) == 100.0

    def test_disjoint_character_sets_score_zero(self):
        assert chrf_corpus(["abc def"], ["xyz uvw"]) == 0.0

    def test_hand_computed_micro_example(self):
        # hyp "ab x" vs ref "ab y": per-order F values are
        # (2/3, 1/2, 0) for char orders 1..3 and (1/2, 0) for word orders,
        # char orders 4..6 absent on both sides: mean of 5 orders = 1/3.
        assert chrf_corpus(["ab x"], ["ab y"]) == pytest.approx(100 / 3, abs=1e-9)
        assert chrf_pp_oracle(["ab x"], ["ab y"]) == pytest.approx(100 / 3, abs=1e-9)

    def test_fixture_parity_with_oracle(self):
        got = chrf_corpus(FIXTURE_HYPS, FIXTURE_REFS)
        assert got == pytest.approx(FIXTURE_CHRF_PP, abs=0.1)
        assert got == pytest.approx(chrf_pp_oracle(FIXTURE_HYPS, FIXTURE_REFS), abs=1e-9)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length mismatch"):
            chrf_corpus(["a"], ["a", "b"])

    def test_joint_permutation_invariance(self):
        base = chrf_corpus(FIXTURE_HYPS, FIXTURE_REFS)
        perm = [4, 2, 0, 3, 1]
        shuffled = chrf_corpus(
            [FIXTURE_HYPS[i] for i in perm], [FIXTURE_REFS[i] for i in perm]
        )
        assert shuffled == pytest.approx(base, abs=1e-12)


_words = st.lists(
    st.sampled_from(["el", "gato", "negro", "duerme", "hoy", "mucho", "y."]),
    min_size=1,
    max_size=10,
).map(" ".join)


@given(st.lists(st.tuples(_words, _words), min_size=1, max_size=6))
@settings(max_examples=150)
def test_scores_bounded(pairs):
    hyps = [h for h, _ in pairs]
    refs = [r for _, r in pairs]
    report = score_both(hyps, refs)
    assert 0.0 <= report.bleu <= 100.0
    assert 0.0 <= report.chrf_pp <= 100.0
    assert 0.0 <= report.brevity_penalty <= 1.0


@given(st.lists(st.tuples(_words, _words), min_size=1, max_size=6))
@settings(max_examples=150)
def test_chrf_matches_exact_oracle(pairs):
    hyps = [h for h, _ in pairs]
    refs = [r for _, r in pairs]
    assert chrf_corpus(hyps, refs) == pytest.approx(chrf_pp_oracle(hyps, refs), abs=1e-9)
