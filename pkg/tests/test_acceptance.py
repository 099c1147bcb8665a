"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a `[ACCEPT] <criterion>: PASS` line on success (visible
with `pytest -s`); the test name doubles as the criterion name in plain
`pytest -v` output. Run with:

    pytest tests/test_acceptance.py -v -s
"""

import hashlib
import math
import random
import statistics
import sys
import textwrap
import time
from fractions import Fraction

import pytest

from mtkit.alignment import (
    AlignFilterPolicy,
    AlignTrainConfig,
    filter_by_alignment,
    score_pair,
    train_alignment,
)
from mtkit.cleaning import CleaningConfig, clean_corpus, filter_length
from mtkit.corpus import (
    Provenance,
    SentencePair,
    read_parallel,
    swap_direction,
    write_parallel,
)
from mtkit.denoise import DenoiseConfig, filter_by_similarity
from mtkit.augment import MixSpec, Translator, assemble_transductive_set, back_translate, forward_translate, mix_training_set
from mtkit.corpus import MonoCorpus
from mtkit.errors import StageError
from mtkit.manifest import load_manifest
from mtkit.metrics import bleu_corpus, chrf_corpus
from mtkit.pipeline import run_manifest
from mtkit.rdrop import RDropConfig, bidirectional_kl, kl_divergence, rdrop_loss
from mtkit.sampling import compute_ratios
from mtkit.subword import decode, encode, train_bpe

from conftest import dictionary_corpus, dictionary_vocab, make_corpus, shuffled_mismatch
from test_cleaning import mixed_fixture
from test_metrics import FIXTURE_BLEU, FIXTURE_CHRF_PP, FIXTURE_HYPS, FIXTURE_REFS


def _ok(name: str) -> None:
    print(f"[ACCEPT] {name}: PASS")


# --- upsampling formula ----------------------------------------------------

def _hiprec_sqrt(n: int, digits: int = 60) -> Fraction:
    scale = 10**digits
    return Fraction(math.isqrt(n * scale * scale), scale)


def _oracle_ratios_t2(sizes: list[int]) -> list[float]:
    """Arbitrary-precision T=2 oracle: lambda_l = N / (sqrt(n_l) * sum_k sqrt(n_k))."""
    total = sum(sizes)
    roots = [_hiprec_sqrt(n) for n in sizes]
    z = sum(roots)
    return [float(Fraction(total) / (r * z)) for r in roots]


def test_upsampling_formula_matches_oracle_and_is_fast():
    started = time.perf_counter()
    sizes = [30000, 1160000, 1920000]
    ratios = compute_ratios(sizes, 2.0)

    oracle = _oracle_ratios_t2(sizes)
    for got, want in zip(ratios, oracle):
        assert got == pytest.approx(want, abs=1e-9)
    # Oracle tuple rounded to 4 decimals: (6.8120, 1.0955, 0.8515).
    for got, want in zip(ratios, (6.8120, 1.0955, 0.8515)):
        assert got == pytest.approx(want, abs=1e-4)

    assert compute_ratios([3, 7], 1.0) == [1.0, 1.0]
    assert compute_ratios([5, 5, 5], 1.0) == [1.0, 1.0, 1.0]

    total = sum(sizes)
    balance = math.fsum(r * n / total for r, n in zip(ratios, sizes))
    assert balance == pytest.approx(1.0, abs=1e-12)

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _ok(f"upsampling formula (oracle match, T=1 ones, balance 1e-12, {elapsed:.3f}s)")


# --- aligner ----------------------------------------------------------------

def test_aligner_recovers_dictionary_and_separates_noise():
    started = time.perf_counter()
    corpus = dictionary_corpus(n_words=50, n_sentences=500, max_len=8)
    model = train_alignment(corpus, AlignTrainConfig(iterations=5))

    src_vocab, tgt_vocab = dictionary_vocab(50)
    recovered = sum(
        1
        for s, t in zip(src_vocab, tgt_vocab)
        if max(model.ttable[s], key=model.ttable[s].get) == t
    )
    assert recovered >= 0.95 * 50

    for earlier, later in zip(model.log_likelihoods, model.log_likelihoods[1:]):
        assert later >= earlier - 1e-9

    reverse = train_alignment(swap_direction(corpus), AlignTrainConfig(iterations=5))
    true_pairs = dictionary_corpus(50, 100, 8, seed=21)
    noise = shuffled_mismatch(dictionary_corpus(50, 100, 8, seed=22), seed=23)

    def combined(pair):
        return (
            score_pair(model, pair)
            + score_pair(reverse, SentencePair(pair.target, pair.source))
        ) / 2

    mid = (
        statistics.mean(combined(p) for p in true_pairs)
        + statistics.mean(combined(p) for p in noise)
    ) / 2
    blended = true_pairs.with_pairs(true_pairs.pairs + noise.pairs)
    kept, _ = filter_by_alignment(blended, model, reverse, AlignFilterPolicy("absolute", mid))
    kept_keys = {(p.source, p.target) for p in kept}
    dropped = [p for p in blended if (p.source, p.target) not in kept_keys]
    noise_keys = {(p.source, p.target) for p in noise}
    precision = sum(1 for p in dropped if (p.source, p.target) in noise_keys) / len(dropped)
    assert precision >= 0.95

    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    _ok(
        f"aligner (dictionary {recovered}/50, LL monotone, "
        f"drop precision {precision:.3f}, {elapsed:.1f}s)"
    )


# --- cleaning ----------------------------------------------------------------

def test_cleaning_idempotence_counts_and_boundary():
    fixture = mixed_fixture()
    once, report = clean_corpus(fixture)
    assert report.removed == {"dedup": 3, "length": 2, "repeats": 1}
    assert len(once) == 14

    twice, second_report = clean_corpus(once)
    assert twice.pairs == once.pairs
    assert second_report.total_removed == 0

    rng = random.Random(8)
    stress_rows = [
        (
            " ".join(rng.choices(["la", "Ｔｏｋｉｏ", "&amp;", "x​y", "uno"], k=rng.randint(1, 90))),
            " ".join(rng.choices(["neta", "frase", "si.", "&#72;i"], k=rng.randint(1, 90))),
        )
        for _ in range(300)
    ]
    stress = make_corpus(stress_rows)
    first_pass, _ = clean_corpus(stress)
    second_pass, stress_report = clean_corpus(first_pass)
    assert second_pass.pairs == first_pass.pairs
    assert stress_report.total_removed == 0

    cfg = CleaningConfig()
    at_limit = make_corpus([(" ".join(["w"] * 80), " ".join(["v"] * 80))])
    over_limit = make_corpus([(" ".join(["w"] * 81), "corto")])
    assert len(filter_length(at_limit, cfg)) == 1
    assert len(filter_length(over_limit, cfg)) == 0
    _ok("cleaning (idempotent, fixture counts {dedup:3, length:2, repeats:1}, 80/81 boundary)")


# --- subword -----------------------------------------------------------------

def test_bpe_roundtrip_determinism_and_first_merge():
    rng = random.Random(31)
    es_words = ["casa", "perro", "monte", "agua", "viento", "fuego", "cielo", "tierra"]
    at_words = ["casa", "can", "monte", "augua", "vientu", "fueu", "cielu", "tierra"]
    sentences = []
    for _ in range(500):
        k = rng.randint(1, 9)
        idx = [rng.randrange(8) for _ in range(k)]
        sentences.append(
            (
                " ".join(es_words[i] for i in idx),
                " ".join(at_words[i] for i in idx),
            )
        )
    corpus = make_corpus(sentences)
    model = train_bpe([corpus], vocab_size=90)
    for pair in corpus:  # 500 pairs = 1000 sentences across both sides
        assert decode(model, encode(model, pair.source)) == pair.source
        assert decode(model, encode(model, pair.target)) == pair.target

    again = train_bpe([corpus], vocab_size=90)
    assert again.merges == model.merges
    assert again.vocab == model.vocab

    hand = MonoCorpus("es", ("halo melon pilot color salon",))
    assert train_bpe([hand], vocab_size=50).merges[0] == ("l", "o")
    _ok("bpe (1000-sentence roundtrip, deterministic merges, hand-counted first merge)")


# --- denoise ------------------------------------------------------------------

def test_denoise_boundary_and_monotonicity():
    corpus = make_corpus([("a", "b"), ("c", "d")]).with_pairs(
        [
            SentencePair("a", "b", sim_score=0.69),
            SentencePair("c", "d", sim_score=0.70),
        ]
    )
    kept, _ = filter_by_similarity(corpus, DenoiseConfig(threshold=0.7))
    assert [p.sim_score for p in kept] == [0.70]

    rng = random.Random(17)
    for _ in range(1000):
        n = rng.randint(1, 12)
        scores = [rng.uniform(-1, 1) for _ in range(n)]
        scored = make_corpus([(f"s{i}", f"t{i}") for i in range(n)]).with_pairs(
            SentencePair(f"s{i}", f"t{i}", sim_score=s) for i, s in enumerate(scores)
        )
        t_low, t_high = sorted((rng.uniform(-1, 1), rng.uniform(-1, 1)))
        low_kept, _ = filter_by_similarity(scored, DenoiseConfig(threshold=t_low))
        high_kept, _ = filter_by_similarity(scored, DenoiseConfig(threshold=t_high))
        assert set(high_kept.pairs) <= set(low_kept.pairs)
    _ok("denoise (0.69 out / 0.70 in, monotone over 1000 random scored corpora)")


# --- rdrop math -----------------------------------------------------------------

def test_rdrop_math_oracle_values_and_properties():
    assert kl_divergence([0.5, 0.5], [0.9, 0.1]) == pytest.approx(0.5108, abs=1e-4)
    assert bidirectional_kl([0.5, 0.5], [0.9, 0.1]) == pytest.approx(0.4394, abs=1e-4)
    loss = rdrop_loss([[0.5, 0.5]], [[0.9, 0.1]], [0], RDropConfig(kl_weight=5.0))
    assert loss == pytest.approx(2.9957, abs=1e-3)

    rng = random.Random(23)
    for _ in range(10_000):
        dim = rng.randint(2, 6)
        p = [rng.uniform(1e-6, 1) for _ in range(dim)]
        q = [rng.uniform(1e-6, 1) for _ in range(dim)]
        p = [x / sum(p) for x in p]
        q = [x / sum(q) for x in q]
        assert kl_divergence(p, q) >= -1e-9
        assert kl_divergence(p, p) <= 1e-12
    _ok("rdrop math (KL 0.5108, bidirectional 0.4394, worked loss 2.9957, 10k KL properties)")


# --- metrics ----------------------------------------------------------------------

def test_metrics_identity_and_reference_parity():
    assert bleu_corpus(FIXTURE_REFS, FIXTURE_REFS).bleu == 100.0
    assert chrf_corpus(FIXTURE_REFS, FIXTURE_REFS) == 100.0

    bleu = bleu_corpus(FIXTURE_HYPS, FIXTURE_REFS).bleu
    chrf = chrf_corpus(FIXTURE_HYPS, FIXTURE_REFS)
    assert bleu == pytest.approx(FIXTURE_BLEU, abs=0.1)
    assert chrf == pytest.approx(FIXTURE_CHRF_PP, abs=0.1)
    _ok(
        f"metrics (identity 100 exact, fixture parity BLEU {bleu:.4f} vs "
        f"{FIXTURE_BLEU:.4f}, chrF++ {chrf:.4f} vs {FIXTURE_CHRF_PP:.4f})"
    )


# --- pipeline ----------------------------------------------------------------------

def _hash_scorer(tmp_path) -> str:
    """Deterministic pseudo-similarity: md5 of the pair, mapped to [0.5, 1)."""
    script = tmp_path / "hash_scorer.py"
    script.write_text(
        textwrap.dedent(
            """
            import hashlib, sys
            for line in sys.stdin:
                h = int(hashlib.md5(line.encode()).hexdigest()[:8], 16)
                print(0.5 + (h % 5000) / 10000)
            """
        ),
        encoding="utf-8",
    )
    return f"{sys.executable} {script}"


def _identity_cmd(tmp_path) -> str:
    script = tmp_path / "identity.py"
    script.write_text("import sys\nsys.stdout.write(sys.stdin.read())\n", encoding="utf-8")
    return f"{sys.executable} {script}"


def _pipeline_fixture(tmp_path):
    base = dictionary_corpus(n_words=40, n_sentences=495, max_len=8, seed=41, tgt="arg")
    rows = [(p.source, p.target) for p in base]
    rows += [rows[0], rows[1], rows[2]]  # duplicates
    rows += [(" ".join(["es00"] * 81), "curto"), ("si si si que va", "dak dak dak bon")]
    assert len(rows) == 500
    corpus = make_corpus(rows, tgt="arg")
    write_parallel(corpus, tmp_path / "bitext.tsv")

    src_vocab, tgt_vocab = dictionary_vocab(40)
    rng = random.Random(43)
    mono_src = [
        " ".join(rng.choices(src_vocab, k=rng.randint(2, 7))) for _ in range(60)
    ]
    mono_tgt = [
        " ".join(rng.choices(tgt_vocab, k=rng.randint(2, 7))) for _ in range(50)
    ]
    dev = [" ".join(rng.choices(src_vocab, k=4)) for _ in range(12)]
    hyp1 = [" ".join(rng.choices(tgt_vocab, k=4)) for _ in range(12)]
    hyp2 = list(hyp1)  # agrees with model 1 everywhere
    hyp3 = [" ".join(rng.choices(tgt_vocab, k=4)) for _ in range(12)]
    for name, lines in (
        ("mono.es.txt", mono_src),
        ("mono.arg.txt", mono_tgt),
        ("dev.es.txt", dev),
        ("hyp1.txt", hyp1),
        ("hyp2.txt", hyp2),
        ("hyp3.txt", hyp3),
    ):
        (tmp_path / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(corpus)


def _default_manifest(tmp_path) -> str:
    scorer = _hash_scorer(tmp_path)
    identity = _identity_cmd(tmp_path)
    body = f"""
    seed: 2024
    output_dir: out
    inputs:
      bitext: {{path: bitext.tsv, kind: parallel, source_lang: es, target_lang: arg}}
      src_mono: {{path: mono.es.txt, kind: mono, lang: es}}
      tgt_mono: {{path: mono.arg.txt, kind: mono, lang: arg}}
      dev_src: {{path: dev.es.txt, kind: mono, lang: es}}
      hyp1: {{path: hyp1.txt, kind: mono, lang: arg}}
      hyp2: {{path: hyp2.txt, kind: mono, lang: arg}}
      hyp3: {{path: hyp3.txt, kind: mono, lang: arg}}
    stages:
      - {{name: clean, op: clean, input: bitext, output: cleaned}}
      - {{name: alignfilter, op: align-filter, input: cleaned, output: aligned, iterations: 5, percentile: 10}}
      - {{name: denoise, op: denoise, input: aligned, output: denoised, threshold: 0.7, scorer: {{kind: cmd, command: "{scorer}"}}}}
      - {{name: bpe, op: bpe-train, inputs: [denoised], output: bpe_model, vocab_size: 160}}
      - {{name: tag, op: tag, input: denoised, output: tagged, target_lang: arg}}
      - {{name: upsample, op: upsample, inputs: [tagged], outputs: [upsampled], temperature: 2}}
      - {{name: pretrain_mix, op: mix, inputs: [upsampled], output: pretrain}}
      - {{name: ft, op: ft, input: src_mono, output: ft_corpus, command: "{identity}", target_lang: arg, sample_size: 40}}
      - {{name: bt, op: bt, input: tgt_mono, output: bt_corpus, command: "{identity}", source_lang: es}}
      - {{name: train_mix, op: mix-training, inputs: [denoised, ft_corpus, bt_corpus], output: train_set}}
      - {{name: tel, op: tel-assemble, inputs: [dev_src, hyp1, hyp2, hyp3], output: tel_set, target_lang: arg}}
    """
    path = tmp_path / "manifest.yaml"
    path.write_text(textwrap.dedent(body), encoding="utf-8")
    return path


def test_pipeline_end_to_end_deterministic_and_chained(tmp_path):
    n_input = _pipeline_fixture(tmp_path)
    assert n_input == 500
    manifest_path = _default_manifest(tmp_path)

    started = time.perf_counter()
    report = run_manifest(load_manifest(manifest_path))
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0

    by_name = {s.name: s for s in report.stages}
    assert by_name["clean"].input_count == 500
    assert by_name["clean"].removed["dedup"] >= 3  # random short sentences also collide
    assert by_name["alignfilter"].input_count == by_name["clean"].output_count
    assert by_name["denoise"].input_count == by_name["alignfilter"].output_count
    assert by_name["tag"].input_count == by_name["denoise"].output_count
    assert by_name["denoise"].removed["below_threshold"] > 0
    assert by_name["tel"].output_count == 24  # 12 + 0 (agrees) + 12

    first_digests = report.output_digests
    second = run_manifest(load_manifest(manifest_path))
    assert second.output_digests == first_digests
    _ok(
        f"pipeline (500-pair manifest end-to-end {elapsed:.1f}s, "
        f"rerun byte-identical, counts chain)"
    )


# --- augment -------------------------------------------------------------------

def test_augment_contracts_and_tel_counts(tmp_path):
    identity = Translator(_identity_cmd(tmp_path), "es", "arg")
    mono_src = MonoCorpus("es", ("uno dos", "tres cuatro", "cinco"))
    ft = forward_translate(mono_src, identity)
    assert [(p.source, p.target) for p in ft] == [(l, l) for l in mono_src.lines]
    assert all(p.provenance is Provenance.FORWARD_SYNTHETIC for p in ft)

    reverse = Translator(_identity_cmd(tmp_path), "arg", "es")
    mono_tgt = MonoCorpus("arg", ("alba", "nuei"))
    bt = back_translate(mono_tgt, reverse)
    assert [(p.source, p.target) for p in bt] == [(l, l) for l in mono_tgt.lines]
    assert all(p.provenance is Provenance.BACK_SYNTHETIC for p in bt)

    truncating = tmp_path / "truncate.py"
    truncating.write_text(
        "import sys\nlines = sys.stdin.readlines()\n"
        "sys.stdout.writelines(lines[:-1])\n",
        encoding="utf-8",
    )
    bad = Translator(f"{sys.executable} {truncating}", "es", "arg")
    with pytest.raises(StageError, match="2 lines for 3 inputs"):
        forward_translate(mono_src, bad)

    dev = MonoCorpus("es", tuple(f"dev {i}" for i in range(10)))
    agree = tuple(f"hyp {i}" for i in range(10))
    differ = tuple(f"alt {i}" if i % 2 else f"hyp {i}" for i in range(10))
    tel = assemble_transductive_set(
        dev,
        [MonoCorpus("arg", agree), MonoCorpus("arg", agree), MonoCorpus("arg", differ)],
    )
    # hand count: 10 from model 1, 0 from model 2, 5 new odd-indexed from model 3
    assert len(tel) == 15
    assert all(p.provenance is Provenance.TRANSDUCTIVE for p in tel)
    _ok("augment (FT/BT identity pairs + provenance, truncation aborts, TEL 15 distinct)")
