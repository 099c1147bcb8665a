"""Shared fixtures: copy-task corpus, subword model, and one converged model.

Training runs are expensive, so the converged copy-task model is built once
per session and shared by the tests that need a trained model.
"""

import random
import string
import subprocess
import sys
from pathlib import Path

import pytest
import torch

from toytrainer import (
    SubwordInterface,
    ToyModelConfig,
    TrainConfig,
    encode_corpus,
    read_tsv,
    train,
)
from toytrainer.model import Seq2SeqModel

VOCAB = list(string.ascii_lowercase[:20])

MODEL_CFG = ToyModelConfig(model_dim=64, ffn_dim=128, heads=4, dropout=0.1)
TRAIN_CFG = TrainConfig(
    batch_size=32, learning_rate=3e-4, warmup_steps=50, max_steps=2000, kl_weight=5.0, seed=1
)


def copy_rows(n_pairs=2000, max_len=8, seed=5):
    """Copy task: vocab of 20 single-letter words, sequences up to max_len."""
    rng = random.Random(seed)
    rows = []
    for _ in range(n_pairs):
        s = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, max_len)))
        rows.append((s, s))
    return rows


def write_tsv(rows, path: Path) -> Path:
    path.write_text("".join(f"{a}\t{b}\n" for a, b in rows), encoding="utf-8")
    return path


def train_bpe_via_cli(corpus_paths: list[Path], model_path: Path, vocab_size=60) -> Path:
    cmd = [sys.executable, "-m", "mtkit.cli", "bpe-train", "--model", str(model_path),
           "--vocab-size", str(vocab_size)]
    for p in corpus_paths:
        cmd += ["--input", str(p)]
    subprocess.run(cmd, check=True, capture_output=True)
    return model_path


def fresh_model(subword, seed=TRAIN_CFG.seed) -> Seq2SeqModel:
    torch.manual_seed(seed)
    return Seq2SeqModel(MODEL_CFG, subword.vocab_size, subword.pad_id)


@pytest.fixture(scope="session")
def copy_task(tmp_path_factory):
    base = tmp_path_factory.mktemp("copytask")
    rows = copy_rows()
    corpus_path = write_tsv(rows, base / "copy.tsv")
    bpe_path = train_bpe_via_cli([corpus_path], base / "copy.bpe")
    subword = SubwordInterface(bpe_path)
    examples = read_tsv(corpus_path)
    encoded = encode_corpus(examples[:1800], subword)
    heldout = encode_corpus(examples[1800:], subword)
    return {
        "base": base,
        "corpus_path": corpus_path,
        "bpe_path": bpe_path,
        "subword": subword,
        "examples": examples,
        "encoded": encoded,
        "heldout": heldout,
    }


@pytest.fixture(scope="session")
def converged(copy_task):
    result = train(
        copy_task["encoded"],
        copy_task["subword"],
        MODEL_CFG,
        TRAIN_CFG,
        stop_loss=0.45,
    )
    return result
