"""Desk-scale encoder-decoder trainer for the corpus pipeline's training-side strategies."""

from .config import ToyModelConfig, TrainConfig
from .data import Example, SubwordInterface, read_tsv
from .model import Seq2SeqModel
from .training import (
    EncodedCorpus,
    TrainResult,
    encode_corpus,
    evaluate,
    finetune_transductive,
    heldout_bidirectional_kl,
    train,
)

__all__ = [
    "Example",
    "EncodedCorpus",
    "Seq2SeqModel",
    "SubwordInterface",
    "ToyModelConfig",
    "TrainConfig",
    "TrainResult",
    "encode_corpus",
    "evaluate",
    "finetune_transductive",
    "heldout_bidirectional_kl",
    "read_tsv",
    "train",
]

__version__ = "0.1.0"
