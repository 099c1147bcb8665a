"""Training loops: two-pass consistency training, transductive finetuning,
and greedy-decode evaluation through the pipeline's score stage.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

import torch

from .config import ToyModelConfig, TrainConfig
from .data import Example, SubwordInterface, TRANSDUCTIVE, run_score_cli
from .losses import rdrop_batch_loss
from .model import Seq2SeqModel


@dataclass
class EncodedCorpus:
    sources: list[list[int]]
    targets: list[list[int]]
    provenances: list[str]

    def __len__(self) -> int:
        return len(self.sources)


def encode_corpus(examples: list[Example], subword: SubwordInterface) -> EncodedCorpus:
    if not examples:
        raise ValueError("corpus is empty")
    sources = subword.encode_lines([e.source for e in examples])
    targets = subword.encode_lines([e.target for e in examples])
    return EncodedCorpus(sources, targets, [e.provenance for e in examples])


def _pad(seqs: list[list[int]], pad_id: int) -> torch.Tensor:
    width = max(len(s) for s in seqs)
    out = torch.full((len(seqs), width), pad_id, dtype=torch.long)
    for i, seq in enumerate(seqs):
        out[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
    return out


def make_batch(
    encoded: EncodedCorpus, indices: list[int], subword: SubwordInterface
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Build (src, tgt_in, tgt_out) tensors for the selected examples."""
    srcs = [encoded.sources[i] + [subword.eos_id] for i in indices]
    tgt_in = [[subword.bos_id] + encoded.targets[i] for i in indices]
    tgt_out = [encoded.targets[i] + [subword.eos_id] for i in indices]
    return (
        _pad(srcs, subword.pad_id),
        _pad(tgt_in, subword.pad_id),
        _pad(tgt_out, subword.pad_id),
    )


@dataclass
class TrainResult:
    model: Seq2SeqModel
    loss_curve: list[float] = field(default_factory=list)
    steps: int = 0


def _batch_indices(n: int, batch_size: int, rng: random.Random):
    """Endless deterministic stream of shuffled index batches."""
    while True:
        order = list(range(n))
        rng.shuffle(order)
        for start in range(0, n, batch_size):
            chunk = order[start : start + batch_size]
            if chunk:
                yield chunk


def train(
    encoded: EncodedCorpus,
    subword: SubwordInterface,
    model_cfg: ToyModelConfig,
    train_cfg: TrainConfig,
    model: Seq2SeqModel | None = None,
    lr_scale: float = 1.0,
    stop_loss: float | None = None,
) -> TrainResult:
    """Run consistency-regularized training: each batch passes through the
    model twice with independent dropout masks.

    Stops at max_steps, or earlier once the step loss falls below stop_loss.
    With fixed seeds two runs produce identical loss curves.
    """
    if len(encoded) == 0:
        raise ValueError("cannot train on an empty corpus")
    # Desk-scale tensors: intra-op threading costs more than it buys.
    torch.set_num_threads(1)
    torch.manual_seed(train_cfg.seed)
    if model is None:
        model = Seq2SeqModel(model_cfg, subword.vocab_size, subword.pad_id)
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=train_cfg.learning_rate * lr_scale)
    rng = random.Random(train_cfg.seed)
    batches = _batch_indices(len(encoded), train_cfg.batch_size, rng)

    result = TrainResult(model=model)
    for step in range(train_cfg.max_steps):
        warmup = min(1.0, (step + 1) / train_cfg.warmup_steps)
        for group in optimizer.param_groups:
            group["lr"] = train_cfg.learning_rate * lr_scale * warmup

        src, tgt_in, tgt_out = make_batch(encoded, next(batches), subword)
        logits_a = model(src, tgt_in)
        logits_b = model(src, tgt_in)  # independent dropout masks
        loss, _, _ = rdrop_batch_loss(
            logits_a, logits_b, tgt_out, subword.pad_id, train_cfg.kl_weight
        )
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()

        step_loss = float(loss.detach())
        result.loss_curve.append(step_loss)
        result.steps = step + 1
        if stop_loss is not None and step_loss < stop_loss:
            break
    return result


def finetune_transductive(
    model: Seq2SeqModel,
    tel_examples: list[Example],
    subword: SubwordInterface,
    model_cfg: ToyModelConfig,
    train_cfg: TrainConfig,
    steps: int | None = None,
) -> TrainResult:
    """Continue training on a dev-set finetuning corpus at a tenth of the
    base learning rate. The corpus must carry transductive provenance."""
    if not tel_examples:
        raise ValueError("finetuning set is empty")
    bad = [e.provenance for e in tel_examples if e.provenance != TRANSDUCTIVE]
    if bad:
        raise ValueError(
            f"finetuning set must be transductive; found provenance {bad[0]!r}"
        )
    if steps == 0:
        return TrainResult(model=model)
    encoded = encode_corpus(tel_examples, subword)
    cfg = TrainConfig(
        batch_size=train_cfg.batch_size,
        learning_rate=train_cfg.learning_rate,
        warmup_steps=1,
        max_steps=steps if steps is not None else train_cfg.max_steps,
        kl_weight=train_cfg.kl_weight,
        seed=train_cfg.seed,
    )
    return train(encoded, subword, model_cfg, cfg, model=model, lr_scale=0.1)


def evaluate(
    model: Seq2SeqModel,
    examples: list[Example],
    subword: SubwordInterface,
    workdir: str | Path,
) -> dict[str, float]:
    """Greedy-decode every source and score against references via the
    pipeline's score stage. An empty decode becomes an empty hypothesis line."""
    if not examples:
        raise ValueError("evaluation set is empty")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    sources = subword.encode_lines([e.source for e in examples])
    hyp_ids = [
        model.greedy_decode(src + [subword.eos_id], subword.bos_id, subword.eos_id)
        for src in sources
    ]
    hyp_lines = subword.decode_ids(hyp_ids)
    ref_lines = [e.target for e in examples]
    return run_score_cli(hyp_lines, ref_lines, workdir)


@torch.no_grad()
def heldout_bidirectional_kl(
    model: Seq2SeqModel,
    encoded: EncodedCorpus,
    subword: SubwordInterface,
    train_cfg: TrainConfig,
    n_examples: int = 64,
) -> float:
    """Mean two-pass bidirectional KL on a fixed held-out batch, with dropout
    active (that inconsistency is exactly what training is meant to shrink)."""
    was_training = model.training
    model.train()
    torch.manual_seed(train_cfg.seed + 7919)
    indices = list(range(min(n_examples, len(encoded))))
    src, tgt_in, tgt_out = make_batch(encoded, indices, subword)
    logits_a = model(src, tgt_in)
    logits_b = model(src, tgt_in)
    _, mean_kl, _ = rdrop_batch_loss(
        logits_a, logits_b, tgt_out, subword.pad_id, train_cfg.kl_weight
    )
    if not was_training:
        model.eval()
    return float(mean_kl)
