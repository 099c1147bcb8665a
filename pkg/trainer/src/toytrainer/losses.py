"""Two-pass consistency loss over teacher-forced logits.

Per non-pad target position the loss is

    -log P1[t] - log P2[t] + kl_weight * (KL(P1||P2) + KL(P2||P1)) / 2

averaged over positions: the same per-token semantics as the pipeline
library's reference functions, which the tests cross-check against.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F


def rdrop_batch_loss(
    logits_a: torch.Tensor,
    logits_b: torch.Tensor,
    targets: torch.Tensor,
    pad_id: int,
    kl_weight: float,
) -> tuple[torch.Tensor, torch.Tensor, int]:
    """Returns (loss, mean bidirectional KL, token count) over non-pad positions."""
    mask = targets.ne(pad_id)
    n_tokens = int(mask.sum())
    if n_tokens == 0:
        raise ValueError("batch contains no non-pad target tokens")

    log_pa = F.log_softmax(logits_a, dim=-1)
    log_pb = F.log_softmax(logits_b, dim=-1)
    index = targets.clamp(min=0).unsqueeze(-1)
    nll_a = -log_pa.gather(-1, index).squeeze(-1)
    nll_b = -log_pb.gather(-1, index).squeeze(-1)

    pa = log_pa.exp()
    pb = log_pb.exp()
    kl_ab = (pa * (log_pa - log_pb)).sum(-1)
    kl_ba = (pb * (log_pb - log_pa)).sum(-1)
    bidirectional = 0.5 * (kl_ab + kl_ba)

    per_position = nll_a + nll_b + kl_weight * bidirectional
    loss = (per_position * mask).sum() / n_tokens
    mean_kl = (bidirectional * mask).sum() / n_tokens
    return loss, mean_kl, n_tokens
