"""Consistency-regularized two-pass loss over token probability distributions.

A training step runs the same sample through two dropout-perturbed forward
passes; the loss adds the negative log-likelihood of both passes and a
weighted symmetric KL penalty pulling the two output distributions together.
Everything here is in nats and operates on plain probability vectors so the
values are directly checkable against hand computation; a logits-based
variant with analytic gradients is provided for trainers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class RDropConfig:
    kl_weight: float = 5.0
    epsilon: float = 1e-12

    def __post_init__(self) -> None:
        if self.kl_weight < 0:
            raise ValueError(f"kl_weight must be >= 0, got {self.kl_weight}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")


def check_prob_dist(p: Sequence[float], tolerance: float = 1e-9) -> None:
    """Validate a probability vector: non-negative entries summing to 1."""
    if min(p) < 0:
        raise ValueError(f"negative probability entry: {min(p)}")
    total = math.fsum(p)
    if abs(total - 1.0) > tolerance:
        raise ValueError(f"probabilities sum to {total}, expected 1 +/- {tolerance}")


def kl_divergence(p: Sequence[float], q: Sequence[float], epsilon: float = 1e-12) -> float:
    """KL(P || Q) in nats, with Q floored at epsilon and 0*log(0) = 0."""
    if len(p) != len(q):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(q)}")
    total = 0.0
    for pi, qi in zip(p, q):
        if pi == 0.0:
            continue
        total += pi * math.log(pi / max(qi, epsilon))
    return total


def bidirectional_kl(p: Sequence[float], q: Sequence[float], epsilon: float = 1e-12) -> float:
    """Mean of the two KL directions; symmetric in its arguments."""
    return 0.5 * (kl_divergence(p, q, epsilon) + kl_divergence(q, p, epsilon))


def rdrop_loss(
    dists_a: Sequence[Sequence[float]],
    dists_b: Sequence[Sequence[float]],
    targets: Sequence[int],
    cfg: RDropConfig | None = None,
) -> float:
    """Per-token mean of the two-pass loss.

    Each position contributes
        -log Pa[t] - log Pb[t] + kl_weight * bidirectional_kl(Pa, Pb)
    and the sum is divided by the number of positions.
    """
    cfg = cfg or RDropConfig()
    if not (len(dists_a) == len(dists_b) == len(targets)):
        raise ValueError(
            f"length mismatch: {len(dists_a)} / {len(dists_b)} / {len(targets)} "
            f"distributions and targets"
        )
    if not targets:
        raise ValueError("rdrop_loss needs at least one position")
    total = 0.0
    for pa, pb, t in zip(dists_a, dists_b, targets):
        if len(pa) != len(pb):
            raise ValueError(f"dimension mismatch: {len(pa)} vs {len(pb)}")
        if not 0 <= t < len(pa):
            raise ValueError(f"target index {t} out of range for dimension {len(pa)}")
        nll = -math.log(max(pa[t], cfg.epsilon)) - math.log(max(pb[t], cfg.epsilon))
        total += nll + cfg.kl_weight * bidirectional_kl(pa, pb, cfg.epsilon)
    return total / len(targets)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def rdrop_loss_from_logits(
    logits_a: np.ndarray,
    logits_b: np.ndarray,
    targets: Sequence[int],
    cfg: RDropConfig | None = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss plus analytic gradients with respect to both pre-softmax score rows.

    logits_a / logits_b have shape (positions, classes). Returns
    (loss, grad_a, grad_b) where the gradients match rdrop_loss applied to
    the softmaxed rows, divided by the number of positions.
    """
    cfg = cfg or RDropConfig()
    logits_a = np.asarray(logits_a, dtype=np.float64)
    logits_b = np.asarray(logits_b, dtype=np.float64)
    if logits_a.shape != logits_b.shape:
        raise ValueError(f"shape mismatch: {logits_a.shape} vs {logits_b.shape}")
    if logits_a.ndim != 2 or len(targets) != logits_a.shape[0]:
        raise ValueError("expected (positions, classes) logits matching targets")

    n, k = logits_a.shape
    pa = _softmax(logits_a)
    pb = _softmax(logits_b)
    log_pa = np.log(pa)
    log_pb = np.log(pb)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), list(targets)] = 1.0

    kl_ab = ((pa * (log_pa - log_pb)).sum(axis=1))  # KL(Pa || Pb) per position
    kl_ba = ((pb * (log_pb - log_pa)).sum(axis=1))

    nll = -(log_pa[np.arange(n), list(targets)] + log_pb[np.arange(n), list(targets)])
    loss = float((nll + cfg.kl_weight * 0.5 * (kl_ab + kl_ba)).mean())

    half = 0.5 * cfg.kl_weight
    grad_a = (pa - onehot) + half * (
        pa * (log_pa - log_pb - kl_ab[:, None]) + (pa - pb)
    )
    grad_b = (pb - onehot) + half * (
        pb * (log_pb - log_pa - kl_ba[:, None]) + (pb - pa)
    )
    return loss, grad_a / n, grad_b / n
