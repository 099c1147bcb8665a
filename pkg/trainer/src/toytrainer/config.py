"""Configuration dataclasses for the toy trainer."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ToyModelConfig:
    encoder_layers: int = 2
    decoder_layers: int = 2
    heads: int = 4
    model_dim: int = 128
    ffn_dim: int = 256
    dropout: float = 0.1
    max_positions: int = 64

    def __post_init__(self) -> None:
        if self.model_dim % self.heads != 0:
            raise ValueError(
                f"model_dim {self.model_dim} must be divisible by heads {self.heads}"
            )
        for name in ("encoder_layers", "decoder_layers", "heads", "model_dim", "ffn_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    learning_rate: float = 3e-4
    warmup_steps: int = 100
    max_steps: int = 2000
    kl_weight: float = 5.0
    seed: int = 1
    log_every: int = 50

    def __post_init__(self) -> None:
        for name in ("batch_size", "warmup_steps", "max_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.kl_weight < 0:
            raise ValueError("kl_weight must be non-negative")
