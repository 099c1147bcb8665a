"""Small encoder-decoder transformer with learned position embeddings."""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import ToyModelConfig


class Seq2SeqModel(nn.Module):
    def __init__(self, cfg: ToyModelConfig, vocab_size: int, pad_id: int):
        super().__init__()
        self.cfg = cfg
        self.pad_id = pad_id
        self.embed = nn.Embedding(vocab_size, cfg.model_dim, padding_idx=pad_id)
        self.pos = nn.Embedding(cfg.max_positions, cfg.model_dim)
        self.transformer = nn.Transformer(
            d_model=cfg.model_dim,
            nhead=cfg.heads,
            num_encoder_layers=cfg.encoder_layers,
            num_decoder_layers=cfg.decoder_layers,
            dim_feedforward=cfg.ffn_dim,
            dropout=cfg.dropout,
            batch_first=True,
        )
        self.out = nn.Linear(cfg.model_dim, vocab_size)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        return self.embed(ids) + self.pos(positions)

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        """Teacher-forced logits of shape (batch, tgt_len, vocab)."""
        size = tgt_in.size(1)
        causal = torch.triu(
            torch.ones(size, size, dtype=torch.bool, device=src.device), diagonal=1
        )
        hidden = self.transformer(
            self._embed(src),
            self._embed(tgt_in),
            tgt_mask=causal,
            src_key_padding_mask=src.eq(self.pad_id),
            tgt_key_padding_mask=tgt_in.eq(self.pad_id),
            memory_key_padding_mask=src.eq(self.pad_id),
        )
        return self.out(hidden)

    @torch.no_grad()
    def greedy_decode(
        self, src_ids: list[int], bos_id: int, eos_id: int, max_len: int = 48
    ) -> list[int]:
        """Greedy decoding of one sequence; returns ids without bos/eos."""
        self.eval()
        src = torch.tensor([src_ids], dtype=torch.long)
        generated = [bos_id]
        for _ in range(max_len):
            tgt_in = torch.tensor([generated], dtype=torch.long)
            logits = self.forward(src, tgt_in)
            next_id = int(logits[0, -1].argmax())
            if next_id == eos_id:
                break
            generated.append(next_id)
        return generated[1:]
