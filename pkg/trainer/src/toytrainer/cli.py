"""Command-line entry: train / finetune / evaluate driven by a JSON config.

Config keys mirror the two config dataclasses, e.g.:

    {
      "model": {"model_dim": 64, "heads": 4},
      "train": {"max_steps": 500, "kl_weight": 5.0, "seed": 1}
    }
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import torch

from .config import ToyModelConfig, TrainConfig
from .data import SubwordInterface, read_tsv
from .model import Seq2SeqModel
from .training import encode_corpus, evaluate, finetune_transductive, train


def load_configs(path: str | None) -> tuple[ToyModelConfig, TrainConfig]:
    raw = {}
    if path:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return ToyModelConfig(**raw.get("model", {})), TrainConfig(**raw.get("train", {}))


def save_checkpoint(model: Seq2SeqModel, model_cfg: ToyModelConfig, path: str) -> None:
    torch.save(
        {"state_dict": model.state_dict(), "model_cfg": model_cfg.__dict__},
        path,
    )


def load_checkpoint(path: str, subword: SubwordInterface) -> tuple[Seq2SeqModel, ToyModelConfig]:
    payload = torch.load(path, weights_only=False)
    model_cfg = ToyModelConfig(**payload["model_cfg"])
    model = Seq2SeqModel(model_cfg, subword.vocab_size, subword.pad_id)
    model.load_state_dict(payload["state_dict"])
    return model, model_cfg


def _cmd_train(args) -> int:
    model_cfg, train_cfg = load_configs(args.config)
    subword = SubwordInterface(args.bpe_model)
    encoded = encode_corpus(read_tsv(args.corpus), subword)
    result = train(encoded, subword, model_cfg, train_cfg)
    save_checkpoint(result.model, model_cfg, args.model_out)
    if args.loss_curve:
        Path(args.loss_curve).write_text(
            "".join(f"{loss:.6f}\n" for loss in result.loss_curve), encoding="utf-8"
        )
    print(f"steps: {result.steps}")
    print(f"final_loss: {result.loss_curve[-1]:.6f}")
    return 0


def _cmd_finetune(args) -> int:
    model_cfg, train_cfg = load_configs(args.config)
    subword = SubwordInterface(args.bpe_model)
    model, model_cfg = load_checkpoint(args.model_in, subword)
    result = finetune_transductive(
        model, read_tsv(args.tel_corpus), subword, model_cfg, train_cfg
    )
    save_checkpoint(result.model, model_cfg, args.model_out)
    print(f"steps: {result.steps}")
    return 0


def _cmd_evaluate(args) -> int:
    subword = SubwordInterface(args.bpe_model)
    model, _ = load_checkpoint(args.model_in, subword)
    metrics = evaluate(model, read_tsv(args.dev_corpus), subword, args.workdir)
    for key, value in metrics.items():
        print(f"{key}: {value:.4f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="toytrainer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--corpus", required=True, help="pipeline TSV corpus")
    p.add_argument("--bpe-model", required=True, help="pipeline subword model file")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--model-out", required=True)
    p.add_argument("--loss-curve", default=None, help="write per-step losses here")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("finetune")
    p.add_argument("--tel-corpus", required=True, help="transductive TSV corpus")
    p.add_argument("--bpe-model", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--model-in", required=True)
    p.add_argument("--model-out", required=True)
    p.set_defaults(fn=_cmd_finetune)

    p = sub.add_parser("evaluate")
    p.add_argument("--dev-corpus", required=True)
    p.add_argument("--bpe-model", required=True)
    p.add_argument("--model-in", required=True)
    p.add_argument("--workdir", default="eval_out")
    p.set_defaults(fn=_cmd_evaluate)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
