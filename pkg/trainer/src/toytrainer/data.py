"""Pipeline-facing data access: TSV corpora, subword model files, and the
segmentation CLI.

The trainer consumes the pipeline's published surfaces only: the (possibly
provenance-extended) corpus TSV format, the subword model file's vocab
section, and the `bpe-encode` / `bpe-decode` / `score` subcommands invoked
as subprocesses.
"""

from __future__ import annotations

import subprocess
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

PIPELINE_CLI = [sys.executable, "-m", "mtkit.cli"]

EXTENDED_HEADER = "#bitext-v1"
TRANSDUCTIVE = "transductive"


@dataclass(frozen=True)
class Example:
    source: str
    target: str
    provenance: str = "authentic"


def read_tsv(path: str | Path) -> list[Example]:
    """Parse a pipeline corpus TSV (plain 2-column or extended 5-column)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    extended = bool(lines) and lines[0] == EXTENDED_HEADER
    out = []
    for line in lines[1:] if extended else lines:
        fields = line.split("\t")
        if len(fields) < 2:
            raise ValueError(f"{path}: malformed corpus row {line!r}")
        provenance = fields[2] if extended and len(fields) > 2 and fields[2] else "authentic"
        out.append(Example(fields[0], fields[1], provenance))
    return out


def _run_cli(*args: str) -> None:
    result = subprocess.run(
        [*PIPELINE_CLI, *args], capture_output=True, text=True
    )
    if result.returncode != 0:
        raise RuntimeError(
            f"pipeline CLI {' '.join(args[:1])} failed "
            f"({result.returncode}): {result.stderr.strip()}"
        )


def run_score_cli(hyp_lines: list[str], ref_lines: list[str], workdir: Path) -> dict[str, float]:
    """Score hypotheses against references through the pipeline's score stage."""
    hyp_path = workdir / "hyp.txt"
    ref_path = workdir / "ref.txt"
    hyp_path.write_text("".join(l + "\n" for l in hyp_lines), encoding="utf-8")
    ref_path.write_text("".join(l + "\n" for l in ref_lines), encoding="utf-8")
    result = subprocess.run(
        [*PIPELINE_CLI, "score", "--hyp", str(hyp_path), "--ref", str(ref_path), "--metric", "both"],
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        raise RuntimeError(f"score stage failed ({result.returncode}): {result.stderr.strip()}")
    metrics = {}
    for line in result.stdout.splitlines():
        key, _, value = line.partition(":")
        metrics[key.strip()] = float(value)
    return metrics


class SubwordInterface:
    """Segmentation via the pipeline's subword model file and CLI stages.

    Token ids come from the model file's vocab listing; three specials
    (pad, bos, eos) are appended after the subword inventory.
    """

    def __init__(self, model_path: str | Path):
        self.model_path = Path(model_path)
        lines = self.model_path.read_text(encoding="utf-8").rstrip("\n").split("\n")
        if not lines or lines[0] != "#bpe-v1":
            raise ValueError(f"{model_path}: not a subword model file")
        self.marker = lines[2].split("\t")[1]
        n_merges = int(lines[3].split("\t")[1])
        n_vocab = int(lines[4 + n_merges].split("\t")[1])
        self.vocab: dict[str, int] = {}
        for line in lines[5 + n_merges : 5 + n_merges + n_vocab]:
            piece, idx = line.split("\t")
            self.vocab[piece] = int(idx)
        self.pad_id = len(self.vocab)
        self.bos_id = len(self.vocab) + 1
        self.eos_id = len(self.vocab) + 2
        self.vocab_size = len(self.vocab) + 3

    def encode_lines(self, lines: list[str]) -> list[list[int]]:
        """Segment lines via bpe-encode and map pieces to ids.

        A piece missing from the model's vocab means the corpus was not
        encodable with this model; that is a setup error, not data to skip.
        """
        with tempfile.TemporaryDirectory() as tmp:
            src = Path(tmp) / "in.txt"
            dst = Path(tmp) / "out.txt"
            src.write_text("".join(l + "\n" for l in lines), encoding="utf-8")
            _run_cli("bpe-encode", "--model", str(self.model_path), "--input", str(src), "--output", str(dst))
            encoded = dst.read_text(encoding="utf-8").split("\n")
        if encoded and encoded[-1] == "":
            encoded.pop()
        out = []
        for lineno, line in enumerate(encoded, start=1):
            pieces = line.split() if line else []
            ids = []
            for piece in pieces:
                if piece not in self.vocab:
                    raise ValueError(
                        f"line {lineno}: piece {piece!r} is not in the subword "
                        f"model vocabulary; corpus and model do not match"
                    )
                ids.append(self.vocab[piece])
            out.append(ids)
        return out

    def decode_ids(self, ids_batch: list[list[int]]) -> list[str]:
        """Map ids back to pieces and reassemble text via bpe-decode."""
        id_to_piece = {i: p for p, i in self.vocab.items()}
        piece_lines = [
            " ".join(id_to_piece[i] for i in ids if i in id_to_piece)
            for ids in ids_batch
        ]
        with tempfile.TemporaryDirectory() as tmp:
            src = Path(tmp) / "in.txt"
            dst = Path(tmp) / "out.txt"
            src.write_text("".join(l + "\n" for l in piece_lines), encoding="utf-8")
            _run_cli("bpe-decode", "--model", str(self.model_path), "--input", str(src), "--output", str(dst))
            decoded = dst.read_text(encoding="utf-8").split("\n")
        if decoded and decoded[-1] == "":
            decoded.pop()
        return decoded
