"""Synthetic bitext generation through an external-translator contract.

A translator is any command that reads N lines on stdin and writes exactly
N translations on stdout; line-count or exit-status violations abort the
stage rather than truncating silently. Forward translation pairs authentic
source monolingual text with translated targets; back translation pairs
translated sources with authentic target monolingual text. The resulting
classes are mixed by weight and can be joined by a finetuning set built
from dev sources paired with several models' translations of them.
"""

from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass, field

from .corpus import Corpus, MonoCorpus, Provenance, SentencePair
from .determinism import keyed_shuffle
from .errors import StageError
from .sampling import replicate_fractional


@dataclass(frozen=True)
class Translator:
    """External line-oriented translation command with a declared direction."""

    command: str
    source_lang: str
    target_lang: str

    def translate(self, lines: list[str]) -> list[str]:
        if not lines:
            return []
        payload = "".join(line + "\n" for line in lines)
        result = subprocess.run(
            shlex.split(self.command),
            input=payload,
            capture_output=True,
            text=True,
        )
        if result.returncode != 0:
            raise StageError(
                f"translator {self.command!r} exited with {result.returncode}: "
                f"{result.stderr.strip()}"
            )
        outputs = result.stdout.splitlines()
        if len(outputs) != len(lines):
            raise StageError(
                f"translator {self.command!r} emitted {len(outputs)} lines "
                f"for {len(lines)} inputs"
            )
        return outputs


def sample_monolingual(mono: MonoCorpus, k: int, seed: int) -> MonoCorpus:
    """Pick k distinct lines without replacement, keeping original order."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if k > len(mono):
        raise ValueError(f"cannot sample {k} lines from a corpus of {len(mono)}")
    if k == len(mono):
        return mono
    order = keyed_shuffle(list(range(len(mono))), seed, "mono-sample")
    chosen = sorted(order[:k])
    return MonoCorpus(mono.lang, tuple(mono.lines[i] for i in chosen))


def forward_translate(mono: MonoCorpus, teacher: Translator) -> Corpus:
    """Teacher-translate source monolingual text; sources stay authentic."""
    if teacher.source_lang != mono.lang:
        raise ValueError(
            f"teacher translates {teacher.source_lang}->{teacher.target_lang} "
            f"but the monolingual corpus is {mono.lang}"
        )
    outputs = teacher.translate(list(mono.lines))
    pairs = tuple(
        SentencePair(src, out, Provenance.FORWARD_SYNTHETIC)
        for src, out in zip(mono.lines, outputs)
    )
    return Corpus(mono.lang, teacher.target_lang, pairs)


def back_translate(target_mono: MonoCorpus, reverse: Translator) -> Corpus:
    """Reverse-translate target monolingual text; targets stay authentic."""
    if reverse.source_lang != target_mono.lang:
        raise ValueError(
            f"reverse translator reads {reverse.source_lang} but the "
            f"monolingual corpus is {target_mono.lang}"
        )
    outputs = reverse.translate(list(target_mono.lines))
    pairs = tuple(
        SentencePair(out, tgt, Provenance.BACK_SYNTHETIC)
        for out, tgt in zip(outputs, target_mono.lines)
    )
    return Corpus(reverse.target_lang, target_mono.lang, pairs)


@dataclass(frozen=True)
class MixSpec:
    authentic_weight: float = 1.0
    forward_weight: float = 1.0
    back_weight: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        weights = (self.authentic_weight, self.forward_weight, self.back_weight)
        if any(w < 0 for w in weights):
            raise ValueError(f"weights must be non-negative, got {weights}")
        if all(w == 0 for w in weights):
            raise ValueError("at least one mix weight must be positive")


def mix_training_set(
    authentic: Corpus, forward: Corpus, back: Corpus, spec: MixSpec | None = None
) -> Corpus:
    """Weight-scale each provenance class, concatenate, and shuffle."""
    spec = spec or MixSpec()
    direction = (authentic.source_lang, authentic.target_lang)
    for name, corpus in (("forward", forward), ("back", back)):
        if (corpus.source_lang, corpus.target_lang) != direction:
            raise ValueError(
                f"{name} corpus direction {corpus.source_lang}->{corpus.target_lang} "
                f"does not match {direction[0]}->{direction[1]}"
            )
    pairs = []
    pairs.extend(
        replicate_fractional(authentic.pairs, spec.authentic_weight, spec.seed, "mix:authentic")
    )
    pairs.extend(
        replicate_fractional(forward.pairs, spec.forward_weight, spec.seed, "mix:forward")
    )
    pairs.extend(
        replicate_fractional(back.pairs, spec.back_weight, spec.seed, "mix:back")
    )
    return authentic.with_pairs(keyed_shuffle(pairs, spec.seed, "mix-training"))


def assemble_transductive_set(
    dev_sources: MonoCorpus,
    model_outputs: list[MonoCorpus],
    target_lang: str | None = None,
) -> Corpus:
    """Pair dev sources with every model's translations, dropping exact duplicates."""
    for m, outputs in enumerate(model_outputs):
        if len(outputs) != len(dev_sources):
            raise ValueError(
                f"model {m} produced {len(outputs)} lines for "
                f"{len(dev_sources)} dev sources"
            )
    if target_lang is None:
        target_lang = model_outputs[0].lang if model_outputs else "und"
    seen: set[tuple[str, str]] = set()
    pairs = []
    for outputs in model_outputs:
        for src, hyp in zip(dev_sources.lines, outputs.lines):
            key = (src, hyp)
            if key in seen:
                continue
            seen.add(key)
            pairs.append(SentencePair(src, hyp, Provenance.TRANSDUCTIVE))
    return Corpus(dev_sources.lang, target_lang, tuple(pairs))
