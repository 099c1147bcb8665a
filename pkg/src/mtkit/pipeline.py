"""Manifest-driven stage execution with per-stage count reports.

Stages run in manifest order; every output dataset is written atomically
(temp file + rename) under the manifest's output directory and digested,
so a failed run never leaves torn outputs and a repeated run with the same
manifest, inputs, and seed is byte-identical. Each stage draws its
randomness from a seed derived from (global seed, stage name), so adding
or removing a stage never perturbs the others.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import alignment, augment, cleaning, denoise, sampling, subword
from .corpus import (
    Corpus,
    MonoCorpus,
    read_mono,
    read_parallel,
    swap_direction,
    write_mono,
    write_parallel,
)
from .determinism import keyed_u64
from .errors import ManifestError, StageError
from .manifest import PipelineManifest, StageDecl, validate_manifest

Dataset = Corpus | MonoCorpus | subword.BpeModel


@dataclass
class StageRun:
    name: str
    op: str
    input_count: int
    output_count: int
    removed: dict[str, int]
    wall_time: float
    digests: dict[str, str] = field(default_factory=dict)


@dataclass
class RunReport:
    stages: list[StageRun] = field(default_factory=list)

    @property
    def output_digests(self) -> dict[str, str]:
        digests: dict[str, str] = {}
        for stage in self.stages:
            digests.update(stage.digests)
        return digests

    def to_text(self) -> str:
        lines = ["stage            op             in      out     removed   wall(s)"]
        for s in self.stages:
            removed = (
                " ".join(f"{k}={v}" for k, v in s.removed.items()) if s.removed else "-"
            )
            lines.append(
                f"{s.name:<16} {s.op:<14} {s.input_count:<7} {s.output_count:<7} "
                f"{removed:<9} {s.wall_time:.3f}"
            )
        lines.append("")
        lines.append("output digests:")
        for name, digest in self.output_digests.items():
            lines.append(f"  {name}  sha256:{digest}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "stages": [
                {
                    "name": s.name,
                    "op": s.op,
                    "input_count": s.input_count,
                    "output_count": s.output_count,
                    "removed": s.removed,
                    "wall_time": s.wall_time,
                    "digests": s.digests,
                }
                for s in self.stages
            ],
            "output_digests": self.output_digests,
        }


def _count(dataset: Dataset) -> int:
    if isinstance(dataset, (Corpus, MonoCorpus)):
        return len(dataset)
    return len(dataset.vocab)


def _atomic_write(path: Path, write_fn) -> None:
    tmp = path.with_name(path.name + ".tmp")
    write_fn(tmp)
    os.replace(tmp, path)


def _persist(dataset: Dataset, directory: Path, name: str) -> Path:
    if isinstance(dataset, Corpus):
        path = directory / f"{name}.tsv"
        _atomic_write(path, lambda p: write_parallel(dataset, p))
    elif isinstance(dataset, MonoCorpus):
        path = directory / f"{name}.txt"
        _atomic_write(path, lambda p: write_mono(dataset, p))
    else:
        path = directory / f"{name}.bpe"
        _atomic_write(path, lambda p: subword.write_bpe_model(dataset, p))
    return path


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class _Runner:
    def __init__(self, manifest: PipelineManifest):
        self.manifest = manifest
        self.datasets: dict[str, Dataset] = {}
        self.out_dir = Path(manifest.output_dir)
        if not self.out_dir.is_absolute():
            self.out_dir = manifest.base_dir / self.out_dir

    def get(self, name: str) -> Dataset:
        if name not in self.datasets:
            decl = self.manifest.inputs[name]
            path = self.manifest.input_path(decl)
            if decl.kind == "mono":
                self.datasets[name] = read_mono(path, decl.lang)
            else:
                self.datasets[name] = read_parallel(
                    path, decl.source_lang, decl.target_lang, fmt=decl.fmt
                )
        return self.datasets[name]

    def corpus(self, name: str) -> Corpus:
        ds = self.get(name)
        if not isinstance(ds, Corpus):
            raise StageError(f"dataset {name!r} is not a parallel corpus")
        return ds

    def mono(self, name: str) -> MonoCorpus:
        ds = self.get(name)
        if not isinstance(ds, MonoCorpus):
            raise StageError(f"dataset {name!r} is not a monolingual corpus")
        return ds

    def stage_seed(self, stage: StageDecl) -> int:
        return keyed_u64(self.manifest.seed, "stage", stage.name)

    def resolve_path(self, value: str) -> Path:
        path = Path(value)
        return path if path.is_absolute() else self.manifest.base_dir / path

    # --- stage executors ------------------------------------------------

    def _run_clean(self, stage: StageDecl):
        cfg = cleaning.CleaningConfig(
            max_tokens=stage.params.get("max_tokens", 80),
            max_consecutive_repeats=stage.params.get("max_consecutive_repeats", 3),
            min_distinct_ratio=stage.params.get("min_distinct_ratio", 0.3),
        )
        cleaned, report = cleaning.clean_corpus(self.corpus(stage.inputs[0]), cfg)
        return {stage.outputs[0]: cleaned}, report.removed

    def _run_align_filter(self, stage: StageDecl):
        p = stage.params
        cfg = alignment.AlignTrainConfig(
            iterations=p.get("iterations", 5),
            p0=p.get("p0", 0.08),
            tension=p.get("tension", 4.0),
            smoothing_floor=p.get("smoothing_floor", 1e-9),
        )
        corpus = self.corpus(stage.inputs[0])
        forward = alignment.train_alignment(corpus, cfg)
        reverse = alignment.train_alignment(swap_direction(corpus), cfg)
        if "absolute" in p:
            policy = alignment.AlignFilterPolicy("absolute", p["absolute"])
        else:
            policy = alignment.AlignFilterPolicy("percentile", p.get("percentile", 10.0))
        filtered, report = alignment.filter_by_alignment(corpus, forward, reverse, policy)
        return {stage.outputs[0]: filtered}, report.removed

    def _run_denoise(self, stage: StageDecl):
        p = stage.params
        scorer_spec = p["scorer"]
        if scorer_spec["kind"] == "files":
            scorer = denoise.EmbeddingFileScorer(
                self.resolve_path(scorer_spec["source"]),
                self.resolve_path(scorer_spec["target"]),
            )
        else:
            scorer = denoise.ExternalScorer(scorer_spec["command"])
        scored = denoise.score_corpus(self.corpus(stage.inputs[0]), scorer)
        cfg = denoise.DenoiseConfig(threshold=p.get("threshold", 0.7))
        filtered, report = denoise.filter_by_similarity(scored, cfg)
        return {stage.outputs[0]: filtered}, report.removed

    def _run_bpe_train(self, stage: StageDecl):
        inputs = [self.get(name) for name in stage.inputs]
        model = subword.train_bpe(inputs, stage.params.get("vocab_size", 32000))
        return {stage.outputs[0]: model}, {}

    def _run_tag(self, stage: StageDecl):
        corpus = self.corpus(stage.inputs[0])
        target = stage.params.get("target_lang", corpus.target_lang)
        scheme = sampling.TagScheme.for_languages([target])
        return {stage.outputs[0]: sampling.tag_language(corpus, scheme, target)}, {}

    def _run_upsample(self, stage: StageDecl):
        corpora = [self.corpus(name) for name in stage.inputs]
        languages = [c.target_lang for c in corpora]
        plan = sampling.SamplingPlan(
            languages=languages,
            sizes=[len(c) for c in corpora],
            temperature=stage.params.get("temperature", 2.0),
            seed=self.stage_seed(stage),
        )
        by_lang = sampling.upsample(dict(zip(languages, corpora)), plan)
        return {
            out: by_lang[lang] for out, lang in zip(stage.outputs, languages)
        }, {}

    def _run_mix(self, stage: StageDecl):
        corpora = [self.corpus(name) for name in stage.inputs]
        mixed = sampling.mix_shuffle(corpora, self.stage_seed(stage))
        sources = {c.source_lang for c in corpora}
        targets = {c.target_lang for c in corpora}
        mixed = replace(
            mixed,
            source_lang=sources.pop() if len(sources) == 1 else "mul",
            target_lang=targets.pop() if len(targets) == 1 else "mul",
        )
        return {stage.outputs[0]: mixed}, {}

    def _run_ft(self, stage: StageDecl):
        p = stage.params
        mono = self.mono(stage.inputs[0])
        if "sample_size" in p:
            mono = augment.sample_monolingual(mono, p["sample_size"], self.stage_seed(stage))
        teacher = augment.Translator(p["command"], mono.lang, p["target_lang"])
        return {stage.outputs[0]: augment.forward_translate(mono, teacher)}, {}

    def _run_bt(self, stage: StageDecl):
        p = stage.params
        mono = self.mono(stage.inputs[0])
        reverse = augment.Translator(p["command"], mono.lang, p["source_lang"])
        return {stage.outputs[0]: augment.back_translate(mono, reverse)}, {}

    def _run_mix_training(self, stage: StageDecl):
        weights = stage.params.get("weights", [1.0, 1.0, 1.0])
        spec = augment.MixSpec(
            authentic_weight=weights[0],
            forward_weight=weights[1],
            back_weight=weights[2],
            seed=self.stage_seed(stage),
        )
        authentic, forward, back = (self.corpus(name) for name in stage.inputs)
        return {stage.outputs[0]: augment.mix_training_set(authentic, forward, back, spec)}, {}

    def _run_tel_assemble(self, stage: StageDecl):
        dev = self.mono(stage.inputs[0])
        hyps = [self.mono(name) for name in stage.inputs[1:]]
        tel = augment.assemble_transductive_set(
            dev, hyps, stage.params.get("target_lang")
        )
        return {stage.outputs[0]: tel}, {}

    _EXECUTORS = {
        "clean": _run_clean,
        "align-filter": _run_align_filter,
        "denoise": _run_denoise,
        "bpe-train": _run_bpe_train,
        "tag": _run_tag,
        "upsample": _run_upsample,
        "mix": _run_mix,
        "ft": _run_ft,
        "bt": _run_bt,
        "mix-training": _run_mix_training,
        "tel-assemble": _run_tel_assemble,
    }

    def run(self) -> RunReport:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        report = RunReport()
        for stage in self.manifest.stages:
            started = time.perf_counter()
            try:
                input_count = _count(self.get(stage.inputs[0]))
                outputs, removed = self._EXECUTORS[stage.op](self, stage)
            except StageError as exc:
                raise StageError(f"stage {stage.name!r} ({stage.op}): {exc}") from exc
            except Exception as exc:
                raise StageError(f"stage {stage.name!r} ({stage.op}): {exc}") from exc
            digests = {}
            for name, dataset in outputs.items():
                self.datasets[name] = dataset
                path = _persist(dataset, self.out_dir, name)
                digests[name] = _sha256(path)
            report.stages.append(
                StageRun(
                    name=stage.name,
                    op=stage.op,
                    input_count=input_count,
                    output_count=_count(outputs[stage.outputs[0]]),
                    removed=removed,
                    wall_time=time.perf_counter() - started,
                    digests=digests,
                )
            )
        _atomic_write(
            self.out_dir / "report.txt",
            lambda p: Path(p).write_text(report.to_text(), encoding="utf-8"),
        )
        _atomic_write(
            self.out_dir / "report.json",
            lambda p: Path(p).write_text(
                json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8"
            ),
        )
        return report


def run_manifest(manifest: PipelineManifest) -> RunReport:
    """Validate and execute a manifest; returns the per-stage run report.

    Raises ManifestError (with all diagnostics) before any stage runs if
    validation fails, and StageError naming the failing stage otherwise.
    """
    diagnostics = validate_manifest(manifest)
    if diagnostics:
        raise ManifestError(
            "manifest validation failed:\n" + "\n".join(f"  - {d}" for d in diagnostics)
        )
    return _Runner(manifest).run()
