"""Declarative pipeline manifests: schema, loading, and validation.

A manifest is one YAML file naming external input datasets and an ordered
list of stages. Each stage consumes named datasets (external inputs or
outputs of earlier stages) and produces named outputs, so the stage graph
is a DAG by construction; validation rejects forward or dangling
references, missing seeds, and out-of-range parameters before anything
runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ManifestError

KNOWN_OPS = {
    "clean",
    "align-filter",
    "denoise",
    "bpe-train",
    "tag",
    "upsample",
    "mix",
    "ft",
    "bt",
    "mix-training",
    "tel-assemble",
}

_STAGE_KEYS = {"name", "op", "input", "inputs", "output", "outputs"}


@dataclass(frozen=True)
class DatasetDecl:
    name: str
    path: str
    kind: str = "parallel"  # parallel | mono
    fmt: str = "tsv"
    source_lang: str = "src"
    target_lang: str = "tgt"
    lang: str = "und"


@dataclass(frozen=True)
class StageDecl:
    name: str
    op: str
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PipelineManifest:
    seed: int | None
    output_dir: str
    inputs: dict[str, DatasetDecl]
    stages: list[StageDecl]
    base_dir: Path = Path(".")

    def input_path(self, decl: DatasetDecl) -> Path:
        path = Path(decl.path)
        return path if path.is_absolute() else self.base_dir / path


def _as_list(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, str):
        return [value]
    return list(value)


def load_manifest(path: str | Path) -> PipelineManifest:
    """Parse a manifest file; structural errors raise ManifestError."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ManifestError(f"{path}: invalid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ManifestError(f"{path}: manifest must be a mapping")

    inputs: dict[str, DatasetDecl] = {}
    for name, spec in (raw.get("inputs") or {}).items():
        if not isinstance(spec, dict) or "path" not in spec:
            raise ManifestError(f"{path}: input {name!r} needs a path")
        inputs[name] = DatasetDecl(
            name=name,
            path=str(spec["path"]),
            kind=spec.get("kind", "parallel"),
            fmt=spec.get("format", "tsv"),
            source_lang=spec.get("source_lang", "src"),
            target_lang=spec.get("target_lang", "tgt"),
            lang=spec.get("lang", "und"),
        )

    stages: list[StageDecl] = []
    for i, spec in enumerate(raw.get("stages") or []):
        if not isinstance(spec, dict):
            raise ManifestError(f"{path}: stages[{i}] must be a mapping")
        ins = _as_list(spec.get("inputs")) or _as_list(spec.get("input"))
        outs = _as_list(spec.get("outputs")) or _as_list(spec.get("output"))
        params = {k: v for k, v in spec.items() if k not in _STAGE_KEYS}
        stages.append(
            StageDecl(
                name=str(spec.get("name", f"stage{i}")),
                op=str(spec.get("op", "")),
                inputs=ins,
                outputs=outs,
                params=params,
            )
        )

    return PipelineManifest(
        seed=raw.get("seed"),
        output_dir=str(raw.get("output_dir", "out")),
        inputs=inputs,
        stages=stages,
        base_dir=path.parent,
    )


def _check_range(diags: list[str], where: str, value, low, high, *, high_open: bool = False) -> None:
    if value is None:
        return
    try:
        ok = (low <= value < high) if high_open else (low <= value <= high)
    except TypeError:
        ok = False
    if not ok:
        bracket = ")" if high_open else "]"
        diags.append(f"{where}: must be in [{low}, {high}{bracket}, got {value!r}")


def validate_manifest(manifest: PipelineManifest) -> list[str]:
    """Return diagnostics; an empty list means the manifest is runnable."""
    diags: list[str] = []
    if manifest.seed is None:
        diags.append("global.seed required")
    elif not isinstance(manifest.seed, int):
        diags.append(f"global.seed must be an integer, got {manifest.seed!r}")

    for name, decl in manifest.inputs.items():
        if decl.kind not in ("parallel", "mono"):
            diags.append(f"inputs.{name}.kind: unknown kind {decl.kind!r}")
        if not manifest.input_path(decl).exists():
            diags.append(f"inputs.{name}.path: file not found: {manifest.input_path(decl)}")

    available = set(manifest.inputs)
    seen_stage_names: set[str] = set()
    later_outputs: set[str] = set()
    for stage in manifest.stages:
        later_outputs.update(stage.outputs)

    for i, stage in enumerate(manifest.stages):
        where = f"stages[{i}].{stage.name or '?'}"
        if stage.name in seen_stage_names:
            diags.append(f"{where}: duplicate stage name")
        seen_stage_names.add(stage.name)
        if stage.op not in KNOWN_OPS:
            diags.append(f"{where}.op: unknown op {stage.op!r}")
        if not stage.inputs:
            diags.append(f"{where}.inputs: at least one input required")
        if not stage.outputs:
            diags.append(f"{where}.outputs: at least one output required")
        for ref in stage.inputs:
            if ref in available:
                continue
            if ref in later_outputs or ref in stage.outputs:
                diags.append(
                    f"{where}.inputs: {ref!r} is produced by this or a later "
                    f"stage; stage graph must be a DAG"
                )
            else:
                diags.append(f"{where}.inputs: {ref!r} is not declared anywhere")
        for out in stage.outputs:
            if out in available:
                diags.append(f"{where}.outputs: {out!r} already exists")
        p = stage.params
        _check_range(diags, f"{where}.threshold", p.get("threshold"), -1.0, 1.0)
        _check_range(
            diags, f"{where}.percentile", p.get("percentile"), 0.0, 100.0, high_open=True
        )
        if p.get("temperature") is not None and p["temperature"] < 1:
            diags.append(f"{where}.temperature: must be >= 1, got {p['temperature']!r}")
        if p.get("vocab_size") is not None and p["vocab_size"] < 1:
            diags.append(f"{where}.vocab_size: must be >= 1, got {p['vocab_size']!r}")
        if stage.op == "upsample" and len(stage.outputs) != len(stage.inputs):
            diags.append(f"{where}.outputs: upsample needs one output per input")
        if stage.op == "denoise":
            scorer = p.get("scorer")
            if not isinstance(scorer, dict) or scorer.get("kind") not in ("files", "cmd"):
                diags.append(f"{where}.scorer: need kind 'files' or 'cmd'")
        if stage.op in ("ft", "bt") and not p.get("command"):
            diags.append(f"{where}.command: translator command required")
        available.update(stage.outputs)

    return diags
