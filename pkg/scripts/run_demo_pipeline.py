#!/usr/bin/env python3
"""Generate a synthetic bitext workload and run the reference manifest on it.

Creates <workdir>/data with a dictionary-style parallel corpus (plus planted
duplicates, an overlong pair, and a repetitive pair), monolingual files, dev
sources, and two mock system outputs; instantiates manifests/reference.yaml
with runnable absolute commands; then executes the pipeline twice to show
the run report and confirm byte-identical output digests.
"""

import argparse
import random
import sys
from pathlib import Path

from mtkit.corpus import Corpus, SentencePair, write_parallel
from mtkit.manifest import load_manifest
from mtkit.pipeline import run_manifest

REPO_ROOT = Path(__file__).resolve().parent.parent


def synth_data(data_dir: Path, seed: int = 41) -> None:
    rng = random.Random(seed)
    src_vocab = [f"palabra{i:02d}" for i in range(40)]
    tgt_vocab = [f"parola{i:02d}" for i in range(40)]

    pairs = []
    for _ in range(495):
        idx = [rng.randrange(40) for _ in range(rng.randint(1, 8))]
        pairs.append(
            SentencePair(
                " ".join(src_vocab[i] for i in idx),
                " ".join(tgt_vocab[i] for i in idx),
            )
        )
    pairs += [pairs[0], pairs[1], pairs[2]]
    pairs.append(SentencePair(" ".join(["palabra00"] * 81), "curto"))
    pairs.append(SentencePair("si si si que va", "dak dak dak bon"))
    write_parallel(Corpus("es", "arg", tuple(pairs)), data_dir / "bitext.tsv")

    def mono_lines(vocab, n):
        return [
            " ".join(rng.choices(vocab, k=rng.randint(2, 7))) for _ in range(n)
        ]

    (data_dir / "mono.es.txt").write_text(
        "\n".join(mono_lines(src_vocab, 60)) + "\n", encoding="utf-8"
    )
    (data_dir / "mono.arg.txt").write_text(
        "\n".join(mono_lines(tgt_vocab, 50)) + "\n", encoding="utf-8"
    )
    dev = mono_lines(src_vocab, 12)
    hyp1 = mono_lines(tgt_vocab, 12)
    hyp2 = mono_lines(tgt_vocab, 12)
    for name, lines in (("dev.es.txt", dev), ("hyp1.txt", hyp1), ("hyp2.txt", hyp2)):
        (data_dir / name).write_text("\n".join(lines) + "\n", encoding="utf-8")


def materialize_manifest(workdir: Path) -> Path:
    template = (REPO_ROOT / "manifests" / "reference.yaml").read_text(encoding="utf-8")
    runnable = template.replace(
        "python3 scripts/overlap_scorer.py",
        f"{sys.executable} {REPO_ROOT / 'scripts' / 'overlap_scorer.py'}",
    ).replace(
        "python3 scripts/toy_teacher.py",
        f"{sys.executable} {REPO_ROOT / 'scripts' / 'toy_teacher.py'}",
    )
    path = workdir / "manifest.yaml"
    path.write_text(runnable, encoding="utf-8")
    return path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", type=Path, default=Path("demo_run"))
    parser.add_argument("--seed", type=int, default=41)
    args = parser.parse_args()

    data_dir = args.workdir / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    synth_data(data_dir, args.seed)
    manifest_path = materialize_manifest(args.workdir)

    report = run_manifest(load_manifest(manifest_path))
    print(report.to_text())

    again = run_manifest(load_manifest(manifest_path))
    identical = again.output_digests == report.output_digests
    print(f"rerun digests identical: {identical}")
    return 0 if identical else 1


if __name__ == "__main__":
    raise SystemExit(main())
