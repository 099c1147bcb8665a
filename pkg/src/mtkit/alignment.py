"""Reparameterized IBM Model 2 word aligner for bitext quality filtering.

Each target token aligns independently to a source position or to a null
word. The positional prior is fixed (not learned): null takes probability
p0, and the remaining mass favors positions near the length-normalized
diagonal with sharpness controlled by the tension parameter. EM re-estimates
only the lexical translation table, which keeps training deterministic and
the per-pair likelihood a usable quality score: poorly aligned pairs get a
low mean per-token log-probability and are filtered out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, SentencePair, StageReport
from .errors import CorpusFormatError

NULL_TOKEN = "<NULL>"


@dataclass(frozen=True)
class AlignTrainConfig:
    iterations: int = 5
    p0: float = 0.08
    tension: float = 4.0
    smoothing_floor: float = 1e-9

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 < self.p0 < 1:
            raise ValueError(f"p0 must be in (0, 1), got {self.p0}")
        if self.tension <= 0:
            raise ValueError(f"tension must be positive, got {self.tension}")
        if not 0 < self.smoothing_floor < 1:
            raise ValueError(f"smoothing_floor must be in (0, 1), got {self.smoothing_floor}")


@dataclass
class AlignmentModel:
    ttable: dict[str, dict[str, float]]
    p0: float
    tension: float
    source_lang: str
    target_lang: str
    smoothing_floor: float = 1e-9
    log_likelihoods: list[float] = field(default_factory=list)

    def lexical_prob(self, source_token: str, target_token: str) -> float:
        return self.ttable.get(source_token, {}).get(target_token, self.smoothing_floor)


def _diagonal_priors(i: int, m: int, n: int, p0: float, tension: float) -> list[float]:
    """Prior over source positions 1..n for target position i of m; null excluded."""
    weights = [math.exp(-tension * abs(i / m - j / n)) for j in range(1, n + 1)]
    z = sum(weights)
    return [(1.0 - p0) * w / z for w in weights]


def _tokenized_pairs(corpus: Corpus) -> list[tuple[list[str], list[str]]]:
    out = []
    for idx, pair in enumerate(corpus):
        src = pair.source.split()
        tgt = pair.target.split()
        if not src or not tgt:
            raise ValueError(f"pair {idx} has an empty side after tokenization")
        out.append((src, tgt))
    return out


def train_alignment(corpus: Corpus, cfg: AlignTrainConfig | None = None) -> AlignmentModel:
    """EM-train the lexical table; the diagonal prior stays fixed.

    The returned model records the corpus log-likelihood observed at each
    E-step, which is non-decreasing across iterations.
    """
    cfg = cfg or AlignTrainConfig()
    if len(corpus) == 0:
        raise ValueError("cannot train an alignment model on an empty corpus")
    tokenized = _tokenized_pairs(corpus)

    target_vocab: set[str] = set()
    for _, tgt in tokenized:
        target_vocab.update(tgt)
    uniform = 1.0 / len(target_vocab)

    # Only co-occurring (source, target) token pairs get table entries;
    # the null word co-occurs with everything.
    ttable: dict[str, dict[str, float]] = {NULL_TOKEN: {}}
    for src, tgt in tokenized:
        for f in tgt:
            ttable[NULL_TOKEN][f] = uniform
            for e in src:
                ttable.setdefault(e, {})[f] = uniform

    log_likelihoods: list[float] = []
    for _ in range(cfg.iterations):
        counts: dict[str, dict[str, float]] = {}
        log_likelihood = 0.0
        for src, tgt in tokenized:
            n, m = len(src), len(tgt)
            for i, f in enumerate(tgt, start=1):
                priors = _diagonal_priors(i, m, n, cfg.p0, cfg.tension)
                terms = [cfg.p0 * ttable[NULL_TOKEN][f]]
                for prior, e in zip(priors, src):
                    terms.append(prior * ttable[e][f])
                denom = math.fsum(terms)
                log_likelihood += math.log(denom)
                for term, e in zip(terms, [NULL_TOKEN, *src]):
                    row = counts.setdefault(e, {})
                    row[f] = row.get(f, 0.0) + term / denom
        log_likelihoods.append(log_likelihood)
        for e, row in counts.items():
            total = math.fsum(row.values())
            ttable[e] = {f: c / total for f, c in row.items()}

    return AlignmentModel(
        ttable=ttable,
        p0=cfg.p0,
        tension=cfg.tension,
        source_lang=corpus.source_lang,
        target_lang=corpus.target_lang,
        smoothing_floor=cfg.smoothing_floor,
        log_likelihoods=log_likelihoods,
    )


def score_pair(model: AlignmentModel, pair: SentencePair) -> float:
    """Mean per-target-token log-probability of the pair under the model, in nats."""
    src = pair.source.split()
    tgt = pair.target.split()
    if not src or not tgt:
        raise ValueError("cannot score a pair with an empty side")
    n, m = len(src), len(tgt)
    total = 0.0
    for i, f in enumerate(tgt, start=1):
        priors = _diagonal_priors(i, m, n, model.p0, model.tension)
        prob = model.p0 * model.lexical_prob(NULL_TOKEN, f)
        for prior, e in zip(priors, src):
            prob += prior * model.lexical_prob(e, f)
        total += math.log(prob)
    return total / m


@dataclass(frozen=True)
class AlignFilterPolicy:
    mode: str = "percentile"
    value: float = 10.0

    def __post_init__(self) -> None:
        if self.mode not in ("percentile", "absolute"):
            raise ValueError(f"unknown policy mode {self.mode!r}")
        if self.mode == "percentile" and not 0 <= self.value < 100:
            raise ValueError(f"percentile must be in [0, 100), got {self.value}")


def filter_by_alignment(
    corpus: Corpus,
    forward: AlignmentModel,
    reverse: AlignmentModel,
    policy: AlignFilterPolicy | None = None,
) -> tuple[Corpus, StageReport]:
    """Score pairs in both directions and drop the poorly aligned ones.

    The combined score is the mean of the two directional scores and is
    stored in each survivor's align_score. Percentile mode drops the lowest
    floor(N * p / 100) scores, with ties resolved so the earlier pair
    survives; absolute mode drops scores below the threshold.
    """
    policy = policy or AlignFilterPolicy()
    scored: list[SentencePair] = []
    for pair in corpus:
        fwd = score_pair(forward, pair)
        rev = score_pair(
            reverse,
            SentencePair(pair.target, pair.source, pair.provenance),
        )
        combined = (fwd + rev) / 2.0
        scored.append(
            SentencePair(pair.source, pair.target, pair.provenance, combined, pair.sim_score)
        )

    if policy.mode == "percentile":
        n_drop = int(len(scored) * policy.value / 100.0)
        drop_order = sorted(
            range(len(scored)), key=lambda i: (scored[i].align_score, -i)
        )
        dropped = set(drop_order[:n_drop])
        kept = [p for i, p in enumerate(scored) if i not in dropped]
    else:
        kept = [p for p in scored if p.align_score >= policy.value]

    report = StageReport(
        stage="align-filter",
        input_count=len(corpus),
        output_count=len(kept),
        removed={"poorly_aligned": len(corpus) - len(kept)},
    )
    return corpus.with_pairs(kept), report


def write_model(model: AlignmentModel, path: str | Path) -> None:
    """Serialize a model as a versioned textual table, one `e f prob` line per entry."""
    with open(Path(path), "w", encoding="utf-8", newline="\n") as f:
        f.write("#align-v1\n")
        f.write(f"source_lang\t{model.source_lang}\n")
        f.write(f"target_lang\t{model.target_lang}\n")
        f.write(f"p0\t{model.p0!r}\n")
        f.write(f"tension\t{model.tension!r}\n")
        f.write(f"smoothing_floor\t{model.smoothing_floor!r}\n")
        f.write("ttable\n")
        for e in sorted(model.ttable):
            row = model.ttable[e]
            for t in sorted(row):
                f.write(f"{e} {t} {row[t]!r}\n")


def read_model(path: str | Path) -> AlignmentModel:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        lines = f.read().rstrip("\n").split("\n")
    if not lines or lines[0] != "#align-v1":
        raise CorpusFormatError(f"{path}: not an alignment model file (missing #align-v1)")
    header: dict[str, str] = {}
    idx = 1
    while idx < len(lines) and lines[idx] != "ttable":
        key, _, value = lines[idx].partition("\t")
        header[key] = value
        idx += 1
    if idx == len(lines):
        raise CorpusFormatError(f"{path}: missing ttable section")
    ttable: dict[str, dict[str, float]] = {}
    for lineno, line in enumerate(lines[idx + 1 :], start=idx + 2):
        try:
            e, t, prob = line.split(" ")
            ttable.setdefault(e, {})[t] = float(prob)
        except ValueError:
            raise CorpusFormatError(f"{path}:{lineno}: malformed ttable line {line!r}") from None
    try:
        return AlignmentModel(
            ttable=ttable,
            p0=float(header["p0"]),
            tension=float(header["tension"]),
            source_lang=header["source_lang"],
            target_lang=header["target_lang"],
            smoothing_floor=float(header["smoothing_floor"]),
        )
    except KeyError as exc:
        raise CorpusFormatError(f"{path}: missing header field {exc}") from None
