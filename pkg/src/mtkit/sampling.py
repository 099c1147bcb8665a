"""Temperature-based corpus re-balancing and multilingual tagging/mixing.

Low-resource directions are upsampled with a ratio derived from tempered
language probabilities: with p_l = n_l / sum(n) and temperature T,

    lambda_l = (1 / p_l) * p_l**(1/T) / sum_k p_k**(1/T)

so that the expected post-mix language distribution is the tempered one.
T=1 leaves every ratio at 1; larger T flattens the mixture toward uniform.
Fractional ratios are realized per pair with a keyed Bernoulli draw instead
of rounding, keeping expected counts exact and reruns bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import Corpus, SentencePair
from .determinism import keyed_shuffle, keyed_uniform


def compute_ratios(sizes: list[int], temperature: float) -> list[float]:
    """Upsampling ratio per language from corpus sizes, in double precision."""
    if not sizes:
        raise ValueError("need at least one size")
    for i, n in enumerate(sizes):
        if n <= 0:
            raise ValueError(f"size {i} must be a positive integer, got {n}")
    if temperature < 1:
        raise ValueError(f"temperature must be >= 1, got {temperature}")
    if temperature == 1:
        # The formula collapses to exactly 1 for every language; returning
        # the literal value keeps the identity exact in floating point.
        return [1.0] * len(sizes)
    total = sum(sizes)
    probs = [n / total for n in sizes]
    tempered = [p ** (1.0 / temperature) for p in probs]
    z = sum(tempered)
    return [(1.0 / p) * (t / z) for p, t in zip(probs, tempered)]


@dataclass(frozen=True)
class SamplingPlan:
    languages: list[str]
    sizes: list[int]
    temperature: float = 2.0
    seed: int = 0
    ratios: list[float] = field(init=False)

    def __post_init__(self) -> None:
        if len(self.languages) != len(self.sizes):
            raise ValueError(
                f"{len(self.languages)} languages but {len(self.sizes)} sizes"
            )
        object.__setattr__(
            self, "ratios", compute_ratios(self.sizes, self.temperature)
        )

    def ratio_for(self, lang: str) -> float:
        try:
            return self.ratios[self.languages.index(lang)]
        except ValueError:
            raise ValueError(f"language {lang!r} not covered by the sampling plan") from None


def replicate_fractional(
    pairs: tuple[SentencePair, ...], ratio: float, seed: int, label: str
) -> list[SentencePair]:
    """Replicate pairs floor(ratio) times plus one Bernoulli(frac) pass.

    The inclusion draw for pair i depends only on (seed, label, i), so the
    result is independent of sharding and call order.
    """
    if ratio < 0:
        raise ValueError(f"ratio must be >= 0, got {ratio}")
    whole = int(ratio)
    frac = ratio - whole
    out: list[SentencePair] = []
    for _ in range(whole):
        out.extend(pairs)
    if frac > 0:
        out.extend(
            pair
            for i, pair in enumerate(pairs)
            if keyed_uniform(seed, label, i) < frac
        )
    return out


def upsample(corpora: dict[str, Corpus], plan: SamplingPlan) -> dict[str, Corpus]:
    """Apply the plan's ratio to each language's corpus."""
    missing = [lang for lang in corpora if lang not in plan.languages]
    if missing:
        raise ValueError(f"languages missing from the sampling plan: {missing}")
    out = {}
    for lang, corpus in corpora.items():
        ratio = plan.ratio_for(lang)
        out[lang] = corpus.with_pairs(
            replicate_fractional(corpus.pairs, ratio, plan.seed, f"upsample:{lang}")
        )
    return out


@dataclass(frozen=True)
class TagScheme:
    tags: dict[str, str]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for lang, tag in self.tags.items():
            if len(tag.split()) != 1 or tag != tag.strip():
                raise ValueError(f"tag for {lang!r} must be a single token, got {tag!r}")
            if tag in seen:
                raise ValueError(f"duplicate tag {tag!r}")
            seen.add(tag)

    @classmethod
    def for_languages(cls, languages: list[str]) -> "TagScheme":
        return cls({lang: f"<{lang}>" for lang in languages})


def tag_language(corpus: Corpus, scheme: TagScheme, target_lang: str) -> Corpus:
    """Prepend the target-language tag token to every source text.

    Not idempotent: applying twice double-tags. Pipelines apply it once,
    on one-to-many mixtures only.
    """
    if target_lang not in scheme.tags:
        raise ValueError(f"no tag defined for target language {target_lang!r}")
    tag = scheme.tags[target_lang]
    return corpus.with_pairs(
        SentencePair(f"{tag} {p.source}", p.target, p.provenance, p.align_score, p.sim_score)
        for p in corpus
    )


def mix_shuffle(corpora: list[Corpus], seed: int) -> Corpus:
    """Concatenate corpora and apply a seeded Fisher-Yates shuffle."""
    if not corpora:
        raise ValueError("nothing to mix")
    pairs: list[SentencePair] = []
    for c in corpora:
        pairs.extend(c.pairs)
    shuffled = keyed_shuffle(pairs, seed, "mix")
    return corpora[0].with_pairs(shuffled)
