"""ROUGE-1/2/L scoring, corpus aggregation, and per-speaker-count analysis.

ROUGE-L is computed over the full token sequences (no sentence-level union
LCS). Name restoration, when substitution maps are supplied, is applied to
each candidate before scoring so references stay untouched.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from . import stemmer
from .corpus import Dialogue
from .errors import ValidationError
from .names import SubstitutionMap, restore_names

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "RougeScore":
        denom = precision + recall
        f1 = 2 * precision * recall / denom if denom > 0 else 0.0
        return cls(precision, recall, f1)


ZERO_SCORE = RougeScore(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ScoreTriple:
    r1: RougeScore
    r2: RougeScore
    rl: RougeScore


@dataclass(frozen=True)
class SpeakerBucket:
    n_speakers: int
    n_dialogues: int
    mean_r1: float
    mean_r2: float
    mean_rl: float


def normalize(text: str, stem: bool = False) -> list[str]:
    """Lowercase, split into maximal alphanumeric runs, optionally Porter-stem."""
    tokens = _WORD_RE.findall(text.lower())
    if stem:
        tokens = [stemmer.stem(t) for t in tokens]
    return tokens


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: list[str], reference: list[str], n: int) -> RougeScore:
    """Clipped n-gram overlap precision/recall/F1."""
    if n not in (1, 2):
        raise ValidationError(f"rouge_n supports n in {{1, 2}}, got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    overlap = sum((cand & ref).values())
    n_cand = sum(cand.values())
    n_ref = sum(ref.values())
    precision = overlap / n_cand if n_cand else 0.0
    recall = overlap / n_ref if n_ref else 0.0
    return RougeScore.from_pr(precision, recall)


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length, O(len(a) * len(b))."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: list[str], reference: list[str]) -> RougeScore:
    if not candidate or not reference:
        return ZERO_SCORE
    length = lcs_length(candidate, reference)
    return RougeScore.from_pr(length / len(candidate), length / len(reference))


def score_pair(candidate: str, reference: str, stem: bool = False) -> ScoreTriple:
    cand = normalize(candidate, stem)
    ref = normalize(reference, stem)
    return ScoreTriple(r1=rouge_n(cand, ref, 1), r2=rouge_n(cand, ref, 2),
                       rl=rouge_l(cand, ref))


def evaluate_corpus(
    pairs: list[tuple[str, str, str]],
    maps: dict[str, SubstitutionMap] | None = None,
    stem: bool = False,
) -> tuple[list[tuple[str, ScoreTriple]], dict[str, float]]:
    """Score (id, candidate, reference) pairs; returns per-id scores in input
    order plus unweighted corpus mean F1 per metric.

    Candidates with a substitution map get their original names restored
    before scoring.
    """
    seen: set[str] = set()
    scores: list[tuple[str, ScoreTriple]] = []
    for pair_id, candidate, reference in pairs:
        if pair_id in seen:
            raise ValidationError(f"duplicate pair id {pair_id!r}")
        seen.add(pair_id)
        if reference is None:
            raise ValidationError(f"pair {pair_id!r} is missing a reference")
        if maps and pair_id in maps:
            candidate = restore_names(candidate, maps[pair_id])
        scores.append((pair_id, score_pair(candidate, reference, stem)))
    n = len(scores)
    means = {
        "r1": sum(t.r1.f1 for _, t in scores) / n if n else 0.0,
        "r2": sum(t.r2.f1 for _, t in scores) / n if n else 0.0,
        "rl": sum(t.rl.f1 for _, t in scores) / n if n else 0.0,
    }
    return scores, means


def speaker_analysis(
    dialogues: list[Dialogue],
    scores: list[tuple[str, ScoreTriple]],
) -> list[SpeakerBucket]:
    """Group per-dialogue F1 by distinct-speaker count, ascending."""
    by_id = {d.id: d for d in dialogues}
    buckets: dict[int, list[ScoreTriple]] = {}
    for pair_id, triple in scores:
        if pair_id not in by_id:
            raise ValidationError(f"score id {pair_id!r} not in the corpus")
        n = len(by_id[pair_id].speakers())
        buckets.setdefault(n, []).append(triple)
    result = []
    for n in sorted(buckets):
        triples = buckets[n]
        count = len(triples)
        result.append(SpeakerBucket(
            n_speakers=n, n_dialogues=count,
            mean_r1=sum(t.r1.f1 for t in triples) / count,
            mean_r2=sum(t.r2.f1 for t in triples) / count,
            mean_rl=sum(t.rl.f1 for t in triples) / count,
        ))
    return result
