"""Denoising-corruption planning for in-domain pretraining data.

Five objectives are supported: whole-word masking, Poisson-span masking,
pronoun masking, TF-IDF high-content masking, and entity masking. Objectives
compose in a fixed priority order (Entity, Pronoun, TfIdf, then Word or Span);
a token claimed by an earlier objective is skipped by later ones. All draws
happen in token order within each objective, so plans are bit-reproducible
from the per-document RNG stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .corpus import Dialogue, Seq2SeqExample, Task
from .errors import ValidationError
from .rng import RngStream
from .tokens import Token, TokenKind, split_sentences, tokenize


class Objective(Enum):
    WORD = "Word"
    SPAN = "Span"
    PRONOUN = "Pronoun"
    TFIDF = "TfIdf"
    ENTITY = "Entity"


DEFAULT_PRIORITY = (Objective.ENTITY, Objective.PRONOUN, Objective.TFIDF,
                    Objective.WORD, Objective.SPAN)


@dataclass(frozen=True)
class CorruptionConfig:
    objectives: frozenset[Objective]
    p_mask: float = 0.3
    lam: float = 3.0
    p_mask_pronoun: float = 0.5
    tfidf_top_frac: float = 0.25
    p_mask_tfidf: float = 0.7
    p_mask_entity: float = 0.7
    mask_token: str = "<mask>"
    priority: tuple[Objective, ...] = DEFAULT_PRIORITY

    def __post_init__(self):
        for name in ("p_mask", "p_mask_pronoun", "tfidf_top_frac",
                     "p_mask_tfidf", "p_mask_entity"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1], got {v}")
        if self.lam <= 0:
            raise ValidationError(f"lambda must be > 0, got {self.lam}")
        if Objective.WORD in self.objectives and Objective.SPAN in self.objectives:
            raise ValidationError("Word and Span objectives are mutually exclusive")
        if not self.mask_token:
            raise ValidationError("mask_token must be non-empty")


@dataclass(frozen=True)
class TfIdfModel:
    doc_count: int
    df: dict[str, int]

    def idf(self, term: str) -> float:
        return math.log((1 + self.doc_count) / (1 + self.df.get(term, 0))) + 1.0

    def to_record(self) -> dict[str, Any]:
        return {"doc_count": self.doc_count, "df": self.df}

    @classmethod
    def from_record(cls, rec: dict) -> "TfIdfModel":
        return cls(doc_count=int(rec["doc_count"]),
                   df={str(k): int(v) for k, v in rec["df"].items()})


@dataclass
class MaskPlan:
    dialogue_id: str
    # (start, end, origin) half-open token-index ranges, non-overlapping, sorted
    ranges: list[tuple[int, int, Objective]] = field(default_factory=list)
    # lengths drawn for the Span objective before any truncation, for rate checks
    drawn_span_lengths: list[int] = field(default_factory=list)


def doc_terms(tokens: list[Token]) -> list[str]:
    return [t.text.lower() for t in tokens if t.kind is TokenKind.WORD]


def build_tfidf(corpus: list[Dialogue]) -> TfIdfModel:
    """Document frequencies over lowercased Word tokens, one document per
    dialogue's rendered text."""
    if not corpus:
        raise ValidationError("cannot build a TF-IDF model from an empty corpus")
    df: dict[str, int] = {}
    for d in corpus:
        for term in set(doc_terms(tokenize(d.render()))):
            df[term] = df.get(term, 0) + 1
    return TfIdfModel(doc_count=len(corpus), df=df)


def tfidf_weights(tokens: list[Token], model: TfIdfModel) -> dict[str, float]:
    """weight(t) = raw count in this document x idf(t)."""
    tf: dict[str, int] = {}
    for term in doc_terms(tokens):
        tf[term] = tf.get(term, 0) + 1
    return {term: count * model.idf(term) for term, count in tf.items()}


def top_tfidf_terms(tokens: list[Token], model: TfIdfModel,
                    top_frac: float) -> set[str]:
    """The ceil(top_frac x distinct-term-count) highest-weighted terms of one
    document. Ties break lexicographically for determinism."""
    weights = tfidf_weights(tokens, model)
    if not weights:
        return set()
    k = math.ceil(top_frac * len(weights))
    ranked = sorted(weights.items(), key=lambda item: (-item[1], item[0]))
    return {term for term, _ in ranked[:k]}


def detect_entities(dialogue: Dialogue, gazetteer: frozenset[str],
                    stoplist: frozenset[str],
                    tokens: list[Token] | None = None) -> list[tuple[int, int]]:
    """Gazetteer/capitalization entity candidates over the rendered dialogue.

    A Word token is a candidate iff it equals a speaker name (case-insensitive),
    or its lowercase form is in the gazetteer and it is capitalized, or it is
    capitalized, not sentence-initial, and not a function word. Adjacent
    candidates merge into one range.
    """
    if tokens is None:
        tokens = tokenize(dialogue.render())
    speakers = {s.lower() for s in dialogue.speakers()}
    sentence_starts = {s for s, _ in split_sentences(tokens)}

    candidates: list[int] = []
    for i, tok in enumerate(tokens):
        if tok.kind is not TokenKind.WORD:
            continue
        lower = tok.text.lower()
        capitalized = tok.text[0].isupper()
        if lower in speakers:
            candidates.append(i)
        elif capitalized and lower in gazetteer:
            candidates.append(i)
        elif capitalized and i not in sentence_starts and lower not in stoplist:
            candidates.append(i)

    ranges: list[tuple[int, int]] = []
    for i in candidates:
        if ranges and ranges[-1][1] == i:
            ranges[-1] = (ranges[-1][0], i + 1)
        else:
            ranges.append((i, i + 1))
    return ranges


def speaker_header_spans(dialogue: Dialogue) -> list[tuple[int, int]]:
    """Character spans of the speaker names in the rendered dialogue's
    "Speaker: text" line headers."""
    spans = []
    pos = 0
    for turn in dialogue.turns:
        spans.append((pos, pos + len(turn.speaker)))
        pos += len(turn.speaker) + 2 + len(turn.text) + 1  # ": " ... "\n"
    return spans


def plan_corruption(
    dialogue_id: str,
    tokens: list[Token],
    cfg: CorruptionConfig,
    rng: RngStream,
    tfidf_model: TfIdfModel | None = None,
    entities: list[tuple[int, int]] | None = None,
    pronouns: frozenset[str] = frozenset(),
) -> MaskPlan:
    """Decide which token ranges one corruption pass will collapse to masks."""
    if Objective.TFIDF in cfg.objectives and tfidf_model is None:
        raise ValidationError("TfIdf objective requires a TF-IDF model")
    if Objective.ENTITY in cfg.objectives and entities is None:
        raise ValidationError("Entity objective requires entity ranges")
    if Objective.PRONOUN in cfg.objectives and not pronouns:
        raise ValidationError("Pronoun objective requires a pronoun lexicon")

    plan = MaskPlan(dialogue_id=dialogue_id)
    covered = [False] * len(tokens)

    def claim(start: int, end: int, origin: Objective) -> None:
        for i in range(start, end):
            covered[i] = True
        plan.ranges.append((start, end, origin))

    for objective in cfg.priority:
        if objective not in cfg.objectives:
            continue
        if objective is Objective.ENTITY:
            for start, end in entities:
                if any(covered[start:end]):
                    continue
                if rng.bernoulli(cfg.p_mask_entity):
                    claim(start, end, Objective.ENTITY)
        elif objective is Objective.PRONOUN:
            for i, tok in enumerate(tokens):
                if covered[i] or tok.kind is not TokenKind.WORD:
                    continue
                if tok.text.lower() in pronouns and rng.bernoulli(cfg.p_mask_pronoun):
                    claim(i, i + 1, Objective.PRONOUN)
        elif objective is Objective.TFIDF:
            eligible = top_tfidf_terms(tokens, tfidf_model, cfg.tfidf_top_frac)
            for i, tok in enumerate(tokens):
                if covered[i] or tok.kind is not TokenKind.WORD:
                    continue
                if tok.text.lower() in eligible and rng.bernoulli(cfg.p_mask_tfidf):
                    claim(i, i + 1, Objective.TFIDF)
        elif objective is Objective.WORD:
            for i, tok in enumerate(tokens):
                if covered[i] or tok.kind is not TokenKind.WORD:
                    continue
                if rng.bernoulli(cfg.p_mask):
                    claim(i, i + 1, Objective.WORD)
        elif objective is Objective.SPAN:
            _plan_spans(tokens, cfg, rng, covered, plan)

    plan.ranges.sort(key=lambda r: r[0])
    return plan


def _plan_spans(tokens: list[Token], cfg: CorruptionConfig, rng: RngStream,
                covered: list[bool], plan: MaskPlan) -> None:
    """Poisson-span masking under a token budget of p_mask x word-count.

    Each span collapses to one mask token. The final span is truncated so the
    masked word count never exceeds budget + lambda, keeping the per-document
    overshoot bounded.
    """
    words = [i for i, t in enumerate(tokens) if t.kind is TokenKind.WORD]
    n_words = len(words)
    if n_words == 0:
        return
    budget = cfg.p_mask * n_words
    ceiling = budget + cfg.lam
    word_covered = [covered[i] for i in words]
    available = [wp for wp in range(n_words) if not word_covered[wp]]
    masked = sum(1 for c in word_covered if c)

    while masked < budget and available:
        length = max(1, rng.poisson(cfg.lam))
        plan.drawn_span_lengths.append(length)
        allowed = int(math.floor(ceiling - masked))
        if allowed <= 0:
            break
        start_wp = available[rng.choice(len(available))]
        end_wp = start_wp
        while (end_wp < n_words and not word_covered[end_wp]
               and end_wp - start_wp < min(length, allowed)):
            end_wp += 1
        if end_wp == start_wp:
            continue
        for wp in range(start_wp, end_wp):
            word_covered[wp] = True
        tok_start, tok_end = words[start_wp], words[end_wp - 1] + 1
        for i in range(tok_start, tok_end):
            covered[i] = True
        plan.ranges.append((tok_start, tok_end, Objective.SPAN))
        masked += end_wp - start_wp
        available = [wp for wp in available if not (start_wp <= wp < end_wp)]


def make_denoising_example(dialogue: Dialogue, plan: MaskPlan,
                           cfg: CorruptionConfig) -> Seq2SeqExample:
    """Source = rendered text with each planned range collapsed to one mask
    token; target = the uncorrupted rendered text."""
    target = dialogue.render()
    tokens = tokenize(target)
    source = target
    for start, end, _ in reversed(plan.ranges):
        char_start = tokens[start].start
        char_end = tokens[end - 1].end
        source = source[:char_start] + cfg.mask_token + source[char_end:]
    return Seq2SeqExample(
        id=dialogue.id, source=source, target=target, task=Task.DENOISE,
        extra={"objectives": sorted({o.value for _, _, o in plan.ranges})},
    )
