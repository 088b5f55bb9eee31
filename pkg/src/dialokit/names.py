"""Reversible speaker-name substitution.

Every distinct speaker is replaced by a randomly drawn common name of the
same inferred gender; the reference summary is left untouched, and originals
are written back into generated summaries before scoring. Names whose gender
the lexicon does not know draw from the union of both pools (pools stay
pluggable so non-binary name lists can be supplied).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .corpus import Dialogue, Turn
from .errors import PoolExhaustedError, ValidationError
from .rng import RngStream

MAX_REDRAWS = 64


class Gender(Enum):
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GenderLexicon:
    """Case-insensitive given-name -> gender lookup; absent names are Unknown."""

    entries: dict[str, Gender]

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "GenderLexicon":
        return cls({name.lower(): Gender(g) for name, g in mapping.items()})

    def lookup(self, name: str) -> Gender:
        return self.entries.get(name.lower(), Gender.UNKNOWN)


@dataclass(frozen=True)
class NamePool:
    male: tuple[str, ...]
    female: tuple[str, ...]

    def __post_init__(self):
        for label, pool in (("male", self.male), ("female", self.female)):
            if not pool:
                raise ValidationError(f"{label} name pool is empty")
            if len(set(pool)) != len(pool):
                raise ValidationError(f"{label} name pool has duplicates")

    def candidates(self, gender: Gender) -> tuple[str, ...]:
        if gender is Gender.MALE:
            return self.male
        if gender is Gender.FEMALE:
            return self.female
        return self.male + self.female


@dataclass(frozen=True)
class SubstitutionMap:
    dialogue_id: str
    pairs: tuple[tuple[str, str, Gender], ...]  # (original, replacement, gender)

    def to_record(self) -> dict[str, Any]:
        return {
            "dialogue_id": self.dialogue_id,
            "pairs": [{"original": o, "replacement": r, "gender": g.value}
                      for o, r, g in self.pairs],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SubstitutionMap":
        return cls(
            dialogue_id=str(rec["dialogue_id"]),
            pairs=tuple((p["original"], p["replacement"], Gender(p["gender"]))
                        for p in rec["pairs"]),
        )


def infer_gender(name: str, lexicon: GenderLexicon) -> Gender:
    """Gender of the lowercased first whitespace-separated component."""
    if not name:
        raise ValidationError("cannot infer gender of an empty name")
    return lexicon.lookup(name.split()[0])


def _word_pattern(names: Iterable[str]) -> re.Pattern:
    # Longest-first alternation so e.g. "Bobby" is never shadowed by "Bob".
    ordered = sorted(names, key=len, reverse=True)
    alternation = "|".join(re.escape(n) for n in ordered)
    return re.compile(rf"(?<!\w)(?:{alternation})(?!\w)")


def _occurs_as_word(name: str, text: str) -> bool:
    return re.search(rf"(?<!\w){re.escape(name)}(?!\w)", text) is not None


def substitute_names(
    dialogue: Dialogue,
    lexicon: GenderLexicon,
    pool: NamePool,
    rng: RngStream,
) -> tuple[Dialogue, SubstitutionMap]:
    """Replace every distinct speaker name, reversibly.

    Replacements are drawn with ``rng.choice`` from the matching-gender pool
    (union pool for Unknown), redrawing when a draw collides with an original
    name, an already-used replacement, or any word in the dialogue text. The
    replacement is applied to speaker fields and to whole-word, case-sensitive
    in-text mentions including possessives; the reference summary is never
    modified.
    """
    rendered = dialogue.render()
    speakers = dialogue.speakers()
    forbidden = set(speakers)
    pairs: list[tuple[str, str, Gender]] = []

    for original in speakers:
        gender = infer_gender(original, lexicon)
        candidates = pool.candidates(gender)
        replacement = None
        for _ in range(MAX_REDRAWS):
            candidate = candidates[rng.choice(len(candidates))]
            if candidate in forbidden or _occurs_as_word(candidate, rendered):
                continue
            replacement = candidate
            break
        if replacement is None:
            raise PoolExhaustedError(
                f"dialogue {dialogue.id!r}: no valid replacement for {original!r} "
                f"after {MAX_REDRAWS} draws")
        forbidden.add(replacement)
        pairs.append((original, replacement, gender))

    mapping = {orig: repl for orig, repl, _ in pairs}
    pattern = _word_pattern(mapping) if mapping else None

    def rewrite(text: str) -> str:
        if pattern is None:
            return text
        return pattern.sub(lambda m: mapping[m.group(0)], text)

    new_turns = tuple(
        Turn(speaker=mapping.get(t.speaker, t.speaker), text=rewrite(t.text))
        for t in dialogue.turns
    )
    substituted = Dialogue(id=dialogue.id, turns=new_turns, summary=dialogue.summary)
    return substituted, SubstitutionMap(dialogue_id=dialogue.id, pairs=tuple(pairs))


def restore_names(text: str, subst_map: SubstitutionMap) -> str:
    """Rewrite whole-word replacement mentions (and possessives) back to the
    originals, longest replacement first."""
    if not subst_map.pairs:
        return text
    back = {repl: orig for orig, repl, _ in subst_map.pairs}
    return _word_pattern(back).sub(lambda m: back[m.group(0)], text)
