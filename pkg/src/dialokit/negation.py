"""Rule-based negation cue/scope detection and special-token scope marking.

The detector is a documented approximation: cues come from a closed lexicon
plus the "n't" suffix, and a cue's scope runs to the end of its sentence
(bounded by sentence-final punctuation, the next cue, or a 20-token cap).
Externally produced scope annotations can be ingested in a standoff format
and used in place of the detector without code changes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .tokens import SENTENCE_FINAL_PUNCT, Token, TokenKind, split_sentences, tokenize

CUE_LEXICON = frozenset({
    "no", "not", "never", "none", "nobody", "nothing", "nowhere",
    "neither", "nor", "without", "cannot",
})

SCOPE_TOKEN_CAP = 20

DEFAULT_OPEN_MARKER = "<NEG>"
DEFAULT_CLOSE_MARKER = "<\\NEG>"


@dataclass(frozen=True)
class NegationAnnotation:
    """Cue and scope as half-open token-index ranges; scope may be empty."""

    cue: tuple[int, int]
    scope: tuple[int, int]

    def __post_init__(self):
        if self.scope[0] < self.scope[1] and self.cue[1] > self.scope[0]:
            raise ValidationError("cue must precede its scope")


def _is_cue(token: Token) -> bool:
    if token.kind is not TokenKind.WORD:
        return False
    lower = token.text.lower()
    return lower in CUE_LEXICON or lower.endswith("n't")


def detect_cues(tokens: list[Token]) -> list[tuple[int, int]]:
    """Single-token cue ranges, in token order."""
    return [(i, i + 1) for i, tok in enumerate(tokens) if _is_cue(tok)]


def detect_scope(tokens: list[Token], cue: tuple[int, int]) -> tuple[int, int]:
    """Tokens strictly after the cue, up to the first sentence-final
    punctuation, the next cue, the sentence end, or the 20-token cap."""
    start = cue[1]
    sentence_end = len(tokens)
    for s, e in split_sentences(tokens):
        if s <= cue[0] < e:
            sentence_end = e
            break
    end = start
    while end < sentence_end and end - start < SCOPE_TOKEN_CAP:
        tok = tokens[end]
        if tok.kind is TokenKind.PUNCT and tok.text in SENTENCE_FINAL_PUNCT:
            break
        if _is_cue(tok):
            break
        end += 1
    return (start, end)


def annotate(tokens: list[Token]) -> list[NegationAnnotation]:
    """Run cue detection and scope resolution over one token list."""
    return [NegationAnnotation(cue=cue, scope=detect_scope(tokens, cue))
            for cue in detect_cues(tokens)]


def mark_negation(
    text: str,
    annotations: list[NegationAnnotation],
    open_marker: str = DEFAULT_OPEN_MARKER,
    close_marker: str = DEFAULT_CLOSE_MARKER,
) -> str:
    """Insert open/close markers (space-delimited) around each non-empty scope.

    Marked text strips back to the input exactly: removing "open_marker " and
    " close_marker" undoes the insertion. Input already containing a marker is
    rejected to prevent double marking.
    """
    if not open_marker or not close_marker:
        raise ValidationError("negation markers must be non-empty")
    if open_marker in text or close_marker in text:
        raise ValidationError("input already contains negation markers")

    tokens = tokenize(text)
    scoped = sorted((a for a in annotations if a.scope[0] < a.scope[1]),
                    key=lambda a: a.scope)
    for prev, cur in zip(scoped, scoped[1:]):
        if cur.scope[0] < prev.scope[1]:
            raise ValidationError("overlapping negation scopes")

    out = text
    for ann in reversed(scoped):
        first = tokens[ann.scope[0]]
        last = tokens[ann.scope[1] - 1]
        out = out[:last.end] + " " + close_marker + out[last.end:]
        out = out[:first.start] + open_marker + " " + out[first.start:]
    return out


def strip_markers(text: str, open_marker: str = DEFAULT_OPEN_MARKER,
                  close_marker: str = DEFAULT_CLOSE_MARKER) -> str:
    """Inverse of mark_negation (removes markers with their delimiting spaces)."""
    return text.replace(open_marker + " ", "").replace(" " + close_marker, "")


def annotations_from_record(rec: dict) -> list[NegationAnnotation]:
    """Parse one standoff record {"id", "annotations": [{"cue": [s, e],
    "scope": [s, e]}]} with half-open token-index ranges."""
    anns = []
    for item in rec.get("annotations", []):
        cue = tuple(item["cue"])
        scope = tuple(item.get("scope", (cue[1], cue[1])))
        if len(cue) != 2 or len(scope) != 2:
            raise ValidationError("annotation ranges must be [start, end] pairs")
        anns.append(NegationAnnotation(cue=(int(cue[0]), int(cue[1])),
                                       scope=(int(scope[0]), int(scope[1]))))
    return anns
