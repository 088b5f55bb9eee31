"""Word/punctuation tokenization with character offsets, plus sentence spans.

Offsets are Unicode scalar-value indices into the source string, so masking
and marker insertion stay encoding-independent. Apostrophes are word-internal
("don't" is one token); the negation cue rules depend on seeing contractions
whole.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

_APOSTROPHES = {"'", "’"}

SENTENCE_FINAL_PUNCT = {".", "!", "?"}


class TokenKind(Enum):
    WORD = "word"
    PUNCT = "punct"


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int
    kind: TokenKind

    @property
    def is_word(self) -> bool:
        return self.kind is TokenKind.WORD


def _is_word_char(ch: str) -> bool:
    return ch.isalnum()


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into Word and Punct tokens with exact offsets.

    Word tokens are maximal runs of Unicode letters/digits with internal
    apostrophes permitted; every other non-whitespace character becomes a
    single Punct token. Concatenating token texts with the skipped whitespace
    reconstructs the input.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_word_char(ch):
            j = i + 1
            while j < n:
                c = text[j]
                if _is_word_char(c):
                    j += 1
                elif c in _APOSTROPHES and j + 1 < n and _is_word_char(text[j + 1]):
                    j += 1
                else:
                    break
            tokens.append(Token(text[i:j], i, j, TokenKind.WORD))
            i = j
        else:
            tokens.append(Token(ch, i, i + 1, TokenKind.PUNCT))
            i += 1
    return tokens


def split_sentences(tokens: list[Token]) -> list[tuple[int, int]]:
    """Partition ``tokens`` into sentence spans (half-open token-index ranges).

    A boundary falls after any Punct token in {. ! ?} and at the end of the
    token list.
    """
    spans: list[tuple[int, int]] = []
    start = 0
    for idx, tok in enumerate(tokens):
        if tok.kind is TokenKind.PUNCT and tok.text in SENTENCE_FINAL_PUNCT:
            spans.append((start, idx + 1))
            start = idx + 1
    if start < len(tokens):
        spans.append((start, len(tokens)))
    return spans
