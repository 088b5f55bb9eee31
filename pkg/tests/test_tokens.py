from __future__ import annotations

from hypothesis import given, strategies as st

from dialokit.tokens import Token, TokenKind, split_sentences, tokenize


def texts(tokens):
    return [t.text for t in tokens]


def kinds(tokens):
    return [t.kind for t in tokens]


def test_empty():
    assert tokenize("") == []


def test_contraction_is_one_token():
    toks = tokenize("I don't know.")
    assert texts(toks) == ["I", "don't", "know", "."]
    assert kinds(toks) == [TokenKind.WORD, TokenKind.WORD, TokenKind.WORD,
                           TokenKind.PUNCT]


def test_emoticon_chars_are_single_puncts():
    toks = tokenize("I miss him :(")
    assert texts(toks) == ["I", "miss", "him", ":", "("]
    assert kinds(toks)[-2:] == [TokenKind.PUNCT, TokenKind.PUNCT]


def test_offsets_slice_back_to_text():
    text = "Keith: Meg, pls buy some milk :D"
    for tok in tokenize(text):
        assert text[tok.start:tok.end] == tok.text


def test_trailing_apostrophe_is_punct():
    toks = tokenize("James' car")
    assert texts(toks) == ["James", "'", "car"]
    assert kinds(toks)[1] == TokenKind.PUNCT


def test_tokens_sorted_nonoverlapping():
    toks = tokenize("a b!! c's 12 d--e")
    for prev, cur in zip(toks, toks[1:]):
        assert prev.end <= cur.start
        assert prev.start < prev.end


@given(st.text(max_size=200))
def test_round_trip_reconstruction(text):
    toks = tokenize(text)
    rebuilt = []
    pos = 0
    for tok in toks:
        assert text[tok.start:tok.end] == tok.text
        assert text[pos:tok.start].strip() == ""  # only whitespace skipped
        rebuilt.append(text[pos:tok.start])
        rebuilt.append(tok.text)
        pos = tok.end
    rebuilt.append(text[pos:])
    assert "".join(rebuilt) == text


@given(st.text(max_size=200))
def test_non_whitespace_fully_covered(text):
    toks = tokenize(text)
    covered = sum(t.end - t.start for t in toks)
    non_ws = sum(1 for ch in text if not ch.isspace())
    assert covered == non_ws


def test_split_sentences_empty():
    assert split_sentences([]) == []


def test_split_sentences_two():
    toks = tokenize("Hi. Bye!")
    spans = split_sentences(toks)
    assert spans == [(0, 2), (2, 4)]
    assert texts(toks[0:2]) == ["Hi", "."]
    assert texts(toks[2:4]) == ["Bye", "!"]


def test_split_sentences_no_terminator():
    toks = tokenize("no punctuation here")
    assert split_sentences(toks) == [(0, 3)]


@given(st.text(max_size=200))
def test_sentence_spans_partition(text):
    toks = tokenize(text)
    spans = split_sentences(toks)
    pos = 0
    for s, e in spans:
        assert s == pos
        assert e > s
        pos = e
    assert pos == len(toks)
