from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from dialokit.corpus import (
    Dialogue,
    Seq2SeqExample,
    Task,
    Turn,
    corpus_stats,
    emit_records,
    load_corpus,
    parse_dialogue,
)
from dialokit.errors import CorpusFormatError, ValidationError


def test_parse_keeps_emoticon_in_text():
    d = parse_dialogue({"id": "1", "dialogue": "Orion: I miss him :(",
                        "summary": "s"})
    assert d.turns == (Turn("Orion", "I miss him :("),)
    assert d.summary == "s"


def test_parse_first_colon_split():
    d = parse_dialogue({
        "id": "2",
        "dialogue": "Keith: Meg, pls buy some milk and cereals, I see now we've run out of them",
        "summary": "",
    })
    assert d.turns[0].speaker == "Keith"
    assert d.turns[0].text.startswith("Meg, pls buy")


def test_parse_empty_dialogue_is_error():
    with pytest.raises(ValidationError):
        parse_dialogue({"id": "3", "dialogue": "", "summary": ""})


def test_parse_missing_id_is_error():
    with pytest.raises(ValidationError):
        parse_dialogue({"dialogue": "A: hi"})


def test_parse_first_line_without_colon_is_error():
    with pytest.raises(ValidationError):
        parse_dialogue({"id": "4", "dialogue": "hello there"})


def test_continuation_line_merges():
    d = parse_dialogue({"id": "5", "dialogue": "A: first line\nsecond line\nB: ok"})
    assert d.turns == (Turn("A", "first line second line"), Turn("B", "ok"))


def test_crlf_accepted():
    d = parse_dialogue({"id": "6", "dialogue": "A: hi\r\nB: yo"})
    assert [t.speaker for t in d.turns] == ["A", "B"]


def test_canonical_turns_form():
    d = parse_dialogue({"id": "7", "turns": [{"speaker": "A", "text": "hi"}],
                        "summary": "x"})
    assert d.turns == (Turn("A", "hi"),)


def test_speaker_with_colon_rejected():
    with pytest.raises(ValidationError):
        Turn("A:B", "hi")


def test_render():
    d = Dialogue(id="1", turns=(Turn("A", "hi"), Turn("B", "yo")), summary="")
    assert d.render() == "A: hi\nB: yo"


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert load_corpus(str(path)) == []


def test_duplicate_id_names_both_lines(tmp_path):
    path = tmp_path / "dup.jsonl"
    lines = [json.dumps({"id": str(i), "dialogue": "A: hi"}) for i in [1, 2, 1]]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusFormatError) as exc:
        load_corpus(str(path))
    assert "line 1" in str(exc.value)
    assert ":3:" in str(exc.value)


def test_malformed_line_reports_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "1", "dialogue": "A: hi"}\nnot json\n')
    with pytest.raises(CorpusFormatError) as exc:
        load_corpus(str(path))
    assert ":2:" in str(exc.value)


speakers_st = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll")), min_size=1, max_size=8)
texts_st = st.text(
    st.characters(blacklist_characters="\r\n", blacklist_categories=("Cs", "Cc")),
    max_size=40)


@st.composite
def corpora(draw):
    n = draw(st.integers(1, 5))
    dialogues = []
    for i in range(n):
        turns = tuple(
            Turn(draw(speakers_st), draw(texts_st))
            for _ in range(draw(st.integers(1, 4))))
        dialogues.append(Dialogue(id=f"d{i}", turns=turns,
                                  summary=draw(texts_st)))
    return dialogues


@given(corpora())
def test_load_emit_round_trip(tmp_path_factory, dialogues):
    tmp = tmp_path_factory.mktemp("rt")
    first, second = str(tmp / "a.jsonl"), str(tmp / "b.jsonl")
    emit_records(first, dialogues)
    loaded = load_corpus(first)
    assert loaded == dialogues
    emit_records(second, loaded)
    assert open(first, "rb").read() == open(second, "rb").read()


def test_corpus_stats():
    dialogues = [
        Dialogue(id="1", turns=(Turn("A", "x"), Turn("B", "y"), Turn("A", "z"))),
        Dialogue(id="2", turns=(Turn("A", "x"),)),
    ]
    stats = corpus_stats(dialogues)
    assert stats["dialogues"] == 2
    assert stats["mean_speakers"] == pytest.approx(1.5)
    assert stats["mean_turns"] == pytest.approx(2.0)


def test_seq2seq_invariants():
    ex = Seq2SeqExample(id="1", source="s", target="t", task=Task.SUMM)
    assert ex.to_record()["task"] == "Summ"
    with pytest.raises(ValidationError):
        Seq2SeqExample(id="1", source="", target="t", task=Task.SUMM)
    with pytest.raises(ValidationError):
        Seq2SeqExample(id="1", source="s", target="", task=Task.DENOISE)


def test_seq2seq_record_round_trip():
    ex = Seq2SeqExample(id="1", source="s", target="t", task=Task.ROC)
    assert Seq2SeqExample.from_record(ex.to_record()) == ex
