from __future__ import annotations

import json
import os

import pytest

from dialokit.cli import main

DIALOGUES = [
    {"id": "1", "dialogue": "Keith: Meg, pls buy some milk\nMegan: sure, I can do that",
     "summary": "Megan will buy milk."},
    {"id": "2", "dialogue": "Orion: I miss him :(\nCordelia: he cheated on you",
     "summary": "Orion is grieving."},
    {"id": "3", "dialogue": "Taylor: I have a question!!\nIsabel: Yes?\nColin: hi",
     "summary": "Taylor has a question."},
]


@pytest.fixture
def corpus_path(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text("\n".join(json.dumps(d) for d in DIALOGUES) + "\n",
                    encoding="utf-8")
    return str(path)


def read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def test_validate_ok(corpus_path, capsys):
    assert main(["validate", "--in", corpus_path]) == 0
    assert "3 records ok" in capsys.readouterr().out


def test_validate_bad_corpus(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "1", "dialogue": ""}\n')
    assert main(["validate", "--in", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_file_is_io_error(tmp_path, capsys):
    assert main(["validate", "--in", str(tmp_path / "nope.jsonl")]) == 2


def test_stats(corpus_path, capsys):
    assert main(["stats", "--in", corpus_path]) == 0
    out = capsys.readouterr().out
    assert "dialogues: 3" in out
    assert "mean_speakers" in out


def test_sub_restore_pipeline(tmp_path, corpus_path):
    subbed = str(tmp_path / "subbed.jsonl")
    maps = str(tmp_path / "maps.jsonl")
    assert main(["sub-names", "--in", corpus_path, "--out", subbed,
                 "--maps-out", maps, "--seed", "42"]) == 0
    sub_records = read_jsonl(subbed)
    assert [r["id"] for r in sub_records] == ["1", "2", "3"]
    # summaries untouched
    assert sub_records[0]["summary"] == "Megan will buy milk."
    map_records = read_jsonl(maps)
    assert {r["dialogue_id"] for r in map_records} == {"1", "2", "3"}
    assert os.path.exists(subbed + ".manifest.json")

    # restore a candidate summary mentioning a replacement
    repl = next(p["replacement"] for r in map_records if r["dialogue_id"] == "1"
                for p in r["pairs"] if p["original"] == "Megan")
    cands = str(tmp_path / "cands.jsonl")
    with open(cands, "w") as fh:
        fh.write(json.dumps({"id": "1", "text": f"{repl} buys milk."}) + "\n")
    restored = str(tmp_path / "restored.jsonl")
    assert main(["restore-names", "--in", cands, "--maps", maps,
                 "--out", restored]) == 0
    assert read_jsonl(restored)[0]["text"] == "Megan buys milk."


def test_mark_neg(tmp_path):
    corpus = tmp_path / "neg.jsonl"
    corpus.write_text(json.dumps(
        {"id": "1", "dialogue": "A: I don't know what to do", "summary": ""}) + "\n")
    out = str(tmp_path / "marked.jsonl")
    assert main(["mark-neg", "--in", str(corpus), "--out", out]) == 0
    rec = read_jsonl(out)[0]
    assert rec["turns"][0]["text"] == "I don't <NEG> know what to do <\\NEG>"


def test_mark_neg_custom_markers(tmp_path):
    corpus = tmp_path / "neg.jsonl"
    corpus.write_text(json.dumps(
        {"id": "1", "dialogue": "A: I don't know", "summary": ""}) + "\n")
    out = str(tmp_path / "marked.jsonl")
    assert main(["mark-neg", "--in", str(corpus), "--out", out,
                 "--neg-open", "<N>", "--neg-close", "</N>"]) == 0
    assert read_jsonl(out)[0]["turns"][0]["text"] == "I don't <N> know </N>"


def test_mark_neg_external_annotations(tmp_path):
    corpus = tmp_path / "neg.jsonl"
    corpus.write_text(json.dumps(
        {"id": "1", "dialogue": "A: I don't know what to do", "summary": ""}) + "\n")
    anns = tmp_path / "anns.jsonl"
    # rendered text "A: I don't know what to do": tokens A : I don't know what to do
    anns.write_text(json.dumps(
        {"id": "1", "annotations": [{"cue": [3, 4], "scope": [4, 8]}]}) + "\n")
    out = str(tmp_path / "marked.jsonl")
    assert main(["mark-neg", "--in", str(corpus), "--out", out,
                 "--annotations", str(anns)]) == 0
    assert read_jsonl(out)[0]["turns"][0]["text"] == \
        "I don't <NEG> know what to do <\\NEG>"


def test_build_tfidf_and_corrupt(tmp_path, corpus_path):
    model_path = str(tmp_path / "tfidf.json")
    assert main(["build-tfidf", "--in", corpus_path, "--out", model_path]) == 0
    model = json.load(open(model_path))
    assert model["doc_count"] == 3

    out = str(tmp_path / "corrupted.jsonl")
    assert main(["corrupt", "--in", corpus_path, "--out", out,
                 "--objective", "tfidf", "--objective", "pronoun",
                 "--objective", "entity",
                 "--tfidf-model", model_path, "--seed", "1"]) == 0
    records = read_jsonl(out)
    assert len(records) == 3
    for rec in records:
        assert rec["task"] == "Denoise"
        assert rec["target"]
        assert set(rec["objectives"]) <= {"TfIdf", "Pronoun", "Entity"}


def test_corrupt_word_p1(tmp_path, corpus_path):
    out = str(tmp_path / "c.jsonl")
    assert main(["corrupt", "--in", corpus_path, "--out", out,
                 "--objective", "word", "--p-mask", "1.0", "--seed", "0"]) == 0
    rec = read_jsonl(out)[0]
    assert "<mask>" in rec["source"]
    assert "milk" not in rec["source"]
    assert "milk" in rec["target"]


def test_corrupt_determinism_across_jobs(tmp_path, corpus_path):
    outs = []
    for jobs, name in [(1, "a"), (1, "b"), (8, "c")]:
        out = str(tmp_path / f"{name}.jsonl")
        assert main(["--jobs", str(jobs), "corrupt", "--in", corpus_path,
                     "--out", out, "--objective", "span", "--seed", "7"]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1] == outs[2]


def test_mix_with_config(tmp_path):
    roc = tmp_path / "roc.jsonl"
    with open(roc, "w") as fh:
        for i in range(5):
            fh.write(json.dumps({"id": f"s{i}",
                                 "sentences": ["a.", "b.", "c.", "d.", "e."]}) + "\n")
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(f'''
global_seed = 9
[mix]
strategy = "proportional"
epoch_size = 12
[[mix.component]]
task = "Roc"
path = "{roc}"
''')
    out = str(tmp_path / "mixed.jsonl")
    assert main(["--config", str(cfg), "mix", "--out", out]) == 0
    records = read_jsonl(out)
    assert len(records) == 12
    assert all(r["task"] == "Roc" for r in records)


def test_mix_without_config_errors(tmp_path, capsys):
    assert main(["mix", "--out", str(tmp_path / "x.jsonl")]) == 1


def test_config_unknown_key_rejected(tmp_path, corpus_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("nonsense_key = 1\n")
    assert main(["--config", str(cfg), "validate", "--in", corpus_path]) == 1


def test_rouge_and_speaker_analysis(tmp_path, corpus_path, capsys):
    pairs = tmp_path / "pairs.jsonl"
    with open(pairs, "w") as fh:
        for d in DIALOGUES:
            fh.write(json.dumps({"id": d["id"], "candidate": d["summary"],
                                 "reference": d["summary"]}) + "\n")
    scores = str(tmp_path / "scores.jsonl")
    assert main(["rouge", "--in", str(pairs), "--out", scores]) == 0
    out = capsys.readouterr().out
    assert "rouge-1 f1: 1.000000" in out
    score_records = read_jsonl(scores)
    assert all(r["r1"]["f1"] == 1.0 for r in score_records)

    buckets = str(tmp_path / "buckets.csv")
    assert main(["speaker-analysis", "--corpus", corpus_path,
                 "--scores", scores, "--out", buckets]) == 0
    lines = open(buckets).read().strip().split("\n")
    assert lines[0] == "n_speakers,n_dialogues,r1,r2,rl"
    assert lines[1].startswith("2,2,")
    assert lines[2].startswith("3,1,")


def test_rouge_with_stem_flag(tmp_path, capsys):
    pairs = tmp_path / "pairs.jsonl"
    pairs.write_text(json.dumps({"id": "1", "candidate": "running fast",
                                 "reference": "run fast"}) + "\n")
    scores = str(tmp_path / "scores.jsonl")
    assert main(["rouge", "--in", str(pairs), "--out", scores, "--stem"]) == 0
    assert read_jsonl(scores)[0]["r1"]["f1"] == 1.0


def test_manifest_contents(tmp_path, corpus_path):
    out = str(tmp_path / "c.jsonl")
    assert main(["corrupt", "--in", corpus_path, "--out", out,
                 "--objective", "word", "--seed", "5"]) == 0
    manifest = json.load(open(out + ".manifest.json"))
    assert manifest["tool"] == "dialokit"
    assert manifest["seed"] == 5
    assert manifest["subcommand"] == "corrupt"
    assert corpus_path in manifest["inputs"]
    assert len(manifest["config_hash"]) == 64
