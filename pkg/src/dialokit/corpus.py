"""Dialogue corpus parsing, validation, and JSONL serialization.

Two on-disk input shapes are accepted, one record per line:

  raw form        {"id": ..., "dialogue": "Speaker: text\\n...", "summary": ...}
  canonical form  {"id": ..., "turns": [{"speaker": ..., "text": ...}], "summary": ...}

Only the canonical form is ever emitted, so downstream parsing is unambiguous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator, TextIO

from .errors import CorpusFormatError, ValidationError


class Task(Enum):
    SUMM = "Summ"
    ROC = "Roc"
    COMMONGEN = "CommonGen"
    CONCEPTNET = "ConceptNet"
    DENOISE = "Denoise"


@dataclass(frozen=True)
class Turn:
    speaker: str
    text: str

    def __post_init__(self):
        if not self.speaker:
            raise ValidationError("turn speaker must be non-empty")
        if ":" in self.speaker:
            raise ValidationError(f"speaker {self.speaker!r} contains ':'")


@dataclass(frozen=True)
class Dialogue:
    id: str
    turns: tuple[Turn, ...]
    summary: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValidationError("dialogue id must be non-empty")
        if not self.turns:
            raise ValidationError(f"dialogue {self.id!r} has no turns")

    def speakers(self) -> list[str]:
        """Distinct speaker names in order of first appearance."""
        seen: dict[str, None] = {}
        for turn in self.turns:
            seen.setdefault(turn.speaker, None)
        return list(seen)

    def render(self) -> str:
        """The dialogue as "Speaker: text" lines joined by newlines."""
        return "\n".join(f"{t.speaker}: {t.text}" for t in self.turns)

    def to_record(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "turns": [{"speaker": t.speaker, "text": t.text} for t in self.turns],
            "summary": self.summary,
        }


@dataclass(frozen=True)
class Seq2SeqExample:
    id: str
    source: str
    target: str
    task: Task
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.source:
            raise ValidationError(f"example {self.id!r}: source must be non-empty")
        if not self.target:
            raise ValidationError(f"example {self.id!r}: target must be non-empty")

    def to_record(self) -> dict[str, Any]:
        rec = {"id": self.id, "source": self.source, "target": self.target,
               "task": self.task.value}
        rec.update(self.extra)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Seq2SeqExample":
        extra = {k: v for k, v in rec.items()
                 if k not in ("id", "source", "target", "task")}
        return cls(id=str(rec["id"]), source=rec["source"], target=rec["target"],
                   task=Task(rec["task"]), extra=extra)


def parse_dialogue(record: dict) -> Dialogue:
    """Build a Dialogue from one raw or canonical corpus record.

    Raw dialogue strings are split on newlines; each line splits at the FIRST
    ':' into speaker and text (both trimmed), so emoticons like ":(" stay in
    the text. Lines without a ':' continue the previous turn.
    """
    if "id" not in record or record["id"] in (None, ""):
        raise ValidationError("record is missing an id")
    dialogue_id = str(record["id"])
    summary = record.get("summary") or ""

    if "turns" in record:
        turns = [Turn(speaker=t["speaker"], text=t.get("text", ""))
                 for t in record["turns"]]
        if not turns:
            raise ValidationError(f"dialogue {dialogue_id!r}: empty turn list")
        return Dialogue(id=dialogue_id, turns=tuple(turns), summary=summary)

    raw = record.get("dialogue")
    if not raw:
        raise ValidationError(f"dialogue {dialogue_id!r}: empty dialogue string")
    turns: list[Turn] = []
    for line in raw.replace("\r\n", "\n").split("\n"):
        if not line.strip():
            continue
        if ":" in line:
            speaker, _, text = line.partition(":")
            turns.append(Turn(speaker=speaker.strip(), text=text.strip()))
        elif turns:
            prev = turns[-1]
            turns[-1] = Turn(prev.speaker, (prev.text + " " + line.strip()).strip())
        else:
            raise ValidationError(
                f"dialogue {dialogue_id!r}: first line has no ':' separator")
    if not turns:
        raise ValidationError(f"dialogue {dialogue_id!r}: empty dialogue string")
    return Dialogue(id=dialogue_id, turns=tuple(turns), summary=summary)


def iter_jsonl(path: str) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, record) pairs, failing fast on malformed lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"malformed JSON ({exc.msg})",
                                        path=path, line=lineno) from exc
            if not isinstance(rec, dict):
                raise CorpusFormatError("record is not an object",
                                        path=path, line=lineno)
            yield lineno, rec


def load_corpus(path: str) -> list[Dialogue]:
    """Load a dialogue corpus in file order, rejecting duplicate ids."""
    dialogues: list[Dialogue] = []
    seen: dict[str, int] = {}
    for lineno, rec in iter_jsonl(path):
        try:
            d = parse_dialogue(rec)
        except ValidationError as exc:
            raise CorpusFormatError(str(exc), path=path, line=lineno) from exc
        if d.id in seen:
            raise CorpusFormatError(
                f"duplicate id {d.id!r} (first seen on line {seen[d.id]})",
                path=path, line=lineno)
        seen[d.id] = lineno
        dialogues.append(d)
    return dialogues


def _as_record(obj: Any) -> dict:
    if isinstance(obj, dict):
        return obj
    to_record = getattr(obj, "to_record", None)
    if to_record is None:
        raise ValidationError(f"cannot serialize object of type {type(obj).__name__}")
    return to_record()


def write_records(out: TextIO, records: Iterable[Any]) -> int:
    count = 0
    for obj in records:
        out.write(json.dumps(_as_record(obj), ensure_ascii=False))
        out.write("\n")
        count += 1
    return count


def emit_records(path: str, records: Iterable[Any]) -> int:
    """Write records as JSONL (canonical forms only); returns the count written."""
    with open(path, "w", encoding="utf-8") as fh:
        return write_records(fh, records)


def corpus_stats(dialogues: list[Dialogue]) -> dict[str, float]:
    """Per-corpus summary statistics; mean_speakers mirrors the speaker-count
    analysis used in evaluation."""
    if not dialogues:
        return {"dialogues": 0, "turns": 0, "mean_speakers": 0.0, "mean_turns": 0.0}
    n_turns = sum(len(d.turns) for d in dialogues)
    n_speakers = sum(len(d.speakers()) for d in dialogues)
    return {
        "dialogues": len(dialogues),
        "turns": n_turns,
        "mean_speakers": n_speakers / len(dialogues),
        "mean_turns": n_turns / len(dialogues),
    }
