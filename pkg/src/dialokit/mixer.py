"""Conversion of reasoning-task datasets into seq2seq records, and mixing of
several task streams into one multi-task training corpus.

Mixing is example-level. Proportional sampling picks a component per emitted
example with probability weight / total weight; each component is consumed
sequentially with a seeded Fisher-Yates reshuffle at every wraparound, so one
pass over a component is always a permutation of it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .corpus import Seq2SeqExample, Task, iter_jsonl, parse_dialogue
from .errors import ValidationError
from .rng import RngStream

CONCEPTNET_DELIMITER = " | "


class MixStrategy(Enum):
    PROPORTIONAL = "proportional"
    ROUND_ROBIN = "round_robin"


@dataclass(frozen=True)
class MixComponent:
    task: Task
    path: str
    # None = weight by component size (temperature-1 sampling)
    weight: float | None = None

    def __post_init__(self):
        if self.weight is not None and self.weight <= 0:
            raise ValidationError(f"component weight must be > 0, got {self.weight}")


@dataclass(frozen=True)
class MixSpec:
    components: tuple[MixComponent, ...]
    strategy: MixStrategy = MixStrategy.PROPORTIONAL
    epoch_size: int = 1

    def __post_init__(self):
        if not self.components:
            raise ValidationError("mix spec needs at least one component")
        if self.epoch_size < 1:
            raise ValidationError("epoch_size must be >= 1")


def _clean(sentence: str) -> str:
    return " ".join(sentence.split())


def format_roc(example_id: str, sentences: list[str],
               task_prefix: bool = False) -> Seq2SeqExample:
    """Story-ending prediction: source = sentences 1-4, target = sentence 5."""
    if len(sentences) != 5:
        raise ValidationError(
            f"ROC story {example_id!r}: expected 5 sentences, got {len(sentences)}")
    cleaned = [_clean(s) for s in sentences]
    if any(not s for s in cleaned):
        raise ValidationError(f"ROC story {example_id!r}: empty sentence")
    source = " ".join(cleaned[:4])
    if task_prefix:
        source = "[ROC] " + source
    return Seq2SeqExample(id=example_id, source=source, target=cleaned[4],
                          task=Task.ROC)


def format_commongen(example_id: str, concepts: list[str], scene: str,
                     task_prefix: bool = False) -> Seq2SeqExample:
    """Concepts-to-scene generation: source = space-joined concepts."""
    if not concepts:
        raise ValidationError(f"CommonGen {example_id!r}: empty concept list")
    if not scene.strip():
        raise ValidationError(f"CommonGen {example_id!r}: empty scene")
    source = " ".join(concepts)
    if task_prefix:
        source = "[COMMONGEN] " + source
    return Seq2SeqExample(id=example_id, source=source, target=_clean(scene),
                          task=Task.COMMONGEN)


def format_conceptnet(example_id: str, subject: str, relation: str, obj: str,
                      task_prefix: bool = False) -> Seq2SeqExample:
    """Relation-object prediction: source = "subject | relation"."""
    for label, value in (("subject", subject), ("relation", relation),
                         ("object", obj)):
        if not value.strip():
            raise ValidationError(f"ConceptNet {example_id!r}: empty {label}")
    for label, value in (("subject", subject), ("relation", relation)):
        if CONCEPTNET_DELIMITER in value:
            raise ValidationError(
                f"ConceptNet {example_id!r}: {label} contains the reserved "
                f"delimiter {CONCEPTNET_DELIMITER!r}")
    source = subject + CONCEPTNET_DELIMITER + relation
    if task_prefix:
        source = "[CONCEPTNET] " + source
    return Seq2SeqExample(id=example_id, source=source, target=_clean(obj),
                          task=Task.CONCEPTNET)


def _convert_record(task: Task, lineno: int, rec: dict) -> Seq2SeqExample:
    rec_id = str(rec.get("id", f"{task.value.lower()}-{lineno}"))
    if task is Task.ROC:
        return format_roc(rec_id, list(rec["sentences"]))
    if task is Task.COMMONGEN:
        return format_commongen(rec_id, list(rec["concepts"]), rec["scene"])
    if task is Task.CONCEPTNET:
        return format_conceptnet(rec_id, rec["subject"], rec["relation"],
                                 rec["object"])
    if task is Task.SUMM:
        d = parse_dialogue(rec)
        if not d.summary:
            raise ValidationError(f"dialogue {d.id!r} has no summary")
        return Seq2SeqExample(id=d.id, source=d.render(), target=d.summary,
                              task=Task.SUMM)
    raise ValidationError(f"cannot convert raw records for task {task.value!r}")


def _load_roc_columns(path: str) -> list[Seq2SeqExample]:
    """ROC in its 7-column delimited form: id, title, then 5 sentences."""
    examples = []
    with open(path, encoding="utf-8", newline="") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        delimiter = "\t" if "\t" in sample.split("\n", 1)[0] else ","
        for lineno, row in enumerate(csv.reader(fh, delimiter=delimiter), start=1):
            if lineno == 1 and row and row[0].lower() in ("storyid", "id"):
                continue  # header row
            if len(row) != 7:
                raise ValidationError(
                    f"{path}:{lineno}: expected 7 columns, got {len(row)}")
            examples.append(format_roc(row[0], row[2:7]))
    return examples


def load_component(component: MixComponent) -> list[Seq2SeqExample]:
    """Load one component file as Seq2SeqExamples.

    JSONL records that already carry source/target are taken as-is (their
    task tag must match); raw dataset records are converted per task. ROC is
    additionally accepted in its 7-column delimited form.
    """
    with open(component.path, encoding="utf-8") as fh:
        first = fh.readline().lstrip()
    if component.task is Task.ROC and first and not first.startswith("{"):
        examples = _load_roc_columns(component.path)
    else:
        examples = []
        for lineno, rec in iter_jsonl(component.path):
            if "source" in rec and "target" in rec:
                ex = Seq2SeqExample.from_record(rec)
                if ex.task is not component.task:
                    raise ValidationError(
                        f"{component.path}:{lineno}: record task {ex.task.value!r} "
                        f"does not match component task {component.task.value!r}")
            else:
                ex = _convert_record(component.task, lineno, rec)
            examples.append(ex)
    if not examples:
        raise ValidationError(f"component {component.path!r} has no examples")
    return examples


class _ComponentCursor:
    """Sequential draws with an rng-driven reshuffle at each wraparound."""

    def __init__(self, examples: list[Seq2SeqExample], rng: RngStream):
        self.examples = list(examples)
        self.rng = rng
        self.pos = len(self.examples)  # force a shuffle before the first draw

    def draw(self) -> Seq2SeqExample:
        if self.pos >= len(self.examples):
            self.rng.shuffle(self.examples)
            self.pos = 0
        ex = self.examples[self.pos]
        self.pos += 1
        return ex


def mix(spec: MixSpec, rng: RngStream) -> Iterator[Seq2SeqExample]:
    """Emit exactly epoch_size examples drawn across components."""
    cursors = [_ComponentCursor(load_component(c), rng) for c in spec.components]
    if spec.strategy is MixStrategy.PROPORTIONAL:
        weights = [c.weight if c.weight is not None else float(len(cur.examples))
                   for c, cur in zip(spec.components, cursors)]
        total = sum(weights)
        cumulative = []
        acc = 0.0
        for w in weights:
            acc += w / total
            cumulative.append(acc)
        for _ in range(spec.epoch_size):
            r = rng.uniform01()
            idx = next(i for i, edge in enumerate(cumulative) if r < edge or
                       i == len(cumulative) - 1)
            yield cursors[idx].draw()
    else:
        for n in range(spec.epoch_size):
            yield cursors[n % len(cursors)].draw()
