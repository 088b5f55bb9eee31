"""Single `dialokit` executable exposing every pipeline stage as a subcommand.

Every subcommand writes only to its --out path, emits a run manifest beside
each output, and is byte-reproducible under a fixed seed regardless of the
--jobs setting (per-document RNG streams plus order-preserving parallel map).

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Sequence

from . import __version__, corpus, resources
from .config import PipelineConfig, load_config
from .corruption import (
    CorruptionConfig,
    Objective,
    build_tfidf,
    detect_entities,
    make_denoising_example,
    plan_corruption,
    speaker_header_spans,
)
from .errors import DialokitError, ValidationError
from .manifest import write_manifest
from .mixer import mix
from .names import GenderLexicon, NamePool, SubstitutionMap, substitute_names, restore_names
from .negation import (
    DEFAULT_CLOSE_MARKER,
    DEFAULT_OPEN_MARKER,
    annotate,
    annotations_from_record,
    mark_negation,
)
from .rng import derive_rng
from .rouge import ScoreTriple, RougeScore, evaluate_corpus, speaker_analysis
from .tokens import tokenize

DEFAULT_SEED = 0


def _parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    """Order-preserving map; per-document RNG derivation keeps results
    independent of the job count."""
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _resolve_seed(args, cfg: PipelineConfig) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    if cfg.global_seed is not None:
        return cfg.global_seed
    return DEFAULT_SEED


def _load_pool(args, cfg: PipelineConfig) -> NamePool:
    male = args.male_pool or cfg.resources.get("male_pool")
    female = args.female_pool or cfg.resources.get("female_pool")
    return NamePool(male=tuple(resources.load_male_names(male)),
                    female=tuple(resources.load_female_names(female)))


def _load_lexicon(args, cfg: PipelineConfig) -> GenderLexicon:
    path = args.gender_lexicon or cfg.resources.get("gender_lexicon")
    return GenderLexicon.from_mapping(resources.load_gender_lexicon(path))


def _load_maps(path: str) -> dict[str, SubstitutionMap]:
    maps = {}
    for _, rec in corpus.iter_jsonl(path):
        m = SubstitutionMap.from_record(rec)
        maps[m.dialogue_id] = m
    return maps


# ---------------------------------------------------------------- subcommands

def cmd_validate(args, cfg: PipelineConfig) -> int:
    dialogues = corpus.load_corpus(args.inp)
    print(f"{len(dialogues)} records ok")
    return 0


def cmd_stats(args, cfg: PipelineConfig) -> int:
    stats = corpus.corpus_stats(corpus.load_corpus(args.inp))
    for key in ("dialogues", "turns", "mean_speakers", "mean_turns"):
        value = stats[key]
        print(f"{key}: {value:.4f}" if isinstance(value, float) else f"{key}: {value}")
    return 0


def cmd_sub_names(args, cfg: PipelineConfig) -> int:
    seed = _resolve_seed(args, cfg)
    pool = _load_pool(args, cfg)
    lexicon = _load_lexicon(args, cfg)
    dialogues = corpus.load_corpus(args.inp)

    def process(d):
        return substitute_names(d, lexicon, pool, derive_rng(seed, d.id))

    results = _parallel_map(process, dialogues, args.jobs)
    corpus.emit_records(args.out, (sub for sub, _ in results))
    corpus.emit_records(args.maps_out, (m for _, m in results))
    inputs = [args.inp] + [p for p in (args.male_pool, args.female_pool,
                                       args.gender_lexicon) if p]
    write_manifest(args.out, "sub-names", seed, {"seed": seed}, inputs)
    write_manifest(args.maps_out, "sub-names", seed, {"seed": seed}, inputs)
    print(f"substituted {len(results)} dialogues")
    return 0


def cmd_restore_names(args, cfg: PipelineConfig) -> int:
    maps = _load_maps(args.maps)

    def restored():
        for lineno, rec in corpus.iter_jsonl(args.inp):
            if "id" not in rec or "text" not in rec:
                raise ValidationError(
                    f"{args.inp}:{lineno}: expected fields 'id' and 'text'")
            text = rec["text"]
            if rec["id"] in maps:
                text = restore_names(text, maps[rec["id"]])
            yield {"id": rec["id"], "text": text}

    count = corpus.emit_records(args.out, restored())
    write_manifest(args.out, "restore-names", None, {},
                   [args.inp, args.maps])
    print(f"restored {count} records")
    return 0


def cmd_mark_neg(args, cfg: PipelineConfig) -> int:
    open_marker = args.neg_open or cfg.negation.get("open_marker", DEFAULT_OPEN_MARKER)
    close_marker = args.neg_close or cfg.negation.get("close_marker", DEFAULT_CLOSE_MARKER)
    dialogues = corpus.load_corpus(args.inp)

    external = None
    if args.annotations:
        external = {}
        for _, rec in corpus.iter_jsonl(args.annotations):
            external[str(rec["id"])] = annotations_from_record(rec)

    def process(d):
        new_turns = []
        for turn in d.turns:
            tokens = tokenize(turn.text)
            anns = annotate(tokens)
            new_turns.append(corpus.Turn(
                turn.speaker,
                mark_negation(turn.text, anns, open_marker, close_marker)))
        return corpus.Dialogue(id=d.id, turns=tuple(new_turns), summary=d.summary)

    def process_external(d):
        # Standoff annotations index tokens of the whole rendered dialogue.
        rendered = d.render()
        anns = external.get(d.id, [])
        marked = mark_negation(rendered, anns, open_marker, close_marker)
        new_turns = []
        for line in marked.split("\n"):
            speaker, _, text = line.partition(":")
            new_turns.append(corpus.Turn(speaker.strip(), text.strip()))
        return corpus.Dialogue(id=d.id, turns=tuple(new_turns), summary=d.summary)

    worker = process_external if external is not None else process
    results = _parallel_map(worker, dialogues, args.jobs)
    corpus.emit_records(args.out, results)
    inputs = [args.inp] + ([args.annotations] if args.annotations else [])
    write_manifest(args.out, "mark-neg", None,
                   {"open": open_marker, "close": close_marker,
                    "external_annotations": args.annotations is not None},
                   inputs)
    print(f"marked {len(results)} dialogues")
    return 0


def cmd_build_tfidf(args, cfg: PipelineConfig) -> int:
    model = build_tfidf(corpus.load_corpus(args.inp))
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(model.to_record(), fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")
    write_manifest(args.out, "build-tfidf", None, {}, [args.inp])
    print(f"tf-idf model over {model.doc_count} documents, {len(model.df)} terms")
    return 0


_OBJECTIVE_NAMES = {
    "word": Objective.WORD, "span": Objective.SPAN, "pronoun": Objective.PRONOUN,
    "tfidf": Objective.TFIDF, "entity": Objective.ENTITY,
}


def cmd_corrupt(args, cfg: PipelineConfig) -> int:
    seed = _resolve_seed(args, cfg)
    section = cfg.corruption

    def opt(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return section.get(key, default)

    objective_names = args.objective or section.get("objectives") or ["word"]
    corr_cfg = CorruptionConfig(
        objectives=frozenset(_OBJECTIVE_NAMES[name] for name in objective_names),
        p_mask=opt(args.p_mask, "p_mask", 0.3),
        lam=opt(args.lam, "lambda", 3.0),
        p_mask_pronoun=opt(args.p_mask_pronoun, "p_mask_pronoun", 0.5),
        tfidf_top_frac=opt(args.tfidf_top_frac, "tfidf_top_frac", 0.25),
        p_mask_tfidf=opt(args.p_mask_tfidf, "p_mask_tfidf", 0.7),
        p_mask_entity=opt(args.p_mask_entity, "p_mask_entity", 0.7),
        mask_token=opt(args.mask_token, "mask_token", "<mask>"),
    )
    dialogues = corpus.load_corpus(args.inp)

    tfidf_model = None
    if Objective.TFIDF in corr_cfg.objectives:
        if args.tfidf_model:
            from .corruption import TfIdfModel
            with open(args.tfidf_model, encoding="utf-8") as fh:
                tfidf_model = TfIdfModel.from_record(json.load(fh))
        else:
            tfidf_model = build_tfidf(dialogues)

    pronouns = resources.load_pronouns(args.pronouns or cfg.resources.get("pronouns"))
    gazetteer = None
    stoplist = None
    if Objective.ENTITY in corr_cfg.objectives:
        gaz_path = args.gazetteer or cfg.resources.get("gazetteer")
        if gaz_path:
            gazetteer = resources.load_word_set(gaz_path, "")
        else:
            # Default gazetteer: bundled name pools plus corpus speaker names.
            names = set(resources.load_male_names()) | set(resources.load_female_names())
            for d in dialogues:
                names.update(d.speakers())
            gazetteer = frozenset(n.lower() for n in names)
        stoplist = resources.load_function_stopwords(
            args.stopwords or cfg.resources.get("stopwords"))
    mask_headers = opt(None, "mask_speaker_headers", not args.no_header_entities)

    def process(d):
        tokens = tokenize(d.render())
        entities = None
        if Objective.ENTITY in corr_cfg.objectives:
            entities = detect_entities(d, gazetteer, stoplist, tokens=tokens)
            if not mask_headers:
                headers = speaker_header_spans(d)
                entities = [
                    (s, e) for s, e in entities
                    if not any(hs <= tokens[s].start and tokens[e - 1].end <= he
                               for hs, he in headers)
                ]
        plan = plan_corruption(d.id, tokens, corr_cfg, derive_rng(seed, d.id),
                               tfidf_model=tfidf_model, entities=entities,
                               pronouns=pronouns)
        return make_denoising_example(d, plan, corr_cfg)

    examples = _parallel_map(process, dialogues, args.jobs)
    corpus.emit_records(args.out, examples)
    options = {"seed": seed, "objectives": sorted(o.value for o in corr_cfg.objectives),
               "p_mask": corr_cfg.p_mask, "lambda": corr_cfg.lam,
               "p_mask_pronoun": corr_cfg.p_mask_pronoun,
               "tfidf_top_frac": corr_cfg.tfidf_top_frac,
               "p_mask_tfidf": corr_cfg.p_mask_tfidf,
               "p_mask_entity": corr_cfg.p_mask_entity,
               "mask_token": corr_cfg.mask_token,
               "mask_speaker_headers": mask_headers}
    inputs = [args.inp] + ([args.tfidf_model] if args.tfidf_model else [])
    write_manifest(args.out, "corrupt", seed, options, inputs)
    print(f"corrupted {len(examples)} dialogues")
    return 0


def cmd_mix(args, cfg: PipelineConfig) -> int:
    if cfg.mix is None:
        raise ValidationError("mix requires a config file with a [mix] section")
    spec = cfg.mix
    if args.epoch_size is not None:
        from dataclasses import replace
        spec = replace(spec, epoch_size=args.epoch_size)
    seed = _resolve_seed(args, cfg)
    rng = derive_rng(seed, "mix")
    count = corpus.emit_records(args.out, mix(spec, rng))
    write_manifest(args.out, "mix", seed,
                   {"strategy": spec.strategy.value, "epoch_size": spec.epoch_size,
                    "components": [[c.task.value, c.weight]
                                   for c in spec.components]},
                   [c.path for c in spec.components])
    print(f"mixed {count} examples")
    return 0


def _score_record(pair_id: str, triple: ScoreTriple) -> dict[str, Any]:
    def unpack(s: RougeScore):
        return {"precision": s.precision, "recall": s.recall, "f1": s.f1}
    return {"id": pair_id, "r1": unpack(triple.r1), "r2": unpack(triple.r2),
            "rl": unpack(triple.rl)}


def cmd_rouge(args, cfg: PipelineConfig) -> int:
    stem = args.stem or bool(cfg.rouge.get("stem", False))
    pairs = []
    for lineno, rec in corpus.iter_jsonl(args.inp):
        if "reference" not in rec:
            raise ValidationError(f"{args.inp}:{lineno}: missing reference")
        pairs.append((str(rec["id"]), rec.get("candidate", ""), rec["reference"]))
    maps = _load_maps(args.maps) if args.maps else None
    scores, means = evaluate_corpus(pairs, maps=maps, stem=stem)
    corpus.emit_records(args.out, (_score_record(i, t) for i, t in scores))
    inputs = [args.inp] + ([args.maps] if args.maps else [])
    write_manifest(args.out, "rouge", None,
                   {"stem": stem, "restore": args.maps is not None}, inputs)
    print(f"rouge-1 f1: {means['r1']:.6f}")
    print(f"rouge-2 f1: {means['r2']:.6f}")
    print(f"rouge-l f1: {means['rl']:.6f}")
    return 0


def cmd_speaker_analysis(args, cfg: PipelineConfig) -> int:
    dialogues = corpus.load_corpus(args.corpus)
    scores = []
    for _, rec in corpus.iter_jsonl(args.scores):
        scores.append((str(rec["id"]), ScoreTriple(
            r1=RougeScore(**rec["r1"]), r2=RougeScore(**rec["r2"]),
            rl=RougeScore(**rec["rl"]))))
    buckets = speaker_analysis(dialogues, scores)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_speakers", "n_dialogues", "r1", "r2", "rl"])
        for b in buckets:
            writer.writerow([b.n_speakers, b.n_dialogues,
                             f"{b.mean_r1:.6f}", f"{b.mean_r2:.6f}", f"{b.mean_rl:.6f}"])
    write_manifest(args.out, "speaker-analysis", None, {},
                   [args.corpus, args.scores])
    print(f"{len(buckets)} speaker buckets")
    return 0


# ------------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialokit",
        description="Deterministic preprocessing and evaluation toolkit for "
                    "dialogue summarization corpora.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="TOML pipeline config file")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel workers (output order is unaffected)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("validate", cmd_validate, help="parse and validate a corpus")
    p.add_argument("--in", dest="inp", required=True)

    p = add("stats", cmd_stats, help="corpus statistics (incl. mean speakers)")
    p.add_argument("--in", dest="inp", required=True)

    p = add("sub-names", cmd_sub_names, help="substitute speaker names")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--maps-out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--male-pool")
    p.add_argument("--female-pool")
    p.add_argument("--gender-lexicon")

    p = add("restore-names", cmd_restore_names,
            help="restore original names into generated text")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--maps", required=True)

    p = add("mark-neg", cmd_mark_neg, help="mark negation scopes")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--neg-open")
    p.add_argument("--neg-close")
    p.add_argument("--annotations", help="standoff scope annotations (JSONL)")

    p = add("build-tfidf", cmd_build_tfidf, help="build a TF-IDF model")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = add("corrupt", cmd_corrupt, help="generate denoising examples")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--objective", action="append",
                   choices=sorted(_OBJECTIVE_NAMES))
    p.add_argument("--seed", type=int)
    p.add_argument("--p-mask", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--p-mask-pronoun", type=float)
    p.add_argument("--tfidf-top-frac", type=float)
    p.add_argument("--p-mask-tfidf", type=float)
    p.add_argument("--p-mask-entity", type=float)
    p.add_argument("--mask-token")
    p.add_argument("--tfidf-model", help="model file from build-tfidf")
    p.add_argument("--gazetteer")
    p.add_argument("--pronouns")
    p.add_argument("--stopwords")
    p.add_argument("--no-header-entities", action="store_true",
                   help="do not mask speaker-header names under the Entity objective")

    p = add("mix", cmd_mix, help="mix multi-task components")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--epoch-size", type=int)

    p = add("rouge", cmd_rouge, help="score candidates against references")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--maps", help="substitution maps for name restoration")
    p.add_argument("--stem", action="store_true")

    p = add("speaker-analysis", cmd_speaker_analysis,
            help="bucket ROUGE scores by speaker count")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.fn(args, cfg)
    except (ValidationError, DialokitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
