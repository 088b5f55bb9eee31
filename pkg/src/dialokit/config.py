"""Pipeline configuration: a TOML file whose sections mirror the CLI flags.

Flags always win over the config file. Unknown keys are rejected, and every
referenced resource path must exist at load time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .corpus import Task
from .errors import ValidationError
from .mixer import MixComponent, MixSpec, MixStrategy

_RESOURCE_KEYS = {"male_pool", "female_pool", "gender_lexicon", "gazetteer",
                  "pronouns", "stopwords"}
_CORRUPTION_KEYS = {"objectives", "p_mask", "lambda", "p_mask_pronoun",
                    "tfidf_top_frac", "p_mask_tfidf", "p_mask_entity",
                    "mask_token", "mask_speaker_headers"}
_NEGATION_KEYS = {"open_marker", "close_marker"}
_ROUGE_KEYS = {"stem"}
_MIX_KEYS = {"strategy", "epoch_size", "component"}
_TOP_KEYS = {"global_seed", "resources", "corruption", "negation", "rouge", "mix"}


@dataclass
class PipelineConfig:
    global_seed: int | None = None
    resources: dict[str, str] = field(default_factory=dict)
    corruption: dict[str, Any] = field(default_factory=dict)
    negation: dict[str, str] = field(default_factory=dict)
    rouge: dict[str, Any] = field(default_factory=dict)
    mix: MixSpec | None = None


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ValidationError(
            f"config section [{section}]: unknown keys {sorted(unknown)}")


def load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    _check_keys("<root>", data, _TOP_KEYS)

    cfg = PipelineConfig()
    if "global_seed" in data:
        cfg.global_seed = int(data["global_seed"])

    resources = data.get("resources", {})
    _check_keys("resources", resources, _RESOURCE_KEYS)
    for key, value in resources.items():
        if not os.path.exists(value):
            raise ValidationError(f"config resources.{key}: path {value!r} does not exist")
    cfg.resources = dict(resources)

    corruption = data.get("corruption", {})
    _check_keys("corruption", corruption, _CORRUPTION_KEYS)
    cfg.corruption = dict(corruption)

    negation = data.get("negation", {})
    _check_keys("negation", negation, _NEGATION_KEYS)
    cfg.negation = dict(negation)

    rouge = data.get("rouge", {})
    _check_keys("rouge", rouge, _ROUGE_KEYS)
    cfg.rouge = dict(rouge)

    if "mix" in data:
        mix = data["mix"]
        _check_keys("mix", mix, _MIX_KEYS)
        components = []
        for i, comp in enumerate(mix.get("component", [])):
            _check_keys(f"mix.component[{i}]", comp, {"task", "path", "weight"})
            if not os.path.exists(comp["path"]):
                raise ValidationError(
                    f"config mix.component[{i}]: path {comp['path']!r} does not exist")
            weight = comp.get("weight")
            components.append(MixComponent(
                task=Task(comp["task"]), path=comp["path"],
                weight=float(weight) if weight is not None else None))
        cfg.mix = MixSpec(
            components=tuple(components),
            strategy=MixStrategy(mix.get("strategy", "proportional")),
            epoch_size=int(mix.get("epoch_size", 1)),
        )
    return cfg
