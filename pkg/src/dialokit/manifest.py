"""Run manifests: a small JSON record written beside every output file so a
corpus artifact can always be traced back to (tool version, seed, options,
input digests). Contains nothing time-dependent, so identical runs produce
byte-identical manifests."""

from __future__ import annotations

import hashlib
import json
from typing import Any


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(options: dict[str, Any]) -> str:
    canonical = json.dumps(options, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(out_path: str, subcommand: str, seed: int | None,
                   options: dict[str, Any], inputs: list[str]) -> str:
    from . import __version__

    manifest = {
        "tool": "dialokit",
        "version": __version__,
        "subcommand": subcommand,
        "seed": seed,
        "config_hash": config_hash(options),
        "inputs": {path: sha256_file(path) for path in sorted(inputs)},
    }
    manifest_path = out_path + ".manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path
