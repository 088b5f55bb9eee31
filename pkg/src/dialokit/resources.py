"""Loaders for the bundled plain-text resources (name pools, gender lexicon,
pronoun list, function-word stoplist). Every loader also accepts a filesystem
path so CLI flags can override the bundled data."""

from __future__ import annotations

from importlib import resources

from .errors import ValidationError


def _bundled_text(filename: str) -> str:
    return resources.files("dialokit.data").joinpath(filename).read_text("utf-8")


def _read(path: str | None, bundled: str) -> str:
    if path is None:
        return _bundled_text(bundled)
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_name_list(path: str | None, bundled: str) -> list[str]:
    """One name per line; entries must be unique and capitalized."""
    names = [line.strip() for line in _read(path, bundled).splitlines() if line.strip()]
    if not names:
        raise ValidationError("name pool is empty")
    if len(set(names)) != len(names):
        raise ValidationError("name pool contains duplicates")
    for n in names:
        if not n[0].isupper():
            raise ValidationError(f"pool name {n!r} is not capitalized")
    return names


def load_male_names(path: str | None = None) -> list[str]:
    return load_name_list(path, "male_names.txt")


def load_female_names(path: str | None = None) -> list[str]:
    return load_name_list(path, "female_names.txt")


def load_gender_lexicon(path: str | None = None) -> dict[str, str]:
    """TSV of "name<TAB>gender" with gender in {male, female}."""
    lexicon: dict[str, str] = {}
    for lineno, line in enumerate(_read(path, "gender_lexicon.tsv").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in ("male", "female"):
            raise ValidationError(f"gender lexicon line {lineno}: expected 'name<TAB>male|female'")
        lexicon[parts[0].strip().lower()] = parts[1]
    return lexicon


def load_word_set(path: str | None, bundled: str) -> frozenset[str]:
    return frozenset(w.strip().lower() for w in _read(path, bundled).splitlines() if w.strip())


def load_pronouns(path: str | None = None) -> frozenset[str]:
    return load_word_set(path, "pronouns.txt")


def load_function_stopwords(path: str | None = None) -> frozenset[str]:
    return load_word_set(path, "function_stopwords.txt")
