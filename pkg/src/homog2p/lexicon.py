"""Pronunciation dictionary loading, lookup, and homograph inventory extraction.

TSV lines are ``word<TAB>pron1<TAB>pron2...``; JSONL lines are objects with
``word`` and ``pronunciations`` fields. Pronunciations use the dictionary
field syntax of :func:`homog2p.phoneme_repr.parse_pronunciation`. A word
listed on several lines accumulates pronunciations in file order.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

from homog2p.errors import MalformedLineError, ValidationError
from homog2p.phoneme_repr import PhonemeString, parse_pronunciation
from homog2p.text_norm import normalize, tokenize


class Lexicon:
    """Immutable grapheme -> ordered pronunciations map."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, Iterable[PhonemeString]] = ()):
        built: dict[str, tuple[PhonemeString, ...]] = {}
        for word, prons in dict(entries).items():
            key = normalize(word)
            if tokenize(key) != [key]:
                raise ValidationError(f"lexicon key {word!r} is not a single token")
            merged = list(built.get(key, ()))
            for p in prons:
                if len(p.words) != 1:
                    raise ValidationError(f"pronunciation of {word!r} must be a single word")
                if p not in merged:
                    merged.append(p)
            if not merged:
                raise ValidationError(f"lexicon entry {word!r} has no pronunciation")
            built[key] = tuple(merged)
        self._entries = built

    @classmethod
    def _from_checked(cls, entries: dict[str, list[PhonemeString]]) -> "Lexicon":
        lex = cls.__new__(cls)
        lex._entries = {w: tuple(p) for w, p in entries.items()}
        return lex

    def lookup(self, word: str) -> tuple[PhonemeString, ...]:
        """Pronunciations of ``word`` in file order; empty when out of vocabulary."""
        prons = self._entries.get(word)
        if prons is None:
            prons = self._entries.get(normalize(word), ())
        return prons

    def __contains__(self, word: str) -> bool:
        return bool(self.lookup(word))

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def items(self):
        return self._entries.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, Lexicon) and list(self._entries.items()) == list(other._entries.items())


def _reject_duplicate_keys(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ValueError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def load_lexicon(source: IO[bytes] | IO[str], format: str = "tsv") -> Lexicon:
    """Parse a dictionary stream. An empty stream yields an empty lexicon."""
    if format not in ("tsv", "jsonl"):
        raise ValidationError(f"unknown lexicon format {format!r}")
    entries: dict[str, list[PhonemeString]] = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if format == "tsv":
            cols = line.split("\t")
            word, fields = cols[0], cols[1:]
        else:
            try:
                obj = json.loads(line, object_pairs_hook=_reject_duplicate_keys)
            except ValueError as exc:
                raise MalformedLineError(lineno, f"bad JSON: {exc}") from None
            if not isinstance(obj, dict) or not isinstance(obj.get("word"), str) \
                    or not isinstance(obj.get("pronunciations"), list):
                raise MalformedLineError(lineno, "expected {'word': str, 'pronunciations': [str]}")
            word, fields = obj["word"], obj["pronunciations"]
        word = normalize(word)
        if not word or tokenize(word) != [word]:
            raise MalformedLineError(lineno, f"invalid headword {word!r}")
        if not fields:
            raise MalformedLineError(lineno, f"no pronunciation for {word!r}")
        bucket = entries.setdefault(word, [])
        for f in fields:
            if not isinstance(f, str):
                raise MalformedLineError(lineno, "pronunciation must be a string")
            try:
                p = parse_pronunciation(f)
            except ValidationError as exc:
                raise MalformedLineError(lineno, str(exc)) from None
            if p not in bucket:
                bucket.append(p)
    return Lexicon._from_checked(entries)


def load_lexicon_file(path, format: str | None = None) -> Lexicon:
    if format is None:
        format = "jsonl" if str(path).endswith((".jsonl", ".json")) else "tsv"
    with open(path, "rb") as fh:
        return load_lexicon(fh, format)


def dump_lexicon_tsv(lex: Lexicon) -> str:
    return "".join(
        word + "\t" + "\t".join(" ".join(p.tokens) for p in prons) + "\n"
        for word, prons in lex.items()
    )


@dataclass(frozen=True)
class HomographInventory:
    items: Mapping[str, tuple[PhonemeString, ...]]
    exclusions: frozenset[str] = frozenset()

    def __post_init__(self):
        for word, prons in self.items.items():
            if len(set(prons)) < 2:
                raise ValidationError(f"homograph {word!r} needs at least two pronunciations")
            if word in self.exclusions:
                raise ValidationError(f"homograph {word!r} is excluded")

    def __contains__(self, word: str) -> bool:
        return word in self.items

    def __len__(self) -> int:
        return len(self.items)

    def pronunciations(self, word: str) -> tuple[PhonemeString, ...]:
        return self.items[word]

    def variant_histogram(self) -> dict[int, int]:
        """Number of homographs per pronunciation count."""
        return dict(sorted(Counter(len(p) for p in self.items.values()).items()))


def extract_homographs(lex: Lexicon, exclusions: Iterable[str] = frozenset()) -> HomographInventory:
    """Every word with two or more distinct pronunciations that is not excluded."""
    excl = frozenset(normalize(w) for w in exclusions)
    items = {w: prons for w, prons in lex.items() if len(prons) >= 2 and w not in excl}
    return HomographInventory(items, excl)
