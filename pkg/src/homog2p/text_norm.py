"""Text normalization, tokenization and stopword filtering."""

from __future__ import annotations

import hashlib
import unicodedata
from functools import lru_cache
from typing import IO, Iterable, Sequence

from homog2p.errors import MalformedLineError

ZWNJ = "‌"

_FOLD = str.maketrans({
    "ي": "ی",  # Arabic Yeh -> Persian Yeh
    "ك": "ک",  # Arabic Kaf -> Keheh
})

# already Unicode P*, listed so the rule survives a different Unicode database
_PERSIAN_PUNCT = frozenset("،؛؟«»")


@lru_cache(maxsize=4096)
def _is_edge_char(ch: str) -> bool:
    return ch == ZWNJ or ch in _PERSIAN_PUNCT or unicodedata.category(ch).startswith("P")


def normalize(text: str) -> str:
    """NFC, fold Arabic Yeh/Kaf to their Persian forms, collapse whitespace."""
    text = unicodedata.normalize("NFC", text).translate(_FOLD)
    return " ".join(text.split())


def _strip_span(chunk: str) -> tuple[int, int]:
    start, end = 0, len(chunk)
    while start < end and _is_edge_char(chunk[start]):
        start += 1
    while end > start and _is_edge_char(chunk[end - 1]):
        end -= 1
    return start, end


def token_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of the tokens that :func:`tokenize` would return."""
    spans = []
    pos = 0
    n = len(text)
    while pos < n:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        chunk_start = pos
        while pos < n and not text[pos].isspace():
            pos += 1
        s, e = _strip_span(text[chunk_start:pos])
        if e > s:
            spans.append((chunk_start + s, chunk_start + e))
    return spans


def tokenize(text: str) -> list[str]:
    """Split normalized text into tokens.

    A token is a whitespace-delimited chunk with leading and trailing
    punctuation (and stray ZWNJ) removed; chunks that strip to nothing are
    dropped. ZWNJ inside a chunk is kept.
    """
    tokens = []
    for chunk in text.split():
        s, e = _strip_span(chunk)
        if e > s:
            tokens.append(chunk[s:e])
    return tokens


def content_words(tokens: Sequence[str], stop: frozenset[str] | set[str]) -> list[str]:
    return [t for t in tokens if t not in stop]


def load_wordlist(stream: IO[str] | Iterable[str]) -> frozenset[str]:
    """Read a one-entry-per-line word file (stopwords, exclusions).

    Blank lines and ``#`` comments are skipped; entries are normalized and
    must form exactly one token.
    """
    words = set()
    for lineno, line in enumerate(stream, 1):
        raw = line.strip()
        if not raw or raw.startswith("#"):
            continue
        word = normalize(raw)
        if tokenize(word) != [word]:
            raise MalformedLineError(lineno, f"entry {raw!r} is not a single token")
        words.add(word)
    return frozenset(words)


def load_wordlist_file(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return load_wordlist(fh)


def fingerprint(words: Iterable[str]) -> str:
    h = hashlib.sha256("\n".join(sorted(words)).encode("utf-8"))
    return h.hexdigest()
