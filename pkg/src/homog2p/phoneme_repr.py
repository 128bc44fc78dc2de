"""Phoneme strings in the two supported representations and the mapping between them.

Serialized form (used in corpus files and on the CLI): tokens inside a word
are separated by single spaces and words by `` | ``, e.g.
``g o l e 1 | z i b A``. The empty string is the zero-word phoneme string.

In representation R2 the token ``1`` is a structural Ezafe marker. It is not
part of either alphabet and may only follow an ``e`` token.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

from homog2p.errors import (
    MalformedLineError,
    MissingEzafeVowelError,
    PreconditionError,
    UnknownSymbolError,
    ValidationError,
)

EZAFE_MARKER = "1"
EZAFE_VOWEL = "e"
WORD_SEP = "|"


class Repr(str, enum.Enum):
    R1 = "R1"
    R2 = "R2"


def _check_token(tok: str) -> None:
    if not tok or WORD_SEP in tok or any(c.isspace() for c in tok):
        raise ValidationError(f"invalid phoneme token {tok!r}")


@dataclass(frozen=True)
class PhonemeString:
    """Word-aligned phoneme tokens.

    ``words`` holds one non-empty token tuple per grapheme word.
    """

    words: tuple[tuple[str, ...], ...]
    representation: Repr = Repr.R1

    def __post_init__(self):
        if not isinstance(self.representation, Repr):
            object.__setattr__(self, "representation", Repr(self.representation))
        for group in self.words:
            if not group:
                raise ValidationError("empty word group in phoneme string")
            prev = None
            for tok in group:
                _check_token(tok)
                if tok == EZAFE_MARKER:
                    if self.representation is not Repr.R2:
                        raise ValidationError("Ezafe marker '1' is only valid in R2")
                    if prev != EZAFE_VOWEL:
                        raise ValidationError("Ezafe marker '1' must follow an 'e' token")
                prev = tok

    @classmethod
    def word(cls, tokens: Iterable[str], representation: Repr = Repr.R1) -> "PhonemeString":
        return cls((tuple(tokens),), representation)

    @classmethod
    def from_tokens(
        cls, tokens: Sequence[str], boundaries: Sequence[int], representation: Repr = Repr.R1
    ) -> "PhonemeString":
        """Build from a flat token list and the end offset of every word."""
        if list(boundaries) != sorted(set(boundaries)) or (boundaries and boundaries[-1] != len(tokens)):
            raise ValidationError("word boundaries must be strictly increasing and end at len(tokens)")
        if not boundaries and tokens:
            raise ValidationError("word boundaries must partition all tokens")
        words, start = [], 0
        for end in boundaries:
            words.append(tuple(tokens[start:end]))
            start = end
        return cls(tuple(words), representation)

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(t for g in self.words for t in g)

    @property
    def word_boundaries(self) -> tuple[int, ...]:
        out, n = [], 0
        for g in self.words:
            n += len(g)
            out.append(n)
        return tuple(out)

    def __len__(self) -> int:
        return len(self.words)

    def serialize(self) -> str:
        return f" {WORD_SEP} ".join(" ".join(g) for g in self.words)

    def __str__(self) -> str:
        return self.serialize()

    @classmethod
    def parse(cls, text: str, representation: Repr = Repr.R1) -> "PhonemeString":
        text = text.strip()
        if not text:
            return cls((), representation)
        words = []
        for part in text.split(WORD_SEP):
            group = tuple(part.split())
            if not group:
                raise ValidationError(f"empty word group in {text!r}")
            words.append(group)
        return cls(tuple(words), representation)

    @classmethod
    def from_compact(cls, text: str, representation: Repr = Repr.R1) -> "PhonemeString":
        """One character per token, whitespace between words (e.g. ``"in gole zibA"``)."""
        return cls(tuple(tuple(w) for w in text.split()), representation)

    def ezafe_words(self) -> frozenset[int]:
        return frozenset(i for i, g in enumerate(self.words) if EZAFE_MARKER in g)

    def with_representation(self, representation: Repr) -> "PhonemeString":
        return PhonemeString(self.words, representation)


def parse_pronunciation(text: str, representation: Repr = Repr.R1) -> PhonemeString:
    """Parse a single-word dictionary pronunciation.

    With spaces the field is a space-separated token list, otherwise every
    character is one token (``ketAb`` -> ``k e t A b``).
    """
    text = text.strip()
    if not text or WORD_SEP in text:
        raise ValidationError(f"invalid pronunciation {text!r}")
    tokens = text.split() if " " in text else list(text)
    return PhonemeString.word(tokens, representation)


@dataclass(frozen=True)
class MappingTable:
    """Bijective symbol map between R1 and R2."""

    pairs: tuple[tuple[str, str], ...]
    _to_r2: dict = field(init=False, repr=False, compare=False)
    _to_r1: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        to_r2, to_r1 = {}, {}
        for a, b in self.pairs:
            _check_token(a)
            _check_token(b)
            if EZAFE_MARKER in (a, b):
                raise ValidationError("the Ezafe marker is structural and cannot be mapped")
            if a in to_r2 or b in to_r1:
                raise ValidationError(f"mapping is not bijective at {a!r} <-> {b!r}")
            to_r2[a] = b
            to_r1[b] = a
        object.__setattr__(self, "_to_r2", to_r2)
        object.__setattr__(self, "_to_r1", to_r1)

    @classmethod
    def identity(cls, alphabet: Iterable[str]) -> "MappingTable":
        return cls(tuple((s, s) for s in alphabet))

    @property
    def alphabet_r1(self) -> frozenset[str]:
        return frozenset(self._to_r2)

    @property
    def alphabet_r2(self) -> frozenset[str]:
        return frozenset(self._to_r1)

    def symbol_map(self, target: Repr) -> Mapping[str, str]:
        return self._to_r2 if Repr(target) is Repr.R2 else self._to_r1


def load_mapping_table(stream: IO[str] | Iterable[str]) -> MappingTable:
    """TSV, one ``R1<TAB>R2`` pair per line; ``#`` comments allowed."""
    pairs = []
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedLineError(lineno, "expected two tab-separated columns")
        pairs.append((cols[0].strip(), cols[1].strip()))
    try:
        return MappingTable(tuple(pairs))
    except ValidationError as exc:
        raise MalformedLineError(0, str(exc)) from exc


def load_mapping_table_file(path) -> MappingTable:
    with open(path, encoding="utf-8") as fh:
        return load_mapping_table(fh)


def map_repr(ps: PhonemeString, table: MappingTable, target: Repr) -> PhonemeString:
    """Map symbol by symbol. R2 -> R1 drops Ezafe markers; R1 -> R2 adds none."""
    target = Repr(target)
    if ps.representation is target:
        raise PreconditionError(f"phoneme string is already in {target.value}")
    sym = table.symbol_map(target)
    words, pos = [], 0
    for group in ps.words:
        out = []
        for tok in group:
            if tok == EZAFE_MARKER and ps.representation is Repr.R2:
                pos += 1
                continue
            try:
                out.append(sym[tok])
            except KeyError:
                raise UnknownSymbolError(tok, pos) from None
            pos += 1
        words.append(tuple(out))
    return PhonemeString(tuple(words), target)


def annotate_ezafe(
    ps: PhonemeString,
    word_indices: Iterable[int],
    lexicon_pron: Mapping[int, PhonemeString] | None = None,
) -> PhonemeString:
    """Insert an Ezafe marker after the final ``e`` of every annotated word.

    ``lexicon_pron`` optionally gives the dictionary form of annotated words;
    when present the trailing ``e`` must lie beyond it, i.e. it has to be the
    linking vowel and not the word's own final vowel.
    """
    if ps.representation is not Repr.R2:
        raise PreconditionError("Ezafe markers are only written in R2")
    indices = set(word_indices)
    for i in indices:
        if not 0 <= i < len(ps.words):
            raise ValidationError(f"Ezafe annotation index {i} out of range")
    if not indices:
        return ps
    lexicon_pron = lexicon_pron or {}
    words = list(ps.words)
    for i in sorted(indices):
        group = words[i]
        if group[-1] != EZAFE_VOWEL or EZAFE_MARKER in group:
            raise MissingEzafeVowelError(i)
        base = lexicon_pron.get(i)
        if base is not None:
            base_toks = base.tokens
            if len(group) <= len(base_toks) or group[: len(base_toks)] != base_toks:
                raise MissingEzafeVowelError(i)
        words[i] = group + (EZAFE_MARKER,)
    return PhonemeString(tuple(words), Repr.R2)
