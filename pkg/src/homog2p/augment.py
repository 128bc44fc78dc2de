"""Corpus augmentation: synonym replacement, segment reordering, filler concatenation.

All three operate on word-aligned records and splice phoneme word groups
rather than re-phonemizing, so sound changes across a new word boundary are
not modeled. Ezafe-linked words (R2 groups carrying the ``1`` marker) are
never separated by reordering and never replaced by synonyms.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, replace
from typing import IO, Iterable, Mapping, Sequence

from homog2p.corpus import CorpusRecord
from homog2p.errors import (
    AlignmentError,
    EmptyFillersError,
    MalformedLineError,
    NoAllowedBoundaryError,
    PreconditionError,
    ValidationError,
)
from homog2p.phoneme_repr import MappingTable, PhonemeString, Repr, map_repr, parse_pronunciation
from homog2p.text_norm import normalize, token_spans, tokenize

DEFAULT_MAX_FILLER_WORDS = 5


@dataclass(frozen=True)
class SynonymMap:
    entries: Mapping[str, tuple[tuple[str, PhonemeString], ...]]

    def __post_init__(self):
        for word, syns in self.entries.items():
            for g, p in syns:
                if g == word:
                    raise ValidationError(f"synonym map sends {word!r} to itself")
                if tokenize(g) != [g] or len(p.words) != 1:
                    raise ValidationError(f"synonym {g!r} must be a single word")

    def get(self, word: str) -> tuple[tuple[str, PhonemeString], ...]:
        return self.entries.get(word, ())


def load_synonym_map(stream: IO[str] | Iterable[str]) -> SynonymMap:
    """TSV ``word<TAB>synonym<TAB>synonym_phonemes``; one synonym per line."""
    entries: dict[str, list] = {}
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise MalformedLineError(lineno, "expected word, synonym, synonym_phonemes")
        word, syn = normalize(cols[0]), normalize(cols[1])
        try:
            pron = parse_pronunciation(cols[2])
        except ValidationError as exc:
            raise MalformedLineError(lineno, str(exc)) from None
        bucket = entries.setdefault(word, [])
        if (syn, pron) not in bucket:
            bucket.append((syn, pron))
    try:
        return SynonymMap({w: tuple(s) for w, s in entries.items()})
    except ValidationError as exc:
        raise MalformedLineError(0, str(exc)) from None


@dataclass(frozen=True)
class SplitConstraint:
    """Boundary ``k`` lies between word ``k`` and word ``k + 1``."""

    forbidden_boundaries: frozenset[int] = frozenset()


def ezafe_boundaries(rec: CorpusRecord) -> frozenset[int]:
    """Boundaries after words whose R2 group carries an Ezafe marker."""
    if rec.phoneme_r2 is None:
        return frozenset()
    n = len(rec.tokens)
    return frozenset(i for i in rec.phoneme_r2.ezafe_words() if i < n - 1)


def _check_alignment(rec: CorpusRecord) -> None:
    n = len(rec.tokens)
    if len(rec.phoneme_r1.words) != n or (rec.phoneme_r2 is not None and len(rec.phoneme_r2.words) != n):
        raise AlignmentError(f"record {rec.id!r} is not word-aligned")


def _r2_group(group: tuple[str, ...], table: MappingTable | None, rec_id: str) -> tuple[str, ...]:
    if table is None:
        raise PreconditionError(f"record {rec_id!r} has phoneme_r2; a mapping table is needed to update it")
    return map_repr(PhonemeString((group,), Repr.R1), table, Repr.R2).words[0]


def synonym_replace(
    rec: CorpusRecord,
    synonyms: SynonymMap,
    max_variants: int = 10,
    table: MappingTable | None = None,
) -> list[CorpusRecord]:
    """One variant per (mapped token occurrence, synonym), in sentence then map order.

    The homograph token and Ezafe-carrying words are left alone.
    """
    _check_alignment(rec)
    if max_variants < 0:
        raise PreconditionError("max_variants must be non-negative")
    spans = token_spans(rec.grapheme)
    ezafe = rec.phoneme_r2.ezafe_words() if rec.phoneme_r2 is not None else frozenset()
    out = []
    for i, tok in enumerate(rec.tokens):
        if tok == rec.homograph or i in ezafe:
            continue
        for syn, pron in synonyms.get(tok):
            if len(out) >= max_variants:
                return out
            s, e = spans[i]
            grapheme = normalize(rec.grapheme[:s] + syn + rec.grapheme[e:])
            r1 = list(rec.phoneme_r1.words)
            r1[i] = pron.words[0]
            r2 = None
            if rec.phoneme_r2 is not None:
                r2 = list(rec.phoneme_r2.words)
                r2[i] = _r2_group(pron.words[0], table, rec.id)
                r2 = PhonemeString(tuple(r2), Repr.R2)
            out.append(replace(
                rec,
                grapheme=grapheme,
                phoneme_r1=PhonemeString(tuple(r1), Repr.R1),
                phoneme_r2=r2,
                source="augmented",
                id=f"{rec.id}~syn{len(out)}",
            ))
    return out


def _rng(seed, *salt) -> random.Random:
    # str seeds hash through SHA-512, so this is stable across processes
    return random.Random(":".join(str(x) for x in (seed, *salt)))


def allowed_boundaries(rec: CorpusRecord, constraint: SplitConstraint = SplitConstraint()) -> list[int]:
    n = len(rec.tokens)
    bad = set(constraint.forbidden_boundaries) | ezafe_boundaries(rec)
    return [k for k in range(n - 1) if k not in bad]


def rotate(rec: CorpusRecord, boundary: int) -> CorpusRecord:
    """Swap the segments on either side of ``boundary``: [A][B] -> [B][A]."""
    k = boundary + 1
    spans = token_spans(rec.grapheme)
    cut = spans[k][0]
    head, tail = rec.grapheme[:cut], rec.grapheme[cut:]
    grapheme = normalize(tail + " " + head)

    def rot(ps):
        return None if ps is None else PhonemeString(ps.words[k:] + ps.words[:k], ps.representation)

    return replace(
        rec,
        grapheme=grapheme,
        phoneme_r1=rot(rec.phoneme_r1),
        phoneme_r2=rot(rec.phoneme_r2),
        source="augmented",
        id=f"{rec.id}~rot{boundary}",
    )


def reorder(rec: CorpusRecord, constraint: SplitConstraint = SplitConstraint(), rng_seed: int = 0) -> CorpusRecord:
    """Rotate the sentence around a uniformly drawn allowed boundary."""
    _check_alignment(rec)
    n = len(rec.tokens)
    if n < 2:
        raise PreconditionError(f"record {rec.id!r}: reordering needs at least two words")
    for k in constraint.forbidden_boundaries:
        if not 0 <= k < n - 1:
            raise ValidationError(f"forbidden boundary {k} out of range for {n} words")
    allowed = allowed_boundaries(rec, constraint)
    if not allowed:
        raise NoAllowedBoundaryError(f"record {rec.id!r}: every boundary is Ezafe-linked or forbidden")
    return rotate(rec, _rng(rng_seed, "reorder").choice(allowed))


def concat_homograph(
    rec: CorpusRecord,
    fillers: Sequence[CorpusRecord],
    max_filler_words: int = DEFAULT_MAX_FILLER_WORDS,
    rng_seed: int = 0,
    table: MappingTable | None = None,
) -> CorpusRecord:
    """Append one short homograph-free sentence, drawn uniformly from the eligible fillers."""
    if rec.homograph is None:
        raise PreconditionError(f"record {rec.id!r} has no homograph annotation")
    for f in fillers:
        if f.homograph is not None:
            raise PreconditionError(f"filler {f.id!r} carries a homograph annotation")
    pool = [f for f in fillers if 0 < len(f.tokens) <= max_filler_words]
    if not pool:
        raise EmptyFillersError("no eligible filler sentences")
    filler = _rng(rng_seed, "concat").choice(pool)
    _check_alignment(rec)
    _check_alignment(filler)
    r2 = None
    if rec.phoneme_r2 is not None or filler.phoneme_r2 is not None:
        parts = []
        for r in (rec, filler):
            if r.phoneme_r2 is not None:
                parts.append(r.phoneme_r2.words)
            else:
                parts.append(tuple(_r2_group(g, table, r.id) for g in r.phoneme_r1.words))
        r2 = PhonemeString(parts[0] + parts[1], Repr.R2)
    return replace(
        rec,
        grapheme=normalize(rec.grapheme + " " + filler.grapheme),
        phoneme_r1=PhonemeString(rec.phoneme_r1.words + filler.phoneme_r1.words, Repr.R1),
        phoneme_r2=r2,
        source="augmented",
        id=f"{rec.id}~cat{filler.id}",
    )


@dataclass
class AugmentPlan:
    synonyms: SynonymMap | None = None
    synonym_max_variants: int = 1
    reorder_copies: int = 1
    concat_copies: int = 1
    max_filler_words: int = DEFAULT_MAX_FILLER_WORDS
    balance: bool = True
    homograph_only: bool = True

    @classmethod
    def from_json(cls, obj: dict, base_dir=None) -> "AugmentPlan":
        known = {"synonyms", "synonym_max_variants", "reorder_copies", "concat_copies",
                 "max_filler_words", "balance", "homograph_only"}
        unknown = set(obj) - known
        if unknown:
            raise ValidationError(f"unknown plan keys: {sorted(unknown)}")
        kw = dict(obj)
        if kw.get("synonyms"):
            path = kw["synonyms"]
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            with open(path, encoding="utf-8") as fh:
                kw["synonyms"] = load_synonym_map(fh)
        else:
            kw["synonyms"] = None
        return cls(**kw)


def augment_corpus(
    records: Sequence[CorpusRecord],
    plan: AugmentPlan,
    seed: int = 0,
    table: MappingTable | None = None,
) -> list[CorpusRecord]:
    """Apply ``plan`` and return only the new records, in input order.

    Seeds are derived from ``seed`` and each record id, so a record's
    variants do not depend on the rest of the corpus. With ``plan.balance``
    the augmented homograph records are trimmed so that every pronunciation
    of a homograph gains the same number of samples.
    """
    fillers = [r for r in records if r.homograph is None]
    produced: list[list[CorpusRecord]] = []
    for rec in records:
        mine: list[CorpusRecord] = []
        if plan.homograph_only and rec.homograph is None:
            produced.append(mine)
            continue
        if plan.synonyms is not None and plan.synonym_max_variants > 0:
            mine.extend(synonym_replace(rec, plan.synonyms, plan.synonym_max_variants, table))
        if len(rec.tokens) >= 2 and allowed_boundaries(rec):
            seen = set()
            for c in range(plan.reorder_copies):
                out = reorder(rec, rng_seed=f"{seed}:{rec.id}:{c}")
                if out.id not in seen:
                    seen.add(out.id)
                    mine.append(out)
        if rec.homograph is not None and plan.concat_copies > 0:
            pool = [f for f in fillers if 0 < len(f.tokens) <= plan.max_filler_words]
            if pool:
                for c in range(plan.concat_copies):
                    out = concat_homograph(rec, pool, plan.max_filler_words, f"{seed}:{rec.id}:{c}", table)
                    mine.append(replace(out, id=f"{out.id}~{c}"))
        produced.append(mine)

    if plan.balance:
        produced = _balance(records, produced)
    return [r for group in produced for r in group]


def _balance(records, produced):
    gained: dict[tuple, int] = {}
    for rec, mine in zip(records, produced):
        if rec.homograph is not None:
            gained[(rec.homograph, rec.pronunciation)] = gained.get((rec.homograph, rec.pronunciation), 0) + len(mine)
    quota: dict[str, int] = {}
    for (h, _), n in gained.items():
        quota[h] = min(quota.get(h, n), n)
    used: dict[tuple, int] = {}
    out = []
    for rec, mine in zip(records, produced):
        if rec.homograph is None:
            out.append(mine)
            continue
        key = (rec.homograph, rec.pronunciation)
        room = quota[rec.homograph] - used.get(key, 0)
        keep = mine[: max(room, 0)]
        used[key] = used.get(key, 0) + len(keep)
        out.append(keep)
    return out


def load_plan_file(path) -> AugmentPlan:
    with open(path, encoding="utf-8") as fh:
        return AugmentPlan.from_json(json.load(fh), base_dir=os.path.dirname(os.path.abspath(path)))
