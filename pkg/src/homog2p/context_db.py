"""Per-homograph, per-pronunciation context-word database.

On-disk layout::

    b"HG2PDB\\0"  magic (7 bytes)
    uint16 BE     format version
    32 bytes      SHA-256 of the compressed body
    body          zlib-compressed canonical JSON (sorted keys)
"""

from __future__ import annotations

import hashlib
import json
import struct
import zlib
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

from homog2p.errors import (
    ChecksumError,
    StorageError,
    UnknownHomographError,
    UnknownPronunciationError,
    ValidationError,
    VersionMismatchError,
)
from homog2p.lexicon import HomographInventory
from homog2p.phoneme_repr import PhonemeString, Repr
from homog2p.text_norm import fingerprint

MAGIC = b"HG2PDB\x00"
DB_FORMAT_VERSION = 1
_HEADER = struct.Struct(">H32s")


@dataclass(frozen=True)
class PronEntry:
    weights: Mapping[str, int]
    total_weight: int
    prior: int


@dataclass(frozen=True)
class HomographEntry:
    """``pronunciations`` is the full inventory order; ``entries`` only those seen in training."""

    pronunciations: tuple[PhonemeString, ...]
    entries: Mapping[PhonemeString, PronEntry]


@dataclass(frozen=True)
class ContextDatabase:
    homographs: Mapping[str, HomographEntry]
    stopwords_fingerprint: str
    dedup_per_sentence: bool = False

    def __contains__(self, homograph: str) -> bool:
        return homograph in self.homographs

    def __len__(self) -> int:
        return len(self.homographs)

    def check(self, stopwords: Iterable[str] | None = None) -> None:
        """Assert the structural invariants; raises ValidationError."""
        stop = frozenset(stopwords) if stopwords is not None else frozenset()
        if stopwords is not None and fingerprint(stop) != self.stopwords_fingerprint:
            raise ValidationError("stopword set does not match database fingerprint")
        for h, he in self.homographs.items():
            for p, e in he.entries.items():
                if p not in he.pronunciations:
                    raise ValidationError(f"{h}: pronunciation {p} not in inventory order")
                if e.prior < 1:
                    raise ValidationError(f"{h}: prior must be >= 1")
                if e.total_weight != sum(e.weights.values()):
                    raise ValidationError(f"{h}: total_weight mismatch")
                if any(w <= 0 for w in e.weights.values()):
                    raise ValidationError(f"{h}: non-positive weight")
                if stop & set(e.weights):
                    raise ValidationError(f"{h}: stopword used as context word")

    def merge(self, other: "ContextDatabase") -> "ContextDatabase":
        """Sum of two databases built with the same stopwords and inventory."""
        if (self.stopwords_fingerprint, self.dedup_per_sentence) != (
                other.stopwords_fingerprint, other.dedup_per_sentence):
            raise ValidationError("cannot merge databases built with different settings")
        acc = _Accumulator()
        for db in (self, other):
            for h, he in db.homographs.items():
                acc.declare(h, he.pronunciations)
                for p, e in he.entries.items():
                    acc.add_counts(h, p, e.weights, e.prior)
        return acc.freeze(self.stopwords_fingerprint, self.dedup_per_sentence)

    def to_json(self) -> dict:
        return {
            "format_version": DB_FORMAT_VERSION,
            "stopwords_fingerprint": self.stopwords_fingerprint,
            "dedup_per_sentence": self.dedup_per_sentence,
            "homographs": {
                h: {
                    "pronunciations": [p.serialize() for p in he.pronunciations],
                    "entries": {
                        p.serialize(): {
                            "prior": e.prior,
                            "total_weight": e.total_weight,
                            "weights": dict(sorted(e.weights.items())),
                        }
                        for p, e in he.entries.items()
                    },
                }
                for h, he in sorted(self.homographs.items())
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ContextDatabase":
        homographs = {}
        for h, he in obj["homographs"].items():
            prons = tuple(PhonemeString.parse(p, Repr.R1) for p in he["pronunciations"])
            entries = {}
            for p in prons:
                e = he["entries"].get(p.serialize())
                if e is not None:
                    weights = {str(k): int(v) for k, v in e["weights"].items()}
                    entries[p] = PronEntry(weights, int(e["total_weight"]), int(e["prior"]))
            homographs[h] = HomographEntry(prons, entries)
        return cls(homographs, obj["stopwords_fingerprint"], bool(obj.get("dedup_per_sentence", False)))


class _Accumulator:
    def __init__(self):
        self.order: dict[str, tuple[PhonemeString, ...]] = {}
        self.weights: dict[tuple[str, PhonemeString], Counter] = {}
        self.priors: Counter = Counter()

    def declare(self, h: str, prons: tuple[PhonemeString, ...]) -> None:
        known = self.order.setdefault(h, prons)
        if known != prons:
            raise ValidationError(f"inconsistent pronunciation order for {h!r}")

    def add_counts(self, h, p, words: Mapping[str, int], prior: int = 1) -> None:
        c = self.weights.setdefault((h, p), Counter())
        c.update(words)
        self.priors[(h, p)] += prior

    def freeze(self, fp: str, dedup: bool) -> ContextDatabase:
        homographs = {}
        for h in sorted(self.order):
            prons = self.order[h]
            entries = {}
            for p in prons:
                if self.priors[(h, p)] == 0:
                    continue
                w = dict(sorted(self.weights[(h, p)].items()))
                entries[p] = PronEntry(w, sum(w.values()), self.priors[(h, p)])
            homographs[h] = HomographEntry(prons, entries)
        return ContextDatabase(homographs, fp, dedup)


def build_db(
    records: Iterable,
    stop: Iterable[str],
    inventory: HomographInventory,
    dedup_per_sentence: bool = False,
) -> ContextDatabase:
    """Count context words per annotated homograph pronunciation.

    Every non-stopword token of an annotated sentence other than the
    homograph itself adds one to that word's weight (or at most one per
    sentence with ``dedup_per_sentence``). Unannotated records are skipped.
    """
    stop = frozenset(stop)
    acc = _Accumulator()
    for rec in records:
        h = rec.homograph
        if h is None:
            continue
        if h not in inventory:
            raise UnknownHomographError(f"record {rec.id!r}: {h!r} is not an inventory homograph")
        prons = inventory.pronunciations(h)
        p = rec.pronunciation
        if p not in prons:
            raise UnknownPronunciationError(f"record {rec.id!r}: {p} is not a pronunciation of {h!r}")
        ctx = [t for t in rec.tokens if t != h and t not in stop]
        acc.declare(h, prons)
        acc.add_counts(h, p, Counter(set(ctx)) if dedup_per_sentence else Counter(ctx))
    return acc.freeze(fingerprint(stop), dedup_per_sentence)


def save_db(db: ContextDatabase) -> bytes:
    body = zlib.compress(
        json.dumps(db.to_json(), ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode("utf-8"),
        9,
    )
    return MAGIC + _HEADER.pack(DB_FORMAT_VERSION, hashlib.sha256(body).digest()) + body


def load_db(data: bytes | IO[bytes]) -> ContextDatabase:
    if not isinstance(data, (bytes, bytearray)):
        data = data.read()
    if not data.startswith(MAGIC) or len(data) < len(MAGIC) + _HEADER.size:
        raise StorageError("not a context database file")
    version, digest = _HEADER.unpack_from(data, len(MAGIC))
    if version != DB_FORMAT_VERSION:
        raise VersionMismatchError(f"database format version {version}, expected {DB_FORMAT_VERSION}")
    body = data[len(MAGIC) + _HEADER.size:]
    if hashlib.sha256(body).digest() != digest:
        raise ChecksumError("context database checksum mismatch (file is corrupt)")
    try:
        obj = json.loads(zlib.decompress(body).decode("utf-8"))
        return ContextDatabase.from_json(obj)
    except (ValueError, KeyError, zlib.error) as exc:
        raise StorageError(f"unreadable database body: {exc}") from None


def save_db_file(db: ContextDatabase, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_db(db))


def load_db_file(path) -> ContextDatabase:
    with open(path, "rb") as fh:
        return load_db(fh.read())
