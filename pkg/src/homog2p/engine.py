"""Sentence phonemization: lexicon lookup, homograph resolution, OOV fallback."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from homog2p.context_db import ContextDatabase
from homog2p.disambiguator import NORMALIZERS, ScoreReport, choose
from homog2p.errors import ConfigError, FingerprintMismatchError, HomoG2PError, ValidationError
from homog2p.lexicon import HomographInventory, Lexicon
from homog2p.phoneme_repr import PhonemeString, Repr
from homog2p.text_norm import fingerprint, normalize, tokenize

PASSTHROUGH_MARKED = "passthrough_marked"
LETTER_TABLE = "letter_table"
OOV_POLICIES = (PASSTHROUGH_MARKED, LETTER_TABLE)

OOV_OPEN, OOV_CLOSE = "⟨", "⟩"


def mark_oov(text: str) -> str:
    return f"{OOV_OPEN}{text}{OOV_CLOSE}"


@dataclass(frozen=True)
class EngineConfig:
    oov_policy: str = PASSTHROUGH_MARKED
    letter_table: Mapping[str, tuple[str, ...]] | None = None
    use_disambiguator: bool = True
    stopwords: frozenset[str] = frozenset()
    normalizer: str = "total"

    def __post_init__(self):
        if self.oov_policy not in OOV_POLICIES:
            raise ConfigError(f"unknown OOV policy {self.oov_policy!r}")
        if (self.letter_table is not None) != (self.oov_policy == LETTER_TABLE):
            raise ConfigError("letter_table is required exactly when oov_policy is 'letter_table'")
        if self.normalizer not in NORMALIZERS:
            raise ConfigError(f"unknown normalizer {self.normalizer!r}")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))


@dataclass(frozen=True)
class Decision:
    word_index: int
    homograph: str
    chosen: PhonemeString
    report: ScoreReport | None  # None when resolution did not consult the database

    def to_json(self) -> dict:
        return {
            "word_index": self.word_index,
            "homograph": self.homograph,
            "chosen": self.chosen.serialize(),
            "report": None if self.report is None else self.report.to_json(),
        }


@dataclass(frozen=True)
class PhonemizationResult:
    phonemes: PhonemeString
    tokens: tuple[str, ...]
    decisions: tuple[Decision, ...] = ()
    oov_words: tuple[int, ...] = ()

    def decision_for(self, homograph: str) -> Decision | None:
        for d in self.decisions:
            if d.homograph == homograph:
                return d
        return None

    def to_json(self) -> dict:
        return {
            "phonemes": self.phonemes.serialize(),
            "tokens": list(self.tokens),
            "decisions": [d.to_json() for d in self.decisions],
            "oov_words": list(self.oov_words),
        }


@dataclass(frozen=True)
class SentenceError:
    index: int
    error: HomoG2PError

    def to_json(self) -> dict:
        return {"index": self.index, "error": type(self.error).__name__, "message": str(self.error)}


def load_letter_table(stream: Iterable[str]) -> dict[str, tuple[str, ...]]:
    """TSV ``character<TAB>phoneme tokens (space separated, may be empty)``."""
    table = {}
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        ch, _, toks = line.partition("\t")
        if len(ch) != 1:
            raise ValidationError(f"letter table line {lineno}: key must be one character")
        table[ch] = tuple(toks.split())
    return table


class G2PEngine:
    """Immutable after construction; :meth:`phonemize` is reentrant."""

    def __init__(
        self,
        lexicon: Lexicon,
        inventory: HomographInventory,
        db: ContextDatabase | None = None,
        config: EngineConfig = EngineConfig(),
    ):
        self.lexicon = lexicon
        self.inventory = inventory
        self.config = config
        if config.use_disambiguator:
            if db is None:
                raise ConfigError("a context database is required unless the disambiguator is disabled")
            if db.stopwords_fingerprint != fingerprint(config.stopwords):
                raise FingerprintMismatchError("engine stopwords do not match the database fingerprint")
            self.db = db
        else:
            self.db = None
        self._homographs = dict(inventory.items)

    def _oov_group(self, token: str) -> tuple[str, ...]:
        if self.config.oov_policy == PASSTHROUGH_MARKED:
            return (mark_oov(token),)
        table = self.config.letter_table
        out = []
        for ch in token:
            mapped = table.get(ch)
            if mapped is None:
                out.append(mark_oov(ch))
            else:
                out.extend(mapped)
        return tuple(out) or (mark_oov(token),)

    def phonemize(self, sentence: str) -> PhonemizationResult:
        if not isinstance(sentence, str):
            raise ValidationError(f"sentence must be text, got {type(sentence).__name__}")
        try:
            sentence.encode("utf-8")
        except UnicodeEncodeError:
            raise ValidationError("sentence is not valid Unicode text") from None
        tokens = tokenize(normalize(sentence))
        db = self.db
        stop = self.config.stopwords
        context = None
        groups, decisions, oov = [], [], []
        for i, tok in enumerate(tokens):
            hprons = self._homographs.get(tok)
            if hprons is not None:
                report = None
                if db is not None and tok in db.homographs:
                    if context is None:
                        context = [t for t in tokens if t not in stop]
                    report = choose(db, tok, context, normalizer=self.config.normalizer)
                    chosen = report.chosen
                else:
                    chosen = hprons[0]
                decisions.append(Decision(i, tok, chosen, report))
                groups.append(chosen.words[0])
                continue
            prons = self.lexicon.lookup(tok)
            if prons:
                groups.append(prons[0].words[0])
            else:
                oov.append(i)
                groups.append(self._oov_group(tok))
        return PhonemizationResult(
            PhonemeString(tuple(groups), Repr.R1), tuple(tokens), tuple(decisions), tuple(oov)
        )

    def phonemize_batch(self, sentences: Sequence[str]) -> list[PhonemizationResult | SentenceError]:
        """Phonemize every sentence; failures are returned in place as :class:`SentenceError`."""
        out: list[PhonemizationResult | SentenceError] = []
        phonemize = self.phonemize
        for i, s in enumerate(sentences):
            try:
                out.append(phonemize(s))
            except HomoG2PError as exc:
                out.append(SentenceError(i, exc))
        return out
