"""Normalized weighted-overlap scoring and pronunciation selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from homog2p.context_db import ContextDatabase
from homog2p.errors import HomographNotInDbError, ValidationError
from homog2p.phoneme_repr import PhonemeString

SCORE = "score"
PRIOR_FALLBACK = "prior_fallback"
TIE_BREAK = "tie_break"

NORMALIZERS = ("total", "distinct")


@dataclass(frozen=True)
class PronScore:
    pronunciation: PhonemeString
    raw_overlap: int
    denominator: int
    prior: int

    @property
    def normalized_score(self) -> float:
        return self.raw_overlap / self.denominator if self.denominator else 0.0

    def _ratio(self) -> tuple[int, int]:
        return (self.raw_overlap, self.denominator) if self.denominator else (0, 1)


@dataclass(frozen=True)
class ScoreReport:
    homograph: str
    scores: tuple[PronScore, ...]
    chosen: PhonemeString | None = None
    decision_basis: str | None = None

    def to_json(self) -> dict:
        return {
            "homograph": self.homograph,
            "scores": [
                {
                    "pronunciation": s.pronunciation.serialize(),
                    "raw_overlap": s.raw_overlap,
                    "normalizer": s.denominator,
                    "normalized_score": s.normalized_score,
                    "prior": s.prior,
                }
                for s in self.scores
            ],
            "chosen": None if self.chosen is None else self.chosen.serialize(),
            "decision_basis": self.decision_basis,
        }


def score(
    db: ContextDatabase,
    homograph: str,
    context: Sequence[str],
    *,
    stopwords: Iterable[str] | None = None,
    normalizer: str = "total",
) -> ScoreReport:
    """Weighted overlap of ``context`` with each pronunciation's context words.

    A context token adds its stored weight once per occurrence; the homograph
    token itself is skipped. ``normalizer="total"`` divides by the summed
    weights of the pronunciation, ``"distinct"`` by its number of context
    words. A zero denominator scores 0.
    """
    try:
        he = db.homographs[homograph]
    except KeyError:
        raise HomographNotInDbError(homograph) from None
    if normalizer not in NORMALIZERS:
        raise ValidationError(f"unknown normalizer {normalizer!r}")
    if stopwords is not None:
        stop = frozenset(stopwords)
        context = [t for t in context if t not in stop]
    context = [t for t in context if t != homograph]
    out = []
    for p in he.pronunciations:
        e = he.entries.get(p)
        if e is None:
            out.append(PronScore(p, 0, 0, 0))
            continue
        w = e.weights
        raw = sum(w.get(t, 0) for t in context)
        den = e.total_weight if normalizer == "total" else len(w)
        out.append(PronScore(p, raw, den, e.prior))
    return ScoreReport(homograph, tuple(out))


def _cmp(a: PronScore, b: PronScore) -> int:
    an, ad = a._ratio()
    bn, bd = b._ratio()
    lhs, rhs = an * bd, bn * ad
    return (lhs > rhs) - (lhs < rhs)


def select(report: ScoreReport) -> ScoreReport:
    """Pick the argmax of the normalized scores.

    Exact ties go to the higher prior, then to the earlier pronunciation.
    When every score is zero the highest-prior pronunciation is chosen.
    """
    scores = report.scores
    best = [scores[0]]
    for s in scores[1:]:
        c = _cmp(s, best[0])
        if c > 0:
            best = [s]
        elif c == 0:
            best.append(s)
    if best[0].raw_overlap == 0 or best[0].denominator == 0:
        pool, basis = scores, PRIOR_FALLBACK
    elif len(best) == 1:
        return ScoreReport(report.homograph, scores, best[0].pronunciation, SCORE)
    else:
        pool, basis = best, TIE_BREAK
    # max() keeps the first maximal element, i.e. the earliest pronunciation
    winner = max(pool, key=lambda s: s.prior)
    return ScoreReport(report.homograph, scores, winner.pronunciation, basis)


def choose(
    db: ContextDatabase,
    homograph: str,
    context: Sequence[str],
    *,
    stopwords: Iterable[str] | None = None,
    normalizer: str = "total",
) -> ScoreReport:
    return select(score(db, homograph, context, stopwords=stopwords, normalizer=normalizer))
