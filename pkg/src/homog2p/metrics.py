"""PER, homograph accuracy and latency over repeated benchmark runs."""

from __future__ import annotations

import random
import statistics
import time
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

from homog2p.context_db import build_db
from homog2p.corpus import CorpusRecord
from homog2p.engine import EngineConfig, G2PEngine
from homog2p.errors import EmptyBenchmarkError, MissingDecisionError, RepresentationMismatchError
from homog2p.lexicon import HomographInventory, Lexicon
from homog2p.phoneme_repr import MappingTable, PhonemeString, Repr, map_repr


def edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    """Unit-cost Levenshtein distance over token sequences."""
    if len(ref) < len(hyp):
        ref, hyp = hyp, ref
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, 1):
        cur = [i]
        for j, h in enumerate(hyp, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (r != h)))
        prev = cur
    return prev[-1]


def per(reference: PhonemeString, hypothesis: PhonemeString) -> float:
    """Token edit distance divided by the reference length.

    Word boundaries are ignored. An empty reference gives 0 for an empty
    hypothesis and ``len(hypothesis)`` otherwise (divisor clamped to 1).
    """
    if reference.representation is not hypothesis.representation:
        raise RepresentationMismatchError(
            f"cannot compare {reference.representation.value} with {hypothesis.representation.value}")
    ref, hyp = reference.tokens, hypothesis.tokens
    return edit_distance(ref, hyp) / max(len(ref), 1)


def _as_r1(ps: PhonemeString, table: MappingTable | None) -> PhonemeString:
    if ps.representation is Repr.R1:
        return ps
    if table is None:
        raise RepresentationMismatchError("gold pronunciation is R2 but no mapping table was given")
    return map_repr(ps, table, Repr.R1)


def homograph_accuracy(records: Sequence[CorpusRecord], results: Sequence, table: MappingTable | None = None) -> float:
    """Fraction of annotated records whose logged decision matches the gold pronunciation.

    Reads the engine decision log (exact). ``results`` must be parallel to
    ``records``. Returns 0.0 when nothing is annotated.
    """
    if len(records) != len(results):
        raise ValueError("records and results must be parallel")
    correct = total = 0
    for rec, res in zip(records, results):
        if rec.homograph is None:
            continue
        total += 1
        d = res.decision_for(rec.homograph)
        if d is None:
            raise MissingDecisionError(rec.id, rec.homograph)
        if d.chosen.tokens == _as_r1(rec.pronunciation, table).tokens:
            correct += 1
    return correct / total if total else 0.0


def _find(seq: Sequence[str], sub: Sequence[str]) -> list[int]:
    n = len(sub)
    return [i for i in range(len(seq) - n + 1) if tuple(seq[i:i + n]) == tuple(sub)]


def aligned_homograph_choice(
    rec: CorpusRecord, hypothesis: PhonemeString, candidates: Sequence[PhonemeString]
) -> PhonemeString | None:
    """Guess which candidate pronunciation an external engine produced (approximate).

    If the hypothesis is word-aligned with the sentence the homograph's word
    group is matched directly. Otherwise every candidate occurrence in the
    flat token stream is located and the one nearest the homograph's
    expected token offset wins.
    """
    idx = rec.homograph_index()
    if len(hypothesis.words) == len(rec.tokens):
        group = hypothesis.words[idx]
        for c in candidates:
            if group == c.words[0]:
                return c
        return None
    toks = hypothesis.tokens
    ref_words = rec.phoneme_r1.words
    expected = sum(len(g) for g in ref_words[:idx]) * len(toks) / max(len(rec.phoneme_r1.tokens), 1)
    best, best_key = None, None
    for c in candidates:
        for pos in _find(toks, c.tokens):
            key = (abs(pos - expected), -len(c.tokens))
            if best_key is None or key < best_key:
                best, best_key = c, key
    return best


def homograph_accuracy_aligned(
    records: Sequence[CorpusRecord],
    hypotheses: Sequence[PhonemeString],
    candidates: Callable[[str], Sequence[PhonemeString]],
) -> float:
    """Homograph accuracy from bare hypotheses (for engines without a decision log).

    Approximate: a record whose homograph cannot be located counts as wrong.
    """
    correct = total = 0
    for rec, hyp in zip(records, hypotheses):
        if rec.homograph is None:
            continue
        total += 1
        got = aligned_homograph_choice(rec, hyp, candidates(rec.homograph))
        if got is not None and got.tokens == rec.pronunciation.tokens:
            correct += 1
    return correct / total if total else 0.0


@dataclass(frozen=True)
class BenchReport:
    system_label: str
    runs: int
    per_mean: float
    per_std: float
    homograph_acc_mean: float | None
    homograph_acc_std: float | None
    latency_mean: float | None
    latency_std: float | None
    latency_median: float | None = None
    per_mode: str = "sentence"
    sentences: int = 0
    homograph_sentences: int = 0

    def to_json(self) -> dict:
        return asdict(self)

    def table_row(self) -> str:
        acc = "n/a" if self.homograph_acc_mean is None else f"{self.homograph_acc_mean:.2f} ± {self.homograph_acc_std:.2f}"
        lat = "n/a" if self.latency_mean is None else f"{self.latency_mean:.4f} ± {self.latency_std:.2f}"
        return f"{self.system_label} | {self.per_mean:.2f} ± {self.per_std:.2f} | {acc} | {lat}"


def bench(
    engine,
    benchmark: Sequence[CorpusRecord],
    runs: int = 5,
    *,
    label: str = "homog2p",
    pooled: bool = False,
    table: MappingTable | None = None,
    timing: bool = True,
    clock: Callable[[], float] = time.perf_counter,
) -> BenchReport:
    """Evaluate ``engine`` on ``benchmark`` ``runs`` times after one untimed warm-up pass.

    PER is averaged per sentence (or pooled over all reference tokens with
    ``pooled``), accuracy covers the annotated subset, latency is wall time
    per sentence including serialization. Spreads are population standard
    deviations across runs, all rates in percent.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not benchmark:
        raise EmptyBenchmarkError("benchmark has no records")
    sentences = [r.grapheme for r in benchmark]
    phonemize = engine.phonemize
    for s in sentences:
        phonemize(s).phonemes.serialize()

    pers, accs, lats, medians = [], [], [], []
    annotated = sum(1 for r in benchmark if r.homograph is not None)
    for _ in range(runs):
        results, times = [], []
        for s in sentences:
            t0 = clock()
            res = phonemize(s)
            res.phonemes.serialize()
            times.append(clock() - t0)
            results.append(res)
        if pooled:
            dist = sum(_dist(r.phoneme_r1, res.phonemes) for r, res in zip(benchmark, results))
            pers.append(100.0 * dist / max(sum(len(r.phoneme_r1.tokens) for r in benchmark), 1))
        else:
            pers.append(100.0 * statistics.fmean(per(r.phoneme_r1, res.phonemes) for r, res in zip(benchmark, results)))
        if annotated:
            accs.append(100.0 * homograph_accuracy(benchmark, results, table))
        lats.append(statistics.fmean(times))
        medians.append(statistics.median(times))

    return BenchReport(
        system_label=label,
        runs=runs,
        per_mean=statistics.fmean(pers),
        per_std=statistics.pstdev(pers),
        homograph_acc_mean=statistics.fmean(accs) if accs else None,
        homograph_acc_std=statistics.pstdev(accs) if accs else None,
        latency_mean=statistics.fmean(lats) if timing else None,
        latency_std=statistics.pstdev(lats) if timing else None,
        latency_median=statistics.median(medians) if timing else None,
        per_mode="pooled" if pooled else "sentence",
        sentences=len(benchmark),
        homograph_sentences=annotated,
    )


def _dist(ref: PhonemeString, hyp: PhonemeString) -> int:
    if ref.representation is not hyp.representation:
        raise RepresentationMismatchError("representation mismatch")
    return edit_distance(ref.tokens, hyp.tokens)


def majority_baseline_accuracy(train: Sequence[CorpusRecord], test: Sequence[CorpusRecord]) -> float:
    """Accuracy of always answering the most frequent training pronunciation."""
    counts: dict[str, Counter] = {}
    for r in train:
        if r.homograph is not None:
            counts.setdefault(r.homograph, Counter())[r.pronunciation] += 1
    correct = total = 0
    for r in test:
        if r.homograph is None:
            continue
        total += 1
        c = counts.get(r.homograph)
        if c and c.most_common(1)[0][0] == r.pronunciation:
            correct += 1
    return correct / total if total else 0.0


def holdout_split(
    records: Sequence[CorpusRecord], test_fraction: float = 0.2, seed: int = 0
) -> tuple[list[CorpusRecord], list[CorpusRecord]]:
    """Split annotated records per (homograph, pronunciation) so both sides see each label.

    Groups with a single record go to the training side. Order within each
    side follows the input.
    """
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    groups: dict[tuple, list[int]] = {}
    for i, r in enumerate(records):
        if r.homograph is not None:
            groups.setdefault((r.homograph, r.pronunciation.serialize()), []).append(i)
    rng = random.Random(f"holdout:{seed}")
    held: set[int] = set()
    for key in sorted(groups):
        idx = groups[key]
        if len(idx) < 2:
            continue
        k = max(1, round(len(idx) * test_fraction))
        held.update(rng.sample(idx, k))
    train = [r for i, r in enumerate(records) if r.homograph is not None and i not in held]
    test = [r for i, r in enumerate(records) if i in held]
    return train, test


@dataclass(frozen=True)
class ImprovementReport:
    train_sentences: int
    test_sentences: int
    homographs: int
    accuracy: float
    baseline: float

    @property
    def improved(self) -> bool:
        return self.accuracy > self.baseline

    def to_json(self) -> dict:
        return dict(asdict(self), improved=self.improved)


def improvement_check(
    records: Sequence[CorpusRecord],
    stopwords: Iterable[str] = (),
    test_fraction: float = 0.2,
    seed: int = 0,
    normalizer: str = "total",
) -> ImprovementReport:
    """Held-out homograph accuracy of the context database against the majority baseline.

    The homograph inventory is read off the annotations themselves
    (pronunciations in first-seen order), so no lexicon is needed.
    """
    prons: dict[str, list[PhonemeString]] = {}
    for r in records:
        if r.homograph is not None and r.pronunciation not in prons.setdefault(r.homograph, []):
            prons[r.homograph].append(r.pronunciation)
    inv = HomographInventory({h: tuple(p) for h, p in prons.items() if len(p) >= 2})
    usable = [r for r in records if r.homograph in inv]
    train, test = holdout_split(usable, test_fraction, seed)
    if not test:
        raise EmptyBenchmarkError("held-out split is empty")
    stop = frozenset(stopwords)
    engine = G2PEngine(Lexicon(), inv, build_db(train, stop, inv), EngineConfig(stopwords=stop, normalizer=normalizer))
    results = [engine.phonemize(r.grapheme) for r in test]
    return ImprovementReport(
        train_sentences=len(train),
        test_sentences=len(test),
        homographs=len(inv),
        accuracy=homograph_accuracy(test, results),
        baseline=majority_baseline_accuracy(train, test),
    )
