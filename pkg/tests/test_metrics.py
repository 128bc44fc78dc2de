import itertools

import hypothesis
import pytest
from hypothesis import strategies as st

from homog2p.context_db import build_db
from homog2p.corpus import CorpusRecord
from homog2p.engine import Decision, EngineConfig, G2PEngine, PhonemizationResult
from homog2p.errors import EmptyBenchmarkError, MissingDecisionError, RepresentationMismatchError
from homog2p.metrics import (
    aligned_homograph_choice,
    bench,
    edit_distance,
    homograph_accuracy,
    homograph_accuracy_aligned,
    majority_baseline_accuracy,
    per,
)
from homog2p.phoneme_repr import PhonemeString, Repr
from homog2p.synthetic import homograph_sentences, make_world, plain_sentences
from oracles import recursive_edit_distance

W = PhonemeString.word


def flat(toks, rep=Repr.R1):
    return PhonemeString((tuple(toks),), rep) if toks else PhonemeString((), rep)


def test_per_examples():
    assert per(flat("abc"), flat("abc")) == 0.0
    assert per(flat("abc"), flat("axc")) == pytest.approx(1 / 3)
    assert per(flat("ab"), flat("")) == 1.0
    assert per(flat(""), flat("")) == 0.0
    assert per(flat(""), flat("xyz")) == 3.0


def test_per_ignores_word_boundaries():
    a = PhonemeString.parse("a b | c")
    b = PhonemeString.parse("a | b c")
    assert per(a, b) == 0.0


def test_per_representation_mismatch():
    with pytest.raises(RepresentationMismatchError):
        per(flat("a"), flat("a", Repr.R2))


def test_edit_distance_matches_recursive_oracle_exhaustively():
    seqs = [s for n in range(4) for s in itertools.product("abc", repeat=n)]
    for a in seqs:
        for b in seqs:
            assert edit_distance(a, b) == recursive_edit_distance(a, b)


@hypothesis.given(st.lists(st.sampled_from("abcd"), max_size=8), st.lists(st.sampled_from("abcd"), max_size=8))
def test_distance_symmetric_per_not(a, b):
    assert edit_distance(a, b) == edit_distance(b, a)
    assert per(flat(a), flat(a)) == 0


def _res(hom, chosen, idx=0):
    return PhonemizationResult(W("x"), (hom,), (Decision(idx, hom, W(chosen), None),))


def _rec(hom, gold, rid):
    return CorpusRecord(hom, W("x"), homograph=hom, pronunciation=W(gold), id=rid)


def test_homograph_accuracy_counts():
    recs = [_rec("h", "a", str(i)) for i in range(4)]
    assert homograph_accuracy(recs, [_res("h", "a")] * 4) == 1.0
    assert homograph_accuracy(recs, [_res("h", "a")] * 3 + [_res("h", "b")]) == 0.75


def test_homograph_accuracy_missing_decision():
    rec = _rec("h", "a", "1")
    with pytest.raises(MissingDecisionError):
        homograph_accuracy([rec], [PhonemizationResult(W("x"), ("h",))])


@hypothesis.given(st.lists(st.booleans(), min_size=1, max_size=12), st.randoms())
def test_homograph_accuracy_permutation_invariant(hits, rnd):
    pairs = [(_rec("h", "a", str(i)), _res("h", "a" if ok else "b")) for i, ok in enumerate(hits)]
    base = homograph_accuracy(*zip(*pairs))
    rnd.shuffle(pairs)
    assert homograph_accuracy(*zip(*pairs)) == base


def test_aligned_extraction():
    rec = CorpusRecord("x h y", PhonemeString.parse("p | a b | q"), homograph="h", pronunciation=W("ab"), id="1")
    cands = (W("ab"), W("cd"))
    assert aligned_homograph_choice(rec, PhonemeString.parse("p | a b | q"), cands) == W("ab")
    # unaligned hypothesis: search the flat token stream
    assert aligned_homograph_choice(rec, flat("pcdq"), cands) == W("cd")
    assert aligned_homograph_choice(rec, flat("pq"), cands) is None
    assert homograph_accuracy_aligned([rec], [flat("pabq")], lambda h: cands) == 1.0


WORLD = make_world(700, {2: 5, 3: 2}, seed=8)
TRAIN = homograph_sentences(WORLD, 15, seed=8)
TEST = homograph_sentences(WORLD, 4, seed=9) + plain_sentences(WORLD, 10, seed=9)
DB = build_db(TRAIN, WORLD.stopwords, WORLD.inventory)
ENGINE = G2PEngine(WORLD.lexicon, WORLD.inventory, DB, EngineConfig(stopwords=WORLD.stopwords))


def test_bench_deterministic_engine_has_zero_spread():
    rep = bench(ENGINE, TEST, runs=3)
    assert rep.runs == 3 and rep.per_std == 0 and rep.homograph_acc_std == 0
    assert 0 <= rep.per_mean <= 100 and 0 <= rep.homograph_acc_mean <= 100
    assert rep.latency_mean > 0 and rep.latency_std >= 0
    assert rep.homograph_sentences == sum(1 for r in TEST if r.homograph)


def test_bench_single_run_all_std_zero():
    rep = bench(ENGINE, TEST, runs=1)
    assert rep.per_std == rep.homograph_acc_std == rep.latency_std == 0


def test_bench_gold_phonemes_score_zero_per():
    # references were generated from the same lexicon, so only homograph errors remain
    rep = bench(ENGINE, TEST, runs=1)
    wrong = 100 - rep.homograph_acc_mean
    assert (rep.per_mean == 0) == (wrong == 0)


def test_bench_pooled_mode_and_table_row():
    rep = bench(ENGINE, TEST, runs=2, pooled=True, timing=False)
    assert rep.per_mode == "pooled" and rep.latency_mean is None
    assert rep.table_row().count("|") == 3


def test_bench_uses_injected_clock():
    ticks = itertools.count()
    rep = bench(ENGINE, TEST[:5], runs=2, clock=lambda: next(ticks) * 0.5)
    assert rep.latency_mean == 0.5 and rep.latency_std == 0


def test_bench_errors():
    with pytest.raises(EmptyBenchmarkError):
        bench(ENGINE, [], runs=1)
    with pytest.raises(ValueError):
        bench(ENGINE, TEST, runs=0)


def test_disambiguation_beats_majority_baseline():
    results = [ENGINE.phonemize(r.grapheme) for r in TEST]
    assert homograph_accuracy(TEST, results) > majority_baseline_accuracy(TRAIN, TEST)
