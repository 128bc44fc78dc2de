import io
from collections import Counter

import hypothesis
import pytest
from hypothesis import strategies as st

from homog2p.augment import (
    AugmentPlan,
    SplitConstraint,
    SynonymMap,
    augment_corpus,
    concat_homograph,
    load_synonym_map,
    reorder,
    synonym_replace,
)
from homog2p.corpus import CorpusRecord, balance_report, corpus_stats
from homog2p.errors import EmptyFillersError, NoAllowedBoundaryError, PreconditionError, ValidationError
from homog2p.phoneme_repr import MappingTable, PhonemeString, Repr

P = PhonemeString.parse
W = PhonemeString.word
TABLE = MappingTable.identity(list("abcdefghijklmnopqrstuvwxyzA"))


def rec(text, r1, hom=None, pron=None, r2=None, rid="r"):
    return CorpusRecord(text, P(r1), None if r2 is None else P(r2, Repr.R2), hom, pron, "human", rid)


BASE = rec("w1 w2، w3.", "a | b | c", hom="w2", pron=W("b"), r2="a | b | c")


def test_load_synonym_map():
    m = load_synonym_map(io.StringIO("w1\tv1\tvv\nw1\tu1\tuu\n"))
    assert m.get("w1") == (("v1", W("vv")), ("u1", W("uu")))
    with pytest.raises(Exception):
        load_synonym_map(io.StringIO("w\tw\tx\n"))


def test_synonym_two_variants():
    m = SynonymMap({"w1": (("v1", W("x")), ("u1", W("y")))})
    out = synonym_replace(BASE, m, 10, TABLE)
    assert [r.grapheme for r in out] == ["v1 w2، w3.", "u1 w2، w3."]
    assert [r.phoneme_r1.serialize() for r in out] == ["x | b | c", "y | b | c"]
    assert out[0].phoneme_r2 == P("x | b | c", Repr.R2)
    assert all(r.homograph == "w2" and r.pronunciation == W("b") and r.source == "augmented" for r in out)
    assert len({r.id for r in out}) == 2


def test_synonym_no_mapped_words_and_truncation():
    m = SynonymMap({"w1": (("v1", W("x")), ("u1", W("y")))})
    assert synonym_replace(rec("q", "a"), m) == []
    (only,) = synonym_replace(BASE, m, 1, TABLE)
    assert only.grapheme.startswith("v1")


def test_synonym_skips_homograph_and_ezafe_words():
    m = SynonymMap({"w2": (("zz", W("z")),), "w1": (("v1", W("x")),)})
    r = rec("w1 w2", "a e | b", hom="w2", pron=W("b"), r2="a e 1 | b")
    assert synonym_replace(r, m, 10, TABLE) == []


def test_synonym_needs_table_for_r2():
    m = SynonymMap({"w1": (("v1", W("x")),)})
    with pytest.raises(PreconditionError):
        synonym_replace(BASE, m, 10, None)


def test_reorder_rotation_by_hand():
    r = rec("w1 w2 w3", "a | b | c", hom="w2", pron=W("b"))
    out = reorder(r, SplitConstraint(frozenset({1})), rng_seed=0)  # only boundary 0 left
    assert out.tokens == ("w2", "w3", "w1")
    assert out.phoneme_r1 == P("b | c | a")
    assert out.homograph == "w2"


def test_reorder_errors():
    with pytest.raises(PreconditionError):
        reorder(rec("w1", "a"))
    with pytest.raises(NoAllowedBoundaryError):
        reorder(rec("w1 w2", "a | b"), SplitConstraint(frozenset({0})))
    with pytest.raises(NoAllowedBoundaryError):
        reorder(rec("w1 w2", "a e | b", r2="a e 1 | b"))
    with pytest.raises(ValidationError):
        reorder(rec("w1 w2", "a | b"), SplitConstraint(frozenset({1})))


def test_concat_by_hand():
    filler = rec("f1 f2", "x | y", rid="f")
    out = concat_homograph(BASE, [filler], rng_seed=3, table=TABLE)
    assert out.grapheme == "w1 w2، w3. f1 f2"
    assert out.phoneme_r1 == P("a | b | c | x | y")
    assert out.phoneme_r2 == P("a | b | c | x | y", Repr.R2)
    assert (out.homograph, out.pronunciation) == ("w2", W("b"))


def test_concat_pool_rules():
    with pytest.raises(EmptyFillersError):
        concat_homograph(BASE, [])
    long = rec("a b c d e f", "a | b | c | d | e | f", rid="long")
    with pytest.raises(EmptyFillersError):
        concat_homograph(BASE, [long], max_filler_words=5)
    short = rec("s", "s", rid="short")
    assert concat_homograph(BASE, [long, short], 5, 0, TABLE).tokens[-1] == "s"
    with pytest.raises(PreconditionError):
        concat_homograph(rec("a", "a"), [short])
    with pytest.raises(PreconditionError):
        concat_homograph(BASE, [BASE])


words_st = st.lists(st.sampled_from(["w1", "w2", "w3", "w4", "x،", "«y»"]), min_size=2, max_size=8)


@st.composite
def ezafe_records(draw):
    words = draw(words_st)
    n = len(words)
    groups = [draw(st.lists(st.sampled_from("abcde"), min_size=1, max_size=3)) for _ in range(n)]
    ez = draw(st.sets(st.integers(0, n - 1)))
    r2 = [g + ["e", "1"] if i in ez else g for i, g in enumerate(groups)]
    r1 = [g + ["e"] if i in ez else g for i, g in enumerate(groups)]
    text = " ".join(words)
    from homog2p.text_norm import tokenize
    hom = draw(st.sampled_from(tokenize(text)))
    return CorpusRecord(
        text,
        PhonemeString(tuple(map(tuple, r1))),
        PhonemeString(tuple(map(tuple, r2)), Repr.R2),
        hom,
        W("q"),
        "human",
        "r",
    )


@hypothesis.given(ezafe_records(), st.sets(st.integers(0, 6)), st.integers())
def test_reorder_invariants(r, forbidden, seed):
    n = len(r.tokens)
    constraint = SplitConstraint(frozenset(k for k in forbidden if k < n - 1))
    ezafe = {i for i in r.phoneme_r2.ezafe_words() if i < n - 1}
    try:
        out = reorder(r, constraint, seed)
    except NoAllowedBoundaryError:
        assert set(range(n - 1)) <= constraint.forbidden_boundaries | ezafe
        return
    assert (out.homograph, out.pronunciation) == (r.homograph, r.pronunciation)
    assert Counter(out.tokens) == Counter(r.tokens)
    assert Counter(out.phoneme_r1.tokens) == Counter(r.phoneme_r1.tokens)
    assert Counter(out.phoneme_r2.tokens) == Counter(r.phoneme_r2.tokens)
    # rotation: out == r[b+1:] + r[:b+1]; recover b and check it was allowed
    for b in range(n - 1):
        if out.phoneme_r1.words == r.phoneme_r1.words[b + 1:] + r.phoneme_r1.words[:b + 1] and \
                out.tokens == r.tokens[b + 1:] + r.tokens[:b + 1]:
            if b not in constraint.forbidden_boundaries and b not in ezafe:
                break
    else:
        pytest.fail("output is not a rotation at an allowed boundary")
    assert reorder(r, constraint, seed) == out


def _balanced_corpus(per_pron):
    recs, fillers = [], []
    for h, prons in (("ha", ("a", "b")), ("hb", ("c", "d", "e"))):
        for p in prons:
            for i in range(per_pron):
                words = ["x", h, "y", "z"][: 2 + i % 3]
                groups = ["x", p, "y", "z"][: len(words)]
                recs.append(rec(" ".join(words), " | ".join(groups), h, W(p), rid=f"{h}{p}{i}"))
    for i in range(4):
        fillers.append(rec("f g", "f | g", rid=f"f{i}"))
    return recs + fillers


def test_augmented_balanced_corpus_stays_balanced():
    corpus = _balanced_corpus(6)
    plan = AugmentPlan(synonyms=SynonymMap({"y": (("yy", W("y")), ("yyy", W("y")))}), synonym_max_variants=2,
                       reorder_copies=2, concat_copies=2)
    new = augment_corpus(corpus, plan, seed=1)
    assert new
    report = balance_report(corpus_stats(corpus + new))
    assert all(e.ratio <= 1.05 for e in report.values())
    assert augment_corpus(corpus, plan, seed=1) == new
