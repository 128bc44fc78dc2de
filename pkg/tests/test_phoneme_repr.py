import io

import hypothesis
import pytest
from hypothesis import strategies as st

from homog2p.errors import MissingEzafeVowelError, UnknownSymbolError, ValidationError
from homog2p.phoneme_repr import (
    MappingTable,
    PhonemeString,
    Repr,
    annotate_ezafe,
    load_mapping_table,
    map_repr,
    parse_pronunciation,
)

ALPHABET = ("g", "o", "l", "e", "z", "i", "b", "A", "sh", "ch")
IDENTITY = MappingTable.identity(ALPHABET)
SHIFTED = MappingTable(tuple((s, s if s == "e" else s.upper() + "'") for s in ALPHABET))


def r1(*words):
    return PhonemeString(tuple(tuple(w) for w in words), Repr.R1)


def r2(*words):
    return PhonemeString(tuple(tuple(w) for w in words), Repr.R2)


def test_serialize_format_is_fixed():
    ps = r2(["g", "o", "l", "e", "1"], ["z", "i", "b", "A"])
    assert ps.serialize() == "g o l e 1 | z i b A"
    assert PhonemeString.parse("g o l e 1 | z i b A", Repr.R2) == ps
    assert PhonemeString.parse("", Repr.R1).words == ()


def test_boundaries_partition_tokens():
    ps = r1(["g", "o", "l"], ["sh", "A"])
    assert ps.tokens == ("g", "o", "l", "sh", "A")
    assert ps.word_boundaries == (3, 5)
    assert PhonemeString.from_tokens(ps.tokens, ps.word_boundaries) == ps


@pytest.mark.parametrize("bounds", [(3, 3, 5), (2,), (5, 3), ()])
def test_from_tokens_rejects_bad_boundaries(bounds):
    with pytest.raises(ValidationError):
        PhonemeString.from_tokens(("g", "o", "l", "sh", "A"), bounds)


@pytest.mark.parametrize(
    "words, rep",
    [
        ([["g", "1"]], Repr.R2),  # marker not after e
        ([["1"]], Repr.R2),
        ([["e", "1"]], Repr.R1),  # marker outside R2
        ([[]], Repr.R1),
        ([["a b"]], Repr.R1),
        ([["|"]], Repr.R1),
    ],
)
def test_invalid_phoneme_strings(words, rep):
    with pytest.raises(ValidationError):
        PhonemeString(tuple(tuple(w) for w in words), rep)


def test_parse_pronunciation_compact_and_spaced():
    assert parse_pronunciation("ketAb").tokens == tuple("ketAb")
    assert parse_pronunciation("k e sh").tokens == ("k", "e", "sh")


def test_map_identity_table():
    out = map_repr(r1(["g", "o", "l"]), IDENTITY, Repr.R2)
    assert out == r2(["g", "o", "l"])


def test_map_r2_to_r1_drops_marker():
    out = map_repr(r2(["g", "o", "l", "e", "1"]), IDENTITY, Repr.R1)
    assert out == r1(["g", "o", "l", "e"])


def test_map_unknown_symbol_reports_position():
    with pytest.raises(UnknownSymbolError) as exc:
        map_repr(r1(["g", "o"], ["l", "q"]), IDENTITY, Repr.R2)
    assert exc.value.symbol == "q"
    assert exc.value.position == 3


def test_map_same_representation_is_rejected():
    with pytest.raises(ValidationError):
        map_repr(r1(["g"]), IDENTITY, Repr.R1)


def test_map_multichar_symbols():
    out = map_repr(r1(["sh", "e"], ["ch", "A"]), SHIFTED, Repr.R2)
    assert out.words == (("SH'", "e"), ("CH'", "A'"))


def test_mapping_table_must_be_bijective():
    with pytest.raises(ValidationError):
        MappingTable((("a", "x"), ("b", "x")))
    with pytest.raises(ValidationError):
        MappingTable((("a", "1"),))


def test_load_mapping_table():
    t = load_mapping_table(io.StringIO("# r1\tr2\nS\tʃ\nA\tɒ\n"))
    assert t.symbol_map(Repr.R2) == {"S": "ʃ", "A": "ɒ"}


markerless = st.lists(
    st.lists(st.sampled_from(ALPHABET), min_size=1, max_size=6).map(tuple), max_size=8
).map(lambda ws: PhonemeString(tuple(ws), Repr.R1))


@hypothesis.given(markerless, st.sampled_from([IDENTITY, SHIFTED]))
def test_round_trip_is_identity(ps, table):
    there = map_repr(ps, table, Repr.R2)
    assert there.word_boundaries == ps.word_boundaries
    assert map_repr(there, table, Repr.R1) == ps


def test_annotate_ezafe_inserts_after_final_e():
    ps = r2(["g", "o", "l", "e"], ["z", "i", "b", "A"])
    out = annotate_ezafe(ps, {0})
    assert out == r2(["g", "o", "l", "e", "1"], ["z", "i", "b", "A"])


def test_annotate_ezafe_empty_annotation_is_identity():
    ps = r2(["g", "o", "l", "e"])
    assert annotate_ezafe(ps, set()) is ps


def test_annotate_ezafe_non_e_vowel_errors():
    with pytest.raises(MissingEzafeVowelError) as exc:
        annotate_ezafe(r2(["g", "o", "l", "e"], ["z", "i", "b", "A"]), {1})
    assert exc.value.word_index == 1


def test_annotate_ezafe_uses_dictionary_form():
    # the word's own final e is not a linking vowel
    ps = r2(["x", "A", "n", "e"], ["m", "A"])
    with pytest.raises(MissingEzafeVowelError):
        annotate_ezafe(ps, {0}, {0: r1(["x", "A", "n", "e"])})
    ok = annotate_ezafe(r2(["g", "o", "l", "e"]), {0}, {0: r1(["g", "o", "l"])})
    assert ok.words[0][-1] == "1"


@hypothesis.given(
    st.lists(st.lists(st.sampled_from(ALPHABET), min_size=1, max_size=5), min_size=1, max_size=6),
    st.data(),
)
def test_annotate_ezafe_inserts_exactly_one_marker_per_word(words, data):
    words = [w + ["e"] if data.draw(st.booleans()) else w for w in words]
    ps = PhonemeString(tuple(tuple(w) for w in words), Repr.R2)
    eligible = [i for i, w in enumerate(words) if w[-1] == "e"]
    chosen = data.draw(st.sets(st.sampled_from(eligible))) if eligible else set()
    out = annotate_ezafe(ps, chosen)
    assert len(out.tokens) == len(ps.tokens) + len(chosen)
    assert out.ezafe_words() == frozenset(chosen)
    toks = out.tokens
    assert all(toks[i - 1] == "e" for i, t in enumerate(toks) if t == "1")
