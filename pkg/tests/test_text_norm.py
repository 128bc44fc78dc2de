import io

import hypothesis
import pytest
from hypothesis import strategies as st

from homog2p.errors import MalformedLineError
from homog2p.text_norm import (
    ZWNJ,
    content_words,
    fingerprint,
    load_wordlist,
    normalize,
    token_spans,
    tokenize,
)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("كتاب", "کتاب"),  # Arabic Kaf -> Keheh
        ("علي", "علی"),  # Arabic Yeh -> Persian Yeh
        ("a  b ", "a b"),
        ("\t a\n\nb  ", "a b"),
        ("کتاب", "کتاب"),
        ("", ""),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize(raw) == expected


def test_normalize_composes_to_nfc():
    assert normalize("é") == "é"


@hypothesis.given(st.text())
def test_normalize_idempotent(text):
    once = normalize(text)
    assert normalize(once) == once


def test_tokenize_persian_sentence():
    assert tokenize("این گل، زیباست.") == ["این", "گل", "زیباست"]


@pytest.mark.parametrize("text", ["", "؟!", " ، . « » "])
def test_tokenize_empty_results(text):
    assert tokenize(text) == []


def test_tokenize_keeps_inner_zwnj_and_strips_edges():
    word = f"می{ZWNJ}روم"
    assert tokenize(f"«{word}» {ZWNJ}x{ZWNJ}") == [word, "x"]


def test_tokenize_keeps_inner_punctuation():
    assert tokenize("(a.b) c") == ["a.b", "c"]


@hypothesis.given(st.text())
def test_tokens_use_only_input_characters(text):
    norm = normalize(text)
    chars = set(norm)
    for tok in tokenize(norm):
        assert tok
        assert not any(c.isspace() for c in tok)
        assert set(tok) <= chars
        assert not tok.startswith(ZWNJ) and not tok.endswith(ZWNJ)


@hypothesis.given(st.text())
def test_token_spans_match_tokenize(text):
    norm = normalize(text)
    assert [norm[s:e] for s, e in token_spans(norm)] == tokenize(norm)


def test_content_words_examples():
    assert content_words(["این", "گل", "زیباست"], {"این"}) == ["گل", "زیباست"]
    assert content_words(["a", "b"], set()) == ["a", "b"]
    assert content_words(["a", "b", "a"], {"a", "b"}) == []


@hypothesis.given(st.lists(st.sampled_from("abcde")), st.sets(st.sampled_from("abcde")))
def test_content_words_is_ordered_subsequence(tokens, stop):
    out = content_words(tokens, stop)
    it = iter(tokens)
    assert all(any(t == u for u in it) for t in out)
    assert not set(out) & stop
    assert len(out) == sum(1 for t in tokens if t not in stop)


def test_load_wordlist_normalizes_and_skips_comments():
    words = load_wordlist(io.StringIO("# comment\nيك\n\n  از \n"))
    assert words == {"یک", "از"}


def test_load_wordlist_rejects_multiword_entries():
    with pytest.raises(MalformedLineError) as exc:
        load_wordlist(io.StringIO("ok\ntwo words\n"))
    assert exc.value.line == 2


def test_fingerprint_ignores_order():
    assert fingerprint(["b", "a"]) == fingerprint({"a", "b"})
    assert fingerprint(["a"]) != fingerprint(["a", "b"])
