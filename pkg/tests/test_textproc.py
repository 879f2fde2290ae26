import pytest
from hypothesis import given, strategies as st

from councilkit.errors import InvalidN
from councilkit.textproc import ngrams, stem_tokens, tokenize, tokenize_with_spans


def test_tokenize_basic_phrase():
    assert tokenize("Missing middle housing.") == ["missing", "middle", "housing"]


def test_tokenize_punctuation_and_digits():
    assert tokenize("SDCI's co-op — 2022!") == ["sdci", "s", "co", "op", "2022"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_underscore_splits():
    # underscore is not part of the token grammar
    assert tokenize("a_b") == ["a", "b"]


def test_tokenize_spans_point_back_into_text():
    text = "We are STILL following."
    for token, start, end in tokenize_with_spans(text):
        assert text[start:end].lower() == token


@given(st.text(max_size=80), st.text(max_size=80))
def test_tokenize_separator_concatenation(a, b):
    assert tokenize(a + " " + b) == tokenize(a) + tokenize(b)


@given(st.lists(st.text(alphabet="abcdef", min_size=1, max_size=6), max_size=12),
       st.integers(min_value=1, max_value=6))
def test_ngram_count_formula(tokens, n):
    assert len(ngrams(tokens, n)) == max(0, len(tokens) - n + 1)


def test_ngrams_bigrams():
    assert ngrams(["a", "b", "c"], 2) == ["a b", "b c"]


def test_ngrams_window_longer_than_input():
    assert ngrams(["a"], 3) == []


def test_ngrams_unigram_identity():
    tokens = ["x", "y", "z"]
    assert ngrams(tokens, 1) == tokens


def test_ngrams_rejects_zero():
    with pytest.raises(InvalidN):
        ngrams(["a"], 0)


def test_stem_tokens_maps_each():
    assert stem_tokens(["police", "policing", "policy"]) == ["polic", "polic", "polici"]
