"""Snowball English stemmer tests against the frozen reference vocabulary."""

from councilkit.stem import stem

# Quoted usage facts the whole analytics layer leans on.
QUOTED_FACTS = {
    "police": "polic",
    "policing": "polic",
    "policy": "polici",
    "housing": "hous",
    "union": "union",
    "homelessness": "homeless",
}


def test_quoted_stem_facts():
    for word, expected in QUOTED_FACTS.items():
        assert stem(word) == expected


def test_exceptional_forms():
    assert stem("skis") == "ski"
    assert stem("skies") == "sky"
    assert stem("dying") == "die"
    assert stem("idly") == "idl"
    assert stem("gently") == "gentl"
    assert stem("ugly") == "ugli"
    assert stem("early") == "earli"
    assert stem("only") == "onli"
    assert stem("singly") == "singl"
    for invariant in ("sky", "news", "howe", "atlas", "cosmos", "bias", "andes"):
        assert stem(invariant) == invariant


def test_post_1a_invariants():
    for word in ("inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed"):
        assert stem(word) == word


def test_short_words_left_alone():
    assert stem("a") == "a"
    assert stem("by") == "by"
    assert stem("is") == "is"
    assert stem("'s") == "'s"


def test_apostrophes():
    assert stem("boy's") == "boy"
    assert stem("boys'") == "boy"
    assert stem("'cause") == "caus"


def test_digits_pass_through():
    assert stem("2022") == "2022"
    assert stem("12034") == "12034"


def test_determinism_thousand_calls():
    outputs = {stem("policing") for _ in range(1000)}
    assert outputs == {"polic"}


def test_query_stems_are_fixed_points():
    # The plotted query grams are stems themselves; stemming them again must
    # not move them, or queries built from stems would silently miss.
    for stemmed in ("polic", "hous", "union", "homeless", "polici", "middl", "miss"):
        assert stem(stemmed) == stemmed


def test_full_reference_vocabulary(reference_vocabulary):
    mismatches = [
        (word, expected, stem(word))
        for word, expected in reference_vocabulary
        if stem(word) != expected
    ]
    assert len(reference_vocabulary) >= 29000
    assert mismatches == []
