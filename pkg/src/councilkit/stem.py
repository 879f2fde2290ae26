"""Snowball English (Porter2) stemmer.

Hand-written implementation of the published algorithm: suffix regions R1/R2,
steps 0-5 with whole-word exceptional forms, y/Y consonant marking, and the
gener-/commun-/arsen- region overrides. Operates on lowercase tokens; inputs
containing no ASCII letters (e.g. "2022") pass through unchanged.
"""

from __future__ import annotations

_VOWELS = frozenset("aeiouy")
_DOUBLES = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
_VALID_LI = frozenset("cdeghkmnrt")

# Whole-word exceptional forms, checked before anything else.
_EXCEPTIONAL_FORMS = {
    "skis": "ski",
    "skies": "sky",
    "dying": "die",
    "lying": "lie",
    "tying": "tie",
    "idly": "idl",
    "gently": "gentl",
    "ugly": "ugli",
    "early": "earli",
    "only": "onli",
    "singly": "singl",
    "sky": "sky",
    "news": "news",
    "howe": "howe",
    "atlas": "atlas",
    "cosmos": "cosmos",
    "bias": "bias",
    "andes": "andes",
}

# Whole words left alone after step 1a.
_STOP_AFTER_1A = frozenset(
    ["inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed"]
)

# Step 2/3/4 suffix tables: (suffix, replacement), longest match wins and the
# matched entry's own condition decides; there is no fallback to shorter
# suffixes once one has matched.
_STEP2 = [
    ("ization", "ize"),
    ("ational", "ate"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("iveness", "ive"),
    ("tional", "tion"),
    ("biliti", "ble"),
    ("lessli", "less"),
    ("entli", "ent"),
    ("ation", "ate"),
    ("alism", "al"),
    ("aliti", "al"),
    ("ousli", "ous"),
    ("iviti", "ive"),
    ("fulli", "ful"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("abli", "able"),
    ("izer", "ize"),
    ("ator", "ate"),
    ("alli", "al"),
    ("bli", "ble"),
    ("ogi", "og"),   # only after l
    ("li", ""),      # only after a valid li-ending
]

_STEP3 = [
    ("ational", "ate"),
    ("tional", "tion"),
    ("alize", "al"),
    ("icate", "ic"),
    ("iciti", "ic"),
    ("ative", ""),   # only in R2
    ("ical", "ic"),
    ("ness", ""),
    ("ful", ""),
]

_STEP4 = [
    "ement",
    "ance",
    "ence",
    "able",
    "ible",
    "ment",
    "ant",
    "ent",
    "ism",
    "ate",
    "iti",
    "ous",
    "ive",
    "ize",
    "ion",  # only after s or t
    "al",
    "er",
    "ic",
]


def _is_vowel(ch: str) -> bool:
    return ch in _VOWELS


def _r1_start(word: str) -> int:
    """Start of R1: after the first non-vowel following a vowel."""
    for prefix in ("gener", "commun", "arsen"):
        if word.startswith(prefix):
            return len(prefix)
    for i in range(len(word) - 1):
        if _is_vowel(word[i]) and not _is_vowel(word[i + 1]):
            return i + 2
    return len(word)


def _region_start(word: str, begin: int) -> int:
    """Same vowel/non-vowel scan as R1 but starting at *begin* (used for R2)."""
    for i in range(begin, len(word) - 1):
        if _is_vowel(word[i]) and not _is_vowel(word[i + 1]):
            return i + 2
    return len(word)


def _ends_short_syllable(word: str) -> bool:
    if len(word) >= 3:
        a, b, c = word[-3], word[-2], word[-1]
        if not _is_vowel(a) and _is_vowel(b) and c not in _VOWELS and c not in "wxY":
            return True
    if len(word) == 2 and _is_vowel(word[0]) and not _is_vowel(word[1]):
        return True
    return False


def _has_vowel(segment: str) -> bool:
    return any(_is_vowel(ch) for ch in segment)


def _step_0(word: str) -> str:
    for suffix in ("'s'", "'s", "'"):
        if word.endswith(suffix):
            return word[: -len(suffix)]
    return word


def _step_1a(word: str) -> str:
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ied") or word.endswith("ies"):
        # more than one letter before the suffix -> "i", otherwise "ie"
        return word[:-3] + ("i" if len(word) > 4 else "ie")
    if word.endswith("us") or word.endswith("ss"):
        return word
    if word.endswith("s") and _has_vowel(word[:-2]):
        return word[:-1]
    return word


def _step_1b(word: str, r1: int) -> str:
    for suffix in ("eedly", "eed"):
        if word.endswith(suffix):
            if len(word) - len(suffix) >= r1:
                return word[: -len(suffix)] + "ee"
            return word
    for suffix in ("ingly", "edly", "ing", "ed"):
        if word.endswith(suffix):
            stemmed = word[: -len(suffix)]
            if not _has_vowel(stemmed):
                return word
            if stemmed.endswith(("at", "bl", "iz")):
                return stemmed + "e"
            if stemmed.endswith(_DOUBLES):
                return stemmed[:-1]
            if len(stemmed) == r1 and _ends_short_syllable(stemmed):
                return stemmed + "e"
            return stemmed
    return word


def _step_1c(word: str) -> str:
    if len(word) > 2 and word[-1] in "yY" and not _is_vowel(word[-2]):
        return word[:-1] + "i"
    return word


def _step_2(word: str, r1: int) -> str:
    for suffix, replacement in _STEP2:
        if not word.endswith(suffix):
            continue
        start = len(word) - len(suffix)
        if start < r1:
            return word
        if suffix == "ogi" and not word[:start].endswith("l"):
            return word
        if suffix == "li" and (start == 0 or word[start - 1] not in _VALID_LI):
            return word
        return word[:start] + replacement
    return word


def _step_3(word: str, r1: int, r2: int) -> str:
    for suffix, replacement in _STEP3:
        if not word.endswith(suffix):
            continue
        start = len(word) - len(suffix)
        if start < r1:
            return word
        if suffix == "ative" and start < r2:
            return word
        return word[:start] + replacement
    return word


def _step_4(word: str, r2: int) -> str:
    for suffix in _STEP4:
        if not word.endswith(suffix):
            continue
        start = len(word) - len(suffix)
        if start < r2:
            return word
        if suffix == "ion" and not word[:start].endswith(("s", "t")):
            return word
        return word[:start]
    return word


def _step_5(word: str, r1: int, r2: int) -> str:
    if word.endswith("e"):
        start = len(word) - 1
        if start >= r2 or (start >= r1 and not _ends_short_syllable(word[:-1])):
            return word[:-1]
        return word
    if word.endswith("l"):
        start = len(word) - 1
        if start >= r2 and len(word) > 1 and word[-2] == "l":
            return word[:-1]
    return word


def stem(word: str) -> str:
    """Stem one lowercase token."""
    exceptional = _EXCEPTIONAL_FORMS.get(word)
    if exceptional is not None:
        return exceptional
    if len(word) < 3:
        return word

    if word.startswith("'"):
        word = word[1:]

    # Mark y as consonant Y when word-initial or after a vowel.
    y_found = False
    if word.startswith("y"):
        word = "Y" + word[1:]
        y_found = True
    chars = list(word)
    for i in range(1, len(chars)):
        if chars[i] == "y" and _is_vowel(chars[i - 1]):
            chars[i] = "Y"
            y_found = True
    word = "".join(chars)

    r1 = _r1_start(word)
    r2 = _region_start(word, r1)

    word = _step_0(word)
    word = _step_1a(word)
    if word not in _STOP_AFTER_1A:
        word = _step_1b(word, r1)
        word = _step_1c(word)
        word = _step_2(word, r1)
        word = _step_3(word, r1, r2)
        word = _step_4(word, r2)
        word = _step_5(word, r1, r2)

    if y_found:
        word = word.replace("Y", "y")
    return word
