"""English Snowball (Porter2) stemmer.

Implemented from the published algorithm description.  Regions R1/R2 are
tracked as integer start offsets into the current word: suffix removal
never moves a region start, replacement keeps offsets valid, and a
character appended at position ``len(word)`` belongs to a region iff the
region start is <= that position.

The y/Y trick: an initial ``y`` or a ``y`` after a vowel is uppercased to
mark it as a consonant; remaining lowercase ``y`` counts as a vowel.
"""

from __future__ import annotations

_VOWELS = "aeiouy"
_DOUBLES = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
_LI_ENDINGS = "cdeghkmnrt"

_EXCEPTIONS = {
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

# invariant after step 1a: suffix stripping stops for these
_POST_1A_INVARIANTS = frozenset(
    ["inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed"]
)

_STEP1B_SUFFIXES = ("eedly", "ingly", "edly", "eed", "ing", "ed")

_STEP2_RULES = (
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
    ("ogi", "og"),
    ("li", ""),
)

_STEP3_RULES = (
    ("ational", "ate"),
    ("tional", "tion"),
    ("alize", "al"),
    ("icate", "ic"),
    ("iciti", "ic"),
    ("ative", ""),
    ("ical", "ic"),
    ("ness", ""),
    ("ful", ""),
)

_STEP4_SUFFIXES = (
    "ement", "ance", "ence", "able", "ible", "ment",
    "ant", "ent", "ism", "ate", "iti", "ous", "ive", "ize",
    "ion", "al", "er", "ic",
)


def _mark_consonant_ys(word: str) -> str:
    chars = list(word)
    if chars[0] == "y":
        chars[0] = "Y"
    for i in range(1, len(chars)):
        if chars[i] == "y" and chars[i - 1] in _VOWELS:
            chars[i] = "Y"
    return "".join(chars)


def _region_starts(word: str) -> tuple[int, int]:
    """R1 starts after the first non-vowel that follows a vowel (with the
    gener/commun/arsen prefix exceptions); R2 repeats the rule inside R1."""
    r1 = len(word)
    for prefix in ("gener", "commun", "arsen"):
        if word.startswith(prefix):
            r1 = len(prefix)
            break
    else:
        for i in range(1, len(word)):
            if word[i] not in _VOWELS and word[i - 1] in _VOWELS:
                r1 = i + 1
                break
    r2 = len(word)
    for i in range(r1 + 1, len(word)):
        if word[i] not in _VOWELS and word[i - 1] in _VOWELS:
            r2 = i + 1
            break
    return r1, r2


def _ends_with_short_syllable(word: str) -> bool:
    if len(word) == 2:
        return word[0] in _VOWELS and word[1] not in _VOWELS
    if len(word) >= 3:
        return (
            word[-1] not in _VOWELS
            and word[-1] not in "wxY"
            and word[-2] in _VOWELS
            and word[-3] not in _VOWELS
        )
    return False


def _is_short(word: str, r1: int) -> bool:
    return r1 >= len(word) and _ends_with_short_syllable(word)


def _in_region(word: str, suffix_len: int, region_start: int) -> bool:
    return len(word) - suffix_len >= region_start


def _has_vowel(part: str) -> bool:
    return any(ch in _VOWELS for ch in part)


def stem(word: str) -> str:
    word = word.lower()
    if len(word) <= 2:
        return word

    word = word.replace("’", "'").replace("‘", "'").replace("‛", "'")
    if word in _EXCEPTIONS:
        return _EXCEPTIONS[word]
    if word.startswith("'"):
        word = word[1:]
        if len(word) <= 2:
            return word

    word = _mark_consonant_ys(word)
    r1, r2 = _region_starts(word)

    # step 0: possessive endings
    for suffix in ("'s'", "'s", "'"):
        if word.endswith(suffix):
            word = word[: -len(suffix)]
            break

    # step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith(("ied", "ies")):
        word = word[:-2] if len(word) > 4 else word[:-1]
    elif word.endswith(("us", "ss")):
        pass
    elif word.endswith("s") and _has_vowel(word[:-2]):
        word = word[:-1]

    if word in _POST_1A_INVARIANTS:
        return word

    # step 1b
    for suffix in _STEP1B_SUFFIXES:
        if word.endswith(suffix):
            if suffix in ("eed", "eedly"):
                if _in_region(word, len(suffix), r1):
                    word = word[: -len(suffix)] + "ee"
            else:
                head = word[: -len(suffix)]
                if _has_vowel(head):
                    word = head
                    if word.endswith(("at", "bl", "iz")):
                        word += "e"
                    elif word.endswith(_DOUBLES):
                        word = word[:-1]
                    elif _is_short(word, r1):
                        word += "e"
            break

    # step 1c: y -> i after a non-vowel that is not the first letter
    if len(word) > 2 and word[-1] in "yY" and word[-2] not in _VOWELS:
        word = word[:-1] + "i"

    # step 2 (longest matching suffix; applies only inside R1)
    for suffix, repl in _STEP2_RULES:
        if word.endswith(suffix):
            if _in_region(word, len(suffix), r1):
                if suffix == "ogi":
                    if word[-4] == "l":
                        word = word[:-1]
                elif suffix == "li":
                    if word[-3] in _LI_ENDINGS:
                        word = word[:-2]
                else:
                    word = word[: -len(suffix)] + repl
            break

    # step 3 (inside R1; "ative" additionally requires R2)
    for suffix, repl in _STEP3_RULES:
        if word.endswith(suffix):
            if _in_region(word, len(suffix), r1):
                if suffix == "ative":
                    if _in_region(word, len(suffix), r2):
                        word = word[:-5]
                else:
                    word = word[: -len(suffix)] + repl
            break

    # step 4 (inside R2; "ion" only after s or t)
    for suffix in _STEP4_SUFFIXES:
        if word.endswith(suffix):
            if _in_region(word, len(suffix), r2):
                if suffix != "ion" or word[-4] in "st":
                    word = word[: -len(suffix)]
            break

    # step 5
    if word.endswith("e"):
        if _in_region(word, 1, r2) or (
            _in_region(word, 1, r1) and not _ends_with_short_syllable(word[:-1])
        ):
            word = word[:-1]
    elif word.endswith("l") and _in_region(word, 1, r2) and word[-2] == "l":
        word = word[:-1]

    return word.replace("Y", "y")
