"""Tokenisation and rule-based lemmatisation of transcript utterances.

The lemmatiser only has to be right for the closed vocabulary of the CIU
lexicon, so it is a short ordered list of suffix rules plus an irregulars
table rather than a general-purpose morphological analyser.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .chat import Transcript
from .errors import SchemaError

VERB_STEM = "@verb"

_VOWELS = frozenset("aeiou")

DEFAULT_IRREGULARS: dict[str, str] = {
    # be / have / do / go
    "is": "be", "am": "be", "are": "be", "was": "be", "were": "be", "been": "be",
    "has": "have", "had": "have",
    "does": "do", "did": "do", "done": "do",
    "goes": "go", "went": "go", "gone": "go",
    # strong verbs, including every inflection the default lexicon needs
    "saw": "see", "seen": "see", "said": "say", "says": "say",
    "told": "tell", "took": "take", "taken": "take",
    "stole": "steal", "stolen": "steal", "fell": "fall", "fallen": "fall",
    "got": "get", "gotten": "get", "ran": "run", "overran": "overrun",
    "stood": "stand", "spoke": "speak", "spoken": "speak",
    "hung": "hang", "grew": "grow", "grown": "grow",
    "caught": "catch", "thought": "think", "gave": "give", "given": "give",
    "came": "come", "made": "make", "knew": "know", "known": "know",
    "flew": "fly", "broke": "break", "broken": "break", "sat": "sit",
    "held": "hold", "ate": "eat", "eaten": "eat", "felt": "feel",
    "kept": "keep", "found": "find", "lost": "lose", "wore": "wear",
    "worn": "wear", "tore": "tear", "torn": "tear", "swept": "sweep",
    "wrote": "write", "written": "write", "drew": "draw", "drawn": "draw",
    "threw": "throw", "thrown": "throw", "blew": "blow", "blown": "blow",
    "drank": "drink", "sank": "sink", "sunk": "sink", "spilt": "spill",
    "snuck": "sneak", "overtook": "overtake", "understood": "understand",
    "tying": "tie", "lying": "lie", "dying": "die",
    "using": "use", "used": "use", "uses": "use",
    "ignoring": "ignore", "ignored": "ignore",
    "acquiring": "acquire", "acquired": "acquire",
    "exploring": "explore", "explored": "explore",
    "adding": "add", "added": "add",
    "changing": "change", "changed": "change",
    # plurals
    "children": "child", "men": "man", "women": "woman", "feet": "foot",
    "teeth": "tooth", "mice": "mouse", "people": "person",
    "shelves": "shelf", "knives": "knife", "wives": "wife", "halves": "half",
    "leaves": "leaf", "cookies": "cookie", "brownies": "brownie",
    "movies": "movie", "goodies": "goodie",
}

DEFAULT_SUFFIX_RULES: list[tuple[str, str]] = [
    (r"^(..+)ies$", r"\1y"),
    (r"^(.+)sses$", r"\1ss"),
    # sibilant stems only: boxes, buzzes, wishes; horses/sizes keep their e
    (r"^(.+(?:x|zz|[cs]h))es$", r"\1"),
    (r"^(.{2,}[^siu'])s$", r"\1"),
    (r"^(..+)ied$", r"\1y"),
    (r"^(.)ied$", r"\1ie"),
    (r"^(.*[aeiouy].*)ing$", VERB_STEM),
    (r"^(.*[aeiouy].*)ed$", VERB_STEM),
]

DEFAULT_PROTECTED: frozenset[str] = frozenset(
    """
    always perhaps news series species lens pants scissors physics clothes
    something anything nothing everything morning evening during ceiling
    this his its us yes as bus gas
    need seed feed speed bleed breed greed weed deed indeed hundred naked
    wicked sacred bed red shed sled bred
    """.split()
)

# stems that get their silent e back after -ing/-ed is removed
_RESTORE_E = re.compile(
    r"(?:[cvu]|[^z]z|[bcdfgkptz]l|[nrlp]s|[aeiou][aeiou]s|[^aeiou]ur|"
    r"[dr]g|[^aeiou]at|[^aeiou]id|[^aeiou]ut|[^aeiou]ir|uir|[^aeiou]ar|[^aeiou]in)$"
)


@dataclass(frozen=True)
class LemmaRules:
    irregulars: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_IRREGULARS))
    suffix_rules: tuple[tuple[str, str], ...] = tuple(DEFAULT_SUFFIX_RULES)
    protected: frozenset[str] = DEFAULT_PROTECTED

    def __post_init__(self):
        key = (tuple(sorted(self.irregulars.items())), self.suffix_rules, self.protected)
        object.__setattr__(self, "_hash", hash(key))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def from_json(cls, data: bytes | str) -> "LemmaRules":
        try:
            doc = json.loads(data)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise SchemaError(f"lemma rules are not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise SchemaError("lemma rules must be a JSON object")
        irregulars = doc.get("irregulars", DEFAULT_IRREGULARS)
        rules = doc.get("suffix_rules", DEFAULT_SUFFIX_RULES)
        protected = doc.get("protected", sorted(DEFAULT_PROTECTED))
        if not isinstance(irregulars, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in irregulars.items()
        ):
            raise SchemaError("irregulars must map strings to strings")
        try:
            pairs = tuple((str(p), str(r)) for p, r in rules)
            for pattern, _ in pairs:
                re.compile(pattern)
        except (TypeError, ValueError, re.error) as exc:
            raise SchemaError(f"bad suffix rule: {exc}") from exc
        if not isinstance(protected, list):
            raise SchemaError("protected must be a list of strings")
        return cls(
            irregulars={k.lower(): v.lower() for k, v in irregulars.items()},
            suffix_rules=pairs,
            protected=frozenset(str(w).lower() for w in protected),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "LemmaRules":
        return cls.from_json(Path(path).read_bytes())

    def to_json(self) -> str:
        return json.dumps(
            {
                "irregulars": dict(sorted(self.irregulars.items())),
                "suffix_rules": [list(r) for r in self.suffix_rules],
                "protected": sorted(self.protected),
            },
            indent=2,
        )


DEFAULT_RULES = LemmaRules()


def _is_vowel(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return True
    return ch == "y" and i > 0 and not _is_vowel(word, i - 1)


def _measure(stem: str) -> int:
    """Number of vowel-consonant sequences (Porter's m)."""
    pattern = "".join("v" if _is_vowel(stem, i) else "c" for i in range(len(stem)))
    return len(re.findall(r"v+c+", pattern))


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3 or stem[-1] in "wxy":
        return False
    n = len(stem)
    return not _is_vowel(stem, n - 3) and _is_vowel(stem, n - 2) and not _is_vowel(stem, n - 1)


def _verb_stem(stem: str, suffix: str) -> str | None:
    if len(stem) < (3 if suffix == "ed" else 2):
        return None
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS | set("lszf"):
        return stem[:-1]
    if stem.endswith("e"):
        return stem + "e" if suffix == "ed" else stem
    if _RESTORE_E.search(stem) or (_measure(stem) == 1 and _ends_cvc(stem)):
        return stem + "e"
    return stem


@lru_cache(maxsize=64)
@lru_cache(maxsize=32)
def _compiled(rules: tuple[tuple[str, str], ...]) -> tuple[tuple[re.Pattern, str], ...]:
    return tuple((re.compile(p), r) for p, r in rules)


def _apply_once(surface: str, rules: LemmaRules) -> str:
    if surface in rules.protected:
        return surface
    if surface in rules.irregulars:
        return rules.irregulars[surface]
    for pattern, repl in _compiled(rules.suffix_rules):
        m = pattern.match(surface)
        if m is None:
            continue
        if repl == VERB_STEM:
            suffix = "ing" if surface.endswith("ing") else "ed"
            out = _verb_stem(m.group(1), suffix)
            if out is None:
                continue
            return out
        return m.expand(repl)
    return surface


def lemmatize(surface: str, rules: LemmaRules = DEFAULT_RULES) -> str:
    """Lemma of a lowercase, punctuation-free word.

    Rules are applied until the word stops changing, which makes the function
    idempotent by construction.
    """
    return _lemmatize(surface, rules)


@lru_cache(maxsize=65536)
def _lemmatize(surface: str, rules: LemmaRules) -> str:
    word = surface
    for _ in range(8):
        nxt = _apply_once(word, rules)
        if nxt == word or not nxt:
            break
        word = nxt
    return word


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    sentence_index: int
    token_index: int
    alternate: bool = False


_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "`": "'", "´": "'", "ʼ": "'"})
_WORD_RE = re.compile(r"[\w'\-+]+")
_SPLIT_RE = re.compile(r"[-+_]+")
_NON_LETTER_RE = re.compile(r"[^a-z]")

_EXPANSIONS = {
    "gonna": ["going", "to"],
    "wanna": ["want", "to"],
    "gotta": ["got", "to"],
    "can't": ["can", "not"],
    "cannot": ["can", "not"],
    "won't": ["will", "not"],
    "shan't": ["shall", "not"],
    "ain't": ["is", "not"],
}
_CLITICS = (("n't", "not"), ("'re", "are"), ("'ve", "have"), ("'ll", "will"), ("'m", "am"), ("'d", "would"))


def _expand_clitics(word: str) -> list[str]:
    word = word.strip("'")
    if word in _EXPANSIONS:
        return list(_EXPANSIONS[word])
    if word.endswith("'s"):
        return [word[:-2]]
    for clitic, full in _CLITICS:
        if word.endswith(clitic) and len(word) > len(clitic):
            return [word[: -len(clitic)], full]
    return [word]


def _letters(piece: str) -> str:
    piece = unicodedata.normalize("NFKD", piece)
    return _NON_LETTER_RE.sub("", piece)


def word_forms(word: str) -> list[tuple[str, list[str]]]:
    """Split one whitespace word into ``(joined, parts)`` token groups.

    ``parts`` has more than one element only for hyphenated or ``+``/``_``
    compounds; those parts become alternates of the joined form.
    """
    return [(joined, list(parts)) for joined, parts in _word_forms(word)]


@lru_cache(maxsize=65536)
def _word_forms(word: str) -> tuple[tuple[str, tuple[str, ...]], ...]:
    groups = []
    for piece in _expand_clitics(word.lower().translate(_APOSTROPHES)):
        parts = tuple(p for p in (_letters(s) for s in _SPLIT_RE.split(piece)) if p)
        if parts:
            groups.append(("".join(parts), parts if len(parts) > 1 else ()))
    return tuple(groups)


def normalize(transcript: Transcript, rules: LemmaRules = DEFAULT_RULES) -> list[Token]:
    tokens: list[Token] = []
    position = 0
    for utt in transcript.utterances:
        text = unicodedata.normalize("NFKC", utt.raw_text).translate(_APOSTROPHES)
        for raw in _WORD_RE.findall(text):
            for joined, parts in _word_forms(raw):
                tokens.append(Token(joined, lemmatize(joined, rules), utt.index, position))
                for part in parts:
                    tokens.append(Token(part, lemmatize(part, rules), utt.index, position, alternate=True))
                position += 1
    return tokens


def load_lemma_rules(path: str | Path | None) -> LemmaRules:
    return DEFAULT_RULES if path is None else LemmaRules.from_file(path)
