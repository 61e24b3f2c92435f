"""CIU dictionary loading and token-stream matching."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConflictingEntry, SchemaError, UnknownCiuId
from .normalize import Token

N_CIUS = 23

# fallback inventory for lexicon files that omit "cius"
DEFAULT_LABELS: dict[int, tuple[str, str]] = {
    1: ("Boy", "Boy"),
    2: ("Girl", "Girl"),
    3: ("Woman", "Woman"),
    4: ("Kitchen", "Kitchen"),
    5: ("Outside", "Outside"),
    6: ("Cookie", "Cookie"),
    7: ("Jar", "Jar"),
    8: ("Stool", "Stool"),
    9: ("Sink", "Sink"),
    10: ("Plate", "Plate"),
    11: ("Dishcloth", "Dishcloth"),
    12: ("Water", "Water"),
    13: ("Window", "Window"),
    14: ("Cupboard", "Cupboard"),
    15: ("Dishes", "Dishes"),
    16: ("Curtains", "Curtains"),
    17: ("Boy taking/stealing", "Taking"),
    18: ("Boy or stool falling", "Falling"),
    19: ("Woman drying/washing plates/dishes", "WomanWashing"),
    20: ("Water overflowing/spilling", "WaterOverflowing"),
    21: ("Action performed by the girl", "GirlAction"),
    22: ("Woman unconcerned by overflowing", "WomanUnconcerned"),
    23: ("Woman indifferent to the children", "WomanIndifferent"),
}


@dataclass(frozen=True, order=True)
class CiuId:
    value: int
    label: str = field(compare=False, default="")
    short: str = field(compare=False, default="")

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return self.short or self.label or str(self.value)


def ciu(value: int) -> CiuId:
    label, short = DEFAULT_LABELS[value]
    return CiuId(value, label, short)


_NON_ALPHA = re.compile(r"[^a-z]")


@lru_cache(maxsize=65536)
def fold(word: str) -> str:
    """Lookup key: lowercase letters only, so ``high-heels`` == ``highheels``."""
    return _NON_ALPHA.sub("", word.lower())


@dataclass(frozen=True)
class MultiwordEntry:
    tokens: tuple[str, ...]
    cius: tuple[int, ...]
    variant_of: str | None = None

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(fold(t) for t in self.tokens)


@dataclass(frozen=True, eq=False)
class Lexicon:
    cius: dict[int, CiuId]
    entries: dict[str, tuple[int, ...]]
    multiword: tuple[MultiwordEntry, ...] = ()
    version: str = ""
    notes: tuple[dict, ...] = ()
    low_precision: frozenset[str] = frozenset()
    include_low_precision: bool = False

    def __post_init__(self):
        index: dict[str, tuple[int, ...]] = {}
        for word, ids in self.entries.items():
            if not self.include_low_precision and word in self.low_precision:
                continue
            index[fold(word)] = ids
        object.__setattr__(self, "_index", index)
        by_first: dict[str, list[MultiwordEntry]] = {}
        for entry in sorted(self.multiword, key=lambda e: -len(e.tokens)):
            by_first.setdefault(entry.key[0], []).append(entry)
        object.__setattr__(self, "_multi", by_first)

    def lookup(self, word: str) -> tuple[int, ...] | None:
        return self._index.get(fold(word))

    def multiword_candidates(self, first: str) -> list[MultiwordEntry]:
        return self._multi.get(fold(first), [])

    def label(self, value: int) -> CiuId:
        return self.cius[value]

    def with_low_precision(self, include: bool) -> "Lexicon":
        if include == self.include_low_precision:
            return self
        return Lexicon(
            self.cius, self.entries, self.multiword, self.version, self.notes,
            self.low_precision, include,
        )

    def pairs(self) -> set[tuple[str, int]]:
        """All (word, CIU) pairs, with multiword phrases joined by spaces."""
        out = {(w, c) for w, ids in self.entries.items() for c in ids}
        out |= {(" ".join(m.tokens), c) for m in self.multiword if m.variant_of is None for c in m.cius}
        return out


def _reject_duplicate_keys(pairs):
    seen: dict = {}
    for key, value in pairs:
        if key in seen and seen[key] != value:
            raise ConflictingEntry(f"entry {key!r} appears twice with different values")
        seen[key] = value
    return seen


def _ciu_list(word: str, raw, known: dict[int, CiuId]) -> tuple[int, ...]:
    if not isinstance(raw, list) or not raw:
        raise SchemaError(f"entry {word!r} must map to a non-empty list of CIU ids")
    ids = []
    for item in raw:
        if isinstance(item, bool) or not isinstance(item, int):
            raise SchemaError(f"entry {word!r}: CIU ids must be integers, got {item!r}")
        if item not in known:
            raise UnknownCiuId(f"entry {word!r} references unknown CIU {item}")
        if item in ids:
            raise SchemaError(f"entry {word!r} lists CIU {item} twice")
        ids.append(item)
    return tuple(ids)


def load_lexicon(data: bytes | str, include_low_precision: bool = False) -> Lexicon:
    """Parse and validate a lexicon JSON document."""
    try:
        doc = json.loads(data, object_pairs_hook=_reject_duplicate_keys)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"lexicon is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), dict):
        raise SchemaError("lexicon must be an object with an 'entries' mapping")

    if "cius" in doc:
        known: dict[int, CiuId] = {}
        for item in doc["cius"]:
            try:
                value = item["id"]
                label = str(item.get("label", ""))
            except (TypeError, KeyError) as exc:
                raise SchemaError(f"bad CIU inventory item {item!r}") from exc
            if isinstance(value, bool) or not isinstance(value, int) or not 1 <= value <= N_CIUS:
                raise UnknownCiuId(f"CIU id {value!r} outside 1..{N_CIUS}")
            known[value] = CiuId(value, label, str(item.get("short", label)))
    else:
        known = {v: ciu(v) for v in DEFAULT_LABELS}

    entries: dict[str, tuple[int, ...]] = {}
    folded: dict[str, str] = {}
    for word, raw in doc["entries"].items():
        if not isinstance(word, str) or not fold(word) or " " in word.strip():
            raise SchemaError(f"bad entry word {word!r}; phrases belong in 'multiword'")
        ids = _ciu_list(word, raw, known)
        key = fold(word)
        if key in folded and entries[folded[key]] != ids:
            raise ConflictingEntry(f"{word!r} and {folded[key]!r} fold together but map to different CIUs")
        folded[key] = word
        entries[word] = ids

    multiword = []
    seen_multi: dict[tuple[str, ...], tuple[int, ...]] = {}
    for item in doc.get("multiword", []):
        if not isinstance(item, dict) or not isinstance(item.get("tokens"), list) or not item["tokens"]:
            raise SchemaError(f"bad multiword item {item!r}")
        tokens = tuple(str(t) for t in item["tokens"])
        entry = MultiwordEntry(tokens, _ciu_list(" ".join(tokens), item.get("cius"), known), item.get("variant_of"))
        if entry.key in seen_multi and seen_multi[entry.key] != entry.cius:
            raise ConflictingEntry(f"multiword {tokens!r} listed twice with different CIUs")
        seen_multi[entry.key] = entry.cius
        multiword.append(entry)

    low = doc.get("low_precision", [])
    if not isinstance(low, list):
        raise SchemaError("low_precision must be a list of words")
    notes = doc.get("notes", [])
    return Lexicon(
        cius=known,
        entries=entries,
        multiword=tuple(multiword),
        version=str(doc.get("version", "")),
        notes=tuple(notes) if isinstance(notes, list) else (),
        low_precision=frozenset(str(w) for w in low),
        include_low_precision=include_low_precision,
    )


def default_lexicon_bytes() -> bytes:
    return resources.files("ciugraph").joinpath("data/default_lexicon.json").read_bytes()


def load_lexicon_file(path: str | Path | None = None, include_low_precision: bool = False) -> Lexicon:
    data = default_lexicon_bytes() if path is None else Path(path).read_bytes()
    return load_lexicon(data, include_low_precision)


@dataclass(frozen=True)
class CiuMatch:
    ciu: CiuId
    token_index: int
    sentence_index: int
    matched_word: str


@dataclass(frozen=True)
class CiuSequence:
    transcript_id: str
    matches: tuple[CiuMatch, ...] = ()

    @property
    def ids(self) -> list[int]:
        return [m.ciu.value for m in self.matches]

    def __len__(self) -> int:
        return len(self.matches)

    def to_dict(self) -> dict:
        return {
            "transcript_id": self.transcript_id,
            "sequence": self.ids,
            "matches": [
                {
                    "ciu": m.ciu.value,
                    "label": m.ciu.short,
                    "token_index": m.token_index,
                    "sentence_index": m.sentence_index,
                    "word": m.matched_word,
                }
                for m in self.matches
            ],
        }

    @classmethod
    def from_ids(cls, transcript_id: str, ids: Iterable[int], lexicon: Lexicon | None = None) -> "CiuSequence":
        """Sequence without token provenance (each CIU in its own position)."""
        labels = lexicon.cius if lexicon is not None else {v: ciu(v) for v in DEFAULT_LABELS}
        matches = []
        for i, value in enumerate(ids):
            if value not in labels:
                raise UnknownCiuId(f"unknown CIU {value}")
            matches.append(CiuMatch(labels[value], i, i, ""))
        return cls(transcript_id, tuple(matches))


def _group_positions(tokens: Sequence[Token]) -> list[tuple[Token, list[Token]]]:
    groups: list[tuple[Token, list[Token]]] = []
    for tok in tokens:
        if tok.alternate and groups and groups[-1][0].token_index == tok.token_index:
            groups[-1][1].append(tok)
        elif not tok.alternate:
            groups.append((tok, []))
    return groups


def extract_cius(tokens: Sequence[Token], lexicon: Lexicon, transcript_id: str = "") -> CiuSequence:
    """Map a normalised token stream to its ordered CIU sequence.

    At each position a multiword phrase is tried first (longest wins), then the
    surface form, then the lemma; hyphen parts are consulted only when the
    joined word found nothing.  A CIU fires at most once per sentence.
    """
    groups = _group_positions(tokens)
    matches: list[CiuMatch] = []
    emitted: set[tuple[int, int]] = set()

    def emit(ids: Iterable[int], tok: Token, word: str) -> None:
        for value in ids:
            key = (tok.sentence_index, value)
            if key in emitted:
                continue
            emitted.add(key)
            matches.append(CiuMatch(lexicon.cius[value], tok.token_index, tok.sentence_index, word))

    i = 0
    while i < len(groups):
        tok, alternates = groups[i]
        phrase = None
        for entry in lexicon.multiword_candidates(tok.surface):
            n = len(entry.tokens)
            window = groups[i : i + n]
            if len(window) == n and all(
                g[0].sentence_index == tok.sentence_index and g[0].surface == k
                for g, k in zip(window, entry.key)
            ):
                phrase = entry
                break
        if phrase is not None:
            emit(phrase.cius, tok, " ".join(g[0].surface for g in groups[i : i + len(phrase.tokens)]))
            i += len(phrase.tokens)
            continue
        ids = lexicon.lookup(tok.surface)
        word = tok.surface
        if ids is None:
            ids = lexicon.lookup(tok.lemma)
            word = tok.lemma
        if ids is not None:
            emit(ids, tok, word)
        else:
            for alt in alternates:
                alt_ids = lexicon.lookup(alt.surface) or lexicon.lookup(alt.lemma)
                if alt_ids:
                    emit(alt_ids, alt, alt.surface)
        i += 1
    return CiuSequence(transcript_id, tuple(matches))
