"""Transcript ingestion for CHAT (``.cha``) and plain-text picture descriptions."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import InputError, MalformedChat

DEFAULT_PARTICIPANT = "PAR"


class SourceFormat(str, Enum):
    CHAT = "chat"
    PLAIN_TEXT = "plain_text"


@dataclass(frozen=True)
class Utterance:
    index: int
    raw_text: str
    speaker: str


@dataclass(frozen=True)
class Transcript:
    id: str
    utterances: tuple[Utterance, ...] = field(default_factory=tuple)
    source_format: SourceFormat = SourceFormat.PLAIN_TEXT

    def __len__(self) -> int:
        return len(self.utterances)


_TIER_RE = re.compile(r"^\*([A-Za-z0-9]+):\s?(.*)$")
_DEPENDENT_RE = re.compile(r"^%([A-Za-z0-9]+):")
_BULLET_RE = re.compile(r"\x15[^\x15]*\x15|•\s*\d+_\d+\s*•")
_PAUSE_RE = re.compile(r"\(\s*[\d.:]*\s*\)")
_RETRACE_RE = re.compile(r"\[/{1,3}\]|\[/-\]")
_BRACKET_RE = re.compile(r"\[[^\]]*\]")
_ANGLE_GROUP_RE = re.compile(r"<([^<>]*)>\s*$")
_WORD_SUFFIX_RE = re.compile(r"@[A-Za-z:$*]*")
_SPECIAL_MARKS = str.maketrans({c: None for c in "<>‡„⌈⌉⌊⌋^↑↓≈≋"})
_NONWORDS = {"xxx", "yyy", "www", "xx", "yy"}
_RETRACE_LOOKBACK = 4


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data.lstrip("﻿")
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise InputError(f"transcript is not valid UTF-8: {exc}") from exc


def _resolve_retracing(text: str) -> str:
    """Remove retraced/repeated material and its marker.

    The scope is the preceding ``<...>`` group when there is one.  Otherwise it
    extends back to the closest earlier word that equals the first word of the
    repair (``the boy [//] the kid`` drops ``the boy``), looking at most a few
    words back, and falls back to the single preceding word.
    """
    while True:
        m = _RETRACE_RE.search(text)
        if m is None:
            return text
        before, after = text[: m.start()].rstrip(), text[m.end():]
        group = _ANGLE_GROUP_RE.search(before)
        if group is not None:
            text = before[: group.start()] + " " + after.lstrip()
            continue
        before = _BRACKET_RE.sub(" ", before).rstrip()
        words = before.split()
        following = after.split()
        cut = len(words) - 1 if words else 0
        if following and words:
            onset = following[0].lower()
            for back in range(1, min(_RETRACE_LOOKBACK, len(words)) + 1):
                if words[-back].lower() == onset:
                    cut = len(words) - back
                    break
        text = " ".join(words[:cut]) + " " + after.lstrip()


def _clean_word(word: str) -> str:
    if word.startswith("&") or word.startswith("0"):
        return ""
    if word.lower() in _NONWORDS:
        return ""
    if word.startswith("+") and not any(ch.isalnum() for ch in word):
        # special utterance terminators and linkers: +... +/. +//? +" +,
        term = word.rstrip('"')[-1:]
        return term if term in ".?!" else ""
    word = _WORD_SUFFIX_RE.sub("", word)
    # shortenings: (be)cause -> because
    word = word.replace("(", "").replace(")", "")
    # prosodic marks inside words
    word = word.replace(":", "") if any(ch.isalpha() for ch in word) else word
    return word.translate(_SPECIAL_MARKS)


def strip_chat_markup(text: str) -> str:
    """Reduce one CHAT main-tier line to plain words and terminators."""
    text = _BULLET_RE.sub(" ", text)
    text = text.replace("\t", " ")
    text = _PAUSE_RE.sub(" ", text)
    text = _resolve_retracing(text)
    text = _BRACKET_RE.sub(" ", text)
    text = text.replace("[", " ").replace("]", " ")
    words = [_clean_word(w) for w in text.split()]
    return " ".join(w for w in words if w)


def _logical_lines(text: str) -> list[str]:
    lines: list[str] = []
    for line in text.splitlines():
        if line.startswith("\t") and lines:
            lines[-1] += " " + line.strip()
        else:
            lines.append(line)
    return lines


def parse_chat(data: bytes | str, transcript_id: str = "", participant: str = DEFAULT_PARTICIPANT) -> Transcript:
    """Parse a CHAT document, keeping only the ``participant`` main tier."""
    text = _decode(data)
    utterances: list[Utterance] = []
    seen_participant = False
    for line in _logical_lines(text):
        if not line.startswith("*"):
            continue
        m = _TIER_RE.match(line)
        if m is None or m.group(1) != participant:
            continue
        seen_participant = True
        clean = strip_chat_markup(m.group(2))
        if not any(ch.isalnum() for ch in clean):
            continue
        utterances.append(Utterance(len(utterances), clean, participant))
    if not seen_participant:
        raise MalformedChat(f"no *{participant}: tier found; wrong file or participant code?")
    return Transcript(transcript_id, tuple(utterances), SourceFormat.CHAT)


# A sentence runs up to its terminator(s) plus any closing quotes/brackets.
_SENTENCE_RE = re.compile(r"[^.?!]*[.?!]+[\"'”’»)\]]*|[^.?!]+$")


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_RE.findall(text) if s.strip()]


def parse_plain(data: bytes | str, transcript_id: str = "", speaker: str = DEFAULT_PARTICIPANT) -> Transcript:
    """Split a plain-text description into sentence utterances."""
    text = _decode(data)
    utterances = tuple(
        Utterance(i, " ".join(s.split()), speaker) for i, s in enumerate(split_sentences(text))
    )
    return Transcript(transcript_id, utterances, SourceFormat.PLAIN_TEXT)
