"""End-to-end helpers shared by the CLI, batch runner and synthetic cohorts."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .chat import DEFAULT_PARTICIPANT, Transcript, parse_chat, parse_plain
from .features import FeatureVector, compute_features
from .graph import build_graph, build_quadrant_graph
from .lexicon import CiuSequence, Lexicon, extract_cius, load_lexicon_file
from .normalize import LemmaRules, load_lemma_rules, normalize
from .spatial import CoordinateTable, load_coordinates_file

CONFIG_DIR_ENV = "CIUGRAPH_CONFIG_DIR"


@dataclass
class RunConfig:
    lexicon_path: str | None = None
    coords_path: str | None = None
    lemma_rules_path: str | None = None
    input_format: str | None = None
    participant_tier: str = DEFAULT_PARTICIPANT
    include_low_precision: bool = False

    def resolved(self) -> "RunConfig":
        """Fill unset paths from ``$CIUGRAPH_CONFIG_DIR`` when those files exist."""
        base = os.environ.get(CONFIG_DIR_ENV)
        if not base:
            return self
        found = {}
        for attr, name in (
            ("lexicon_path", "lexicon.json"),
            ("coords_path", "coords.json"),
            ("lemma_rules_path", "lemma_rules.json"),
        ):
            candidate = Path(base) / name
            if getattr(self, attr) is None and candidate.is_file():
                found[attr] = str(candidate)
        return RunConfig(**{**self.__dict__, **found})


@dataclass(frozen=True)
class Resources:
    lexicon: Lexicon
    coords: CoordinateTable
    rules: LemmaRules
    config: RunConfig

    @classmethod
    def load(cls, config: RunConfig | None = None) -> "Resources":
        config = (config or RunConfig()).resolved()
        return cls(
            lexicon=load_lexicon_file(config.lexicon_path, config.include_low_precision),
            coords=load_coordinates_file(config.coords_path),
            rules=load_lemma_rules(config.lemma_rules_path),
            config=config,
        )


def detect_format(path: str | Path, explicit: str | None = None) -> str:
    if explicit:
        return explicit
    return "chat" if str(path).lower().endswith(".cha") else "text"


def parse_transcript(data: bytes, transcript_id: str, fmt: str, participant: str = DEFAULT_PARTICIPANT) -> Transcript:
    if fmt == "chat":
        return parse_chat(data, transcript_id, participant)
    return parse_plain(data, transcript_id)


def extract(transcript: Transcript, res: Resources) -> CiuSequence:
    return extract_cius(normalize(transcript, res.rules), res.lexicon, transcript.id)


def features_for(seq: CiuSequence, res: Resources) -> FeatureVector:
    return compute_features(build_graph(seq, res.coords), build_quadrant_graph(seq, res.coords))


def process_text(data: bytes | str, transcript_id: str, res: Resources, fmt: str = "text") -> tuple[CiuSequence, FeatureVector]:
    if isinstance(data, str):
        data = data.encode("utf-8")
    seq = extract(parse_transcript(data, transcript_id, fmt, res.config.participant_tier), res)
    return seq, features_for(seq, res)


def process_file(path: str | Path, res: Resources, transcript_id: str | None = None) -> tuple[CiuSequence, FeatureVector]:
    path = Path(path)
    fmt = detect_format(path, res.config.input_format)
    return process_text(path.read_bytes(), transcript_id or path.stem, res, fmt)
