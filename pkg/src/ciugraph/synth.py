"""Synthetic cohorts with controllable group effects.

Each transcript is a CIU walk rendered back to plain text through the
lexicon, so fixtures exercise the whole extraction pipeline.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .chat import parse_plain
from .errors import SpecError
from .lexicon import Lexicon, extract_cius, load_lexicon_file
from .normalize import DEFAULT_RULES, normalize
from .spatial import CoordinateTable, load_coordinates_file

GROUPS = ("unimpaired", "impaired")

# walk-generator parameters and their defaults (identical for both groups)
EFFECT_DEFAULTS = {
    "length_mean": 22.0,   # mean CIU mentions per transcript (Poisson, at least 1)
    "repeat_rate": 0.3,    # chance the next mention revisits an earlier CIU
    "self_repeat": 0.1,    # share of revisits that repeat the current CIU
    "locality": 0.6,       # chance a new CIU is drawn from the current quadrant
}

COVARIATE_DEFAULTS = {
    "age": (65.0, 8.0),
    "education": (15.0, 2.5),
    "female_rate": (0.6, 0.0),
}


@dataclass
class SynthSpec:
    n_per_group: int = 30
    seed: int = 0
    effect: dict[str, dict[str, float]] = field(default_factory=dict)
    covariates: dict[str, dict[str, list[float]]] = field(default_factory=dict)
    multi_ciu_sentences: bool = False
    id_prefix: str = "s"

    def param(self, name: str, group: str) -> float:
        return float(self.effect.get(name, {}).get(group, EFFECT_DEFAULTS[name]))

    def covariate(self, name: str, group: str) -> tuple[float, float]:
        mean, sd = self.covariates.get(name, {}).get(group, COVARIATE_DEFAULTS[name])
        return float(mean), float(sd)

    def validate(self) -> None:
        if isinstance(self.n_per_group, bool) or not isinstance(self.n_per_group, int) or self.n_per_group < 0:
            raise SpecError(f"n_per_group must be a non-negative integer, got {self.n_per_group!r}")
        for name, per_group in self.effect.items():
            if name not in EFFECT_DEFAULTS:
                raise SpecError(f"unknown effect parameter {name!r}")
            for group, value in per_group.items():
                if group not in GROUPS:
                    raise SpecError(f"unknown group {group!r} for {name}")
                if not isinstance(value, (int, float)) or not math.isfinite(value):
                    raise SpecError(f"{name}[{group}] must be a number")
                if name != "length_mean" and not 0.0 <= value <= 1.0:
                    raise SpecError(f"{name}[{group}] must lie in [0, 1]")
                if name == "length_mean" and value < 0:
                    raise SpecError("length_mean must be non-negative")
        for name, per_group in self.covariates.items():
            if name not in COVARIATE_DEFAULTS:
                raise SpecError(f"unknown covariate {name!r}")
            for group, pair in per_group.items():
                if group not in GROUPS or not isinstance(pair, (list, tuple)) or len(pair) != 2:
                    raise SpecError(f"covariate {name}[{group}] must be [mean, sd]")

    @classmethod
    def from_json(cls, text: str | bytes) -> "SynthSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise SpecError("spec must be a JSON object")
        unknown = set(doc) - {"n_per_group", "seed", "effect", "covariates", "multi_ciu_sentences", "id_prefix"}
        if unknown:
            raise SpecError(f"unknown spec keys {sorted(unknown)}")
        spec = cls(**doc)
        spec.validate()
        return spec


@dataclass(frozen=True)
class CohortRow:
    id: str
    path: str
    group: str
    age: float
    education_years: float
    gender: int
    sequence: tuple[int, ...]


@lru_cache(maxsize=8)
def _round_trip_words(lexicon: Lexicon) -> dict[int, tuple[str, ...]]:
    """Single-CIU words that re-extract to exactly their CIU in a carrier sentence."""
    words: dict[int, list[str]] = {}
    for word, ids in sorted(lexicon.entries.items()):
        if len(ids) != 1 or word in lexicon.low_precision:
            continue
        seq = extract_cius(normalize(parse_plain(render_sentence([word])), DEFAULT_RULES), lexicon)
        if seq.ids == list(ids):
            words.setdefault(ids[0], []).append(word)
    return {k: tuple(v) for k, v in words.items()}


def render_sentence(words: list[str]) -> str:
    return "There is the " + " and the ".join(words) + "."


def _walk(rng: np.random.Generator, spec: SynthSpec, group: str, table: CoordinateTable, available: list[int]) -> list[int]:
    length = max(1, int(rng.poisson(spec.param("length_mean", group))))
    repeat = spec.param("repeat_rate", group)
    self_repeat = spec.param("self_repeat", group)
    locality = spec.param("locality", group)
    quads = {c: table.quadrant(c) for c in available}
    seq = [available[int(rng.integers(len(available)))]]
    mentioned = {seq[0]}
    while len(seq) < length:
        current = seq[-1]
        fresh = [c for c in available if c not in mentioned]
        if fresh and rng.random() >= repeat:
            near = [c for c in fresh if quads[c] == quads[current]]
            pool = near if near and rng.random() < locality else fresh
        elif rng.random() < self_repeat:
            pool = [current]
        else:
            earlier = sorted(mentioned - {current}) or [current]
            pool = earlier
        nxt = pool[int(rng.integers(len(pool)))]
        seq.append(nxt)
        mentioned.add(nxt)
    return seq


def generate_cohort(
    spec: SynthSpec,
    lexicon: Lexicon | None = None,
    table: CoordinateTable | None = None,
) -> tuple[list[CohortRow], dict[str, str]]:
    """Manifest rows and plain-text transcripts (id -> text) for a cohort."""
    spec.validate()
    lexicon = lexicon or load_lexicon_file()
    table = table or load_coordinates_file()
    vocab = _round_trip_words(lexicon)
    available = sorted(c for c in vocab if c in table.coords)
    if spec.n_per_group and not available:
        raise SpecError("lexicon has no unambiguous words with coordinates")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    rows, texts = [], {}
    for group in GROUPS:
        age_mean, age_sd = spec.covariate("age", group)
        edu_mean, edu_sd = spec.covariate("education", group)
        female_rate, _ = spec.covariate("female_rate", group)
        for i in range(spec.n_per_group):
            rid = f"{spec.id_prefix}{group[0]}{i:04d}"
            seq = _walk(rng, spec, group, table, available)
            words = [vocab[c][int(rng.integers(len(vocab[c])))] for c in seq]
            if spec.multi_ciu_sentences:
                sentences, j = [], 0
                while j < len(words):
                    k = j + int(rng.integers(1, 4))
                    sentences.append(render_sentence(words[j:k]))
                    j = k
            else:
                sentences = [render_sentence([w]) for w in words]
            texts[rid] = " ".join(sentences) + "\n"
            rows.append(
                CohortRow(
                    id=rid,
                    path=f"transcripts/{rid}.txt",
                    group=group,
                    age=round(float(rng.normal(age_mean, age_sd)), 1),
                    education_years=round(float(max(0.0, rng.normal(edu_mean, edu_sd))), 1),
                    gender=int(rng.random() < female_rate),
                    sequence=tuple(seq),
                )
            )
    return rows, texts


MANIFEST_COLUMNS = ("id", "path", "group", "age", "education_years", "gender")


def manifest_csv(rows: list[CohortRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MANIFEST_COLUMNS)
    for r in rows:
        w.writerow([r.id, r.path, r.group, f"{r.age:g}", f"{r.education_years:g}", r.gender])
    return buf.getvalue()


def write_cohort(rows: list[CohortRow], texts: dict[str, str], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    (out / "transcripts").mkdir(parents=True, exist_ok=True)
    for r in rows:
        (out / r.path).write_text(texts[r.id], encoding="utf-8")
    manifest = out / "manifest.csv"
    manifest.write_text(manifest_csv(rows), encoding="utf-8")
    return manifest
