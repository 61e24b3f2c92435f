import json

import pytest

from ciugraph.chat import parse_plain
from ciugraph.errors import SpecError
from ciugraph.pipeline import extract
from ciugraph.synth import MANIFEST_COLUMNS, SynthSpec, generate_cohort, manifest_csv, write_cohort


def test_deterministic(res):
    spec = SynthSpec(n_per_group=5, seed=42)
    a = generate_cohort(spec, res.lexicon, res.coords)
    b = generate_cohort(SynthSpec(n_per_group=5, seed=42), res.lexicon, res.coords)
    c = generate_cohort(SynthSpec(n_per_group=5, seed=43), res.lexicon, res.coords)
    assert a == b and a != c


def test_round_trip(res):
    rows, texts = generate_cohort(SynthSpec(n_per_group=20, seed=1), res.lexicon, res.coords)
    for row in rows:
        seq = extract(parse_plain(texts[row.id], row.id), res)
        assert tuple(seq.ids) == row.sequence


def test_multi_ciu_sentences_respect_dedup(res):
    spec = SynthSpec(n_per_group=10, seed=3, multi_ciu_sentences=True)
    rows, texts = generate_cohort(spec, res.lexicon, res.coords)
    assert any(" and the " in t for t in texts.values())
    for row in rows:
        seq = extract(parse_plain(texts[row.id], row.id), res)
        assert set(seq.ids) == set(row.sequence)


def test_empty_and_invalid(res):
    assert generate_cohort(SynthSpec(n_per_group=0), res.lexicon, res.coords) == ([], {})
    for bad in [
        {"n_per_group": -1},
        {"effect": {"nope": {"impaired": 1}}},
        {"effect": {"repeat_rate": {"impaired": 1.5}}},
        {"effect": {"repeat_rate": {"elderly": 0.5}}},
        {"covariates": {"age": {"impaired": [1]}}},
        {"unknown_key": 1},
    ]:
        with pytest.raises(SpecError):
            SynthSpec.from_json(json.dumps(bad))
    with pytest.raises(SpecError):
        SynthSpec.from_json("{")


def test_effect_parameters_shift_lengths(res):
    spec = SynthSpec(n_per_group=60, seed=5, effect={"length_mean": {"unimpaired": 10, "impaired": 30}})
    rows, _ = generate_cohort(spec, res.lexicon, res.coords)
    mean = {g: sum(len(r.sequence) for r in rows if r.group == g) / 60 for g in ("unimpaired", "impaired")}
    assert mean["impaired"] > mean["unimpaired"] + 10


def test_write_cohort(tmp_path, res):
    rows, texts = generate_cohort(SynthSpec(n_per_group=3, seed=0), res.lexicon, res.coords)
    manifest = write_cohort(rows, texts, tmp_path)
    lines = manifest.read_text().splitlines()
    assert lines[0].split(",") == list(MANIFEST_COLUMNS)
    assert len(lines) == 7
    assert manifest.read_text() == manifest_csv(rows)
    for r in rows:
        assert (tmp_path / r.path).read_text() == texts[r.id]
