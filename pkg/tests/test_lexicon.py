import json

import pytest
from hypothesis import given, strategies as st

from ciugraph.chat import parse_plain
from ciugraph.errors import ConflictingEntry, SchemaError, UnknownCiuId
from ciugraph.lexicon import CiuSequence, extract_cius, fold, load_lexicon, load_lexicon_file
from ciugraph.normalize import normalize

from conftest import GOLDEN_SEQUENCE
from oracles import EXPECTED_DELTA, PINNED_ORDERS, lexicon_delta


@pytest.fixture(scope="module")
def lex():
    return load_lexicon_file()


def ids(text, lexicon):
    return extract_cius(normalize(parse_plain(text)), lexicon).ids


def test_default_lexicon_shape(lex):
    assert sorted(lex.cius) == list(range(1, 24))
    assert len(lex.entries) >= 190
    assert lex.cius[18].label == "Boy or stool falling"


def test_fidelity_delta(lex):
    assert lexicon_delta(lex) == EXPECTED_DELTA
    assert {w: lex.entries[w] for w in PINNED_ORDERS} == PINNED_ORDERS


def test_every_delta_is_documented(lex):
    noted = {n["word"] for n in lex.notes}
    assert {"get", "dish", "kid", "child", "notice"} <= noted


def test_minimal_and_invalid():
    lex = load_lexicon('{"entries": {"boy": [1]}}')
    assert lex.lookup("boy") == (1,)
    with pytest.raises(UnknownCiuId):
        load_lexicon('{"entries": {"boy": [99]}}')
    with pytest.raises(ConflictingEntry):
        load_lexicon('{"entries": {"boy": [1], "boy": [2]}}')
    with pytest.raises(ConflictingEntry):
        load_lexicon('{"entries": {"high-heels": [3], "highheels": [1]}}')
    with pytest.raises(SchemaError):
        load_lexicon('{"entries": {"boy": [1, 1]}}')
    with pytest.raises(SchemaError):
        load_lexicon("[1, 2]")
    with pytest.raises(UnknownCiuId):
        load_lexicon('{"cius": [{"id": 24, "label": "x"}], "entries": {}}')


def test_golden_sequence(lex, golden_text):
    assert ids(golden_text, lex) == GOLDEN_SEQUENCE


def test_simple_sentence(lex):
    assert ids("the boy is on the stool", lex) == [1, 8]
    assert extract_cius([], lex) == CiuSequence("")


def test_dedup_is_per_sentence(lex):
    assert ids("A nice day outside.", lex) == [5]
    assert ids("A nice day. Outside.", lex) == [5, 5]


def test_emission_orders(lex):
    assert ids("The kid.", lex) == [1, 2]
    assert ids("She is not noticing.", lex) == [23, 22]
    assert ids("A dish.", lex) == [15]


def test_multiword_and_hyphen_folding(lex):
    assert ids("She doesn't see them.", lex) == [23]
    assert ids("She does not see them.", lex) == [23]
    assert ids("She wears high-heels.", lex) == [3]
    assert ids("She wears high heels.", lex) == ids("She wears highheels.", lex)
    assert fold("High-Heels") == "highheels"


def test_low_precision_switch(lex):
    assert ids("three", lex) == []
    assert ids("three", lex.with_low_precision(True)) == [8]


def test_to_dict_provenance(lex):
    seq = extract_cius(normalize(parse_plain("The boy fell. The jar.")), lex, "t1")
    doc = seq.to_dict()
    assert doc["transcript_id"] == "t1"
    assert doc["sequence"] == seq.ids
    assert doc["matches"][0]["word"] == "boy"
    json.dumps(doc)


@given(st.lists(st.sampled_from(["boy", "girl", "kid", "cookie", "jar", "the", "and", ".", "falling", "dishes", "day",
                                  "outside", "noticing", "high-heels", "doesn't", "see", "!"]), max_size=40))
def test_match_invariants(words):
    lex = load_lexicon_file()
    seq = extract_cius(normalize(parse_plain(" ".join(words))), lex)
    keys = [(m.sentence_index, m.ciu.value) for m in seq.matches]
    assert len(keys) == len(set(keys))
    positions = [m.token_index for m in seq.matches]
    assert positions == sorted(positions)
    assert seq == extract_cius(normalize(parse_plain(" ".join(words))), lex)
