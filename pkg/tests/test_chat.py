import pytest
from hypothesis import given, strategies as st

from ciugraph.chat import SourceFormat, parse_chat, parse_plain, strip_chat_markup
from ciugraph.errors import InputError, MalformedChat


def test_retrace_drops_reformulated_words():
    t = parse_chat("*PAR:\tthe boy [//] the kid is falling .")
    assert [u.raw_text for u in t.utterances] == ["the kid is falling ."]


def test_investigator_tier_excluded():
    t = parse_chat("@Begin\n@Languages:\teng\n*INV:\tokay go ahead .\n*PAR:\tI see a boy .\n@End")
    assert [u.raw_text for u in t.utterances] == ["I see a boy ."]
    assert t.source_format is SourceFormat.CHAT


def test_headers_only_is_malformed():
    with pytest.raises(MalformedChat):
        parse_chat("@Begin\n@Languages:\teng\n@End\n")


def test_participant_code_is_configurable():
    t = parse_chat("*INV:\tokay go ahead .\n*PAR:\tI see a boy .", participant="INV")
    assert [u.raw_text for u in t.utterances] == ["okay go ahead ."]


def test_markup_classes():
    assert strip_chat_markup("&-um the (be)cause xxx boy [/] boy . \x151234_5678\x15") == "the because boy ."
    assert strip_chat_markup("<the girl> [/] the girl is there .") == "the girl is there ."
    assert strip_chat_markup("she's doggie@c washing [*] &+wa dishes .") == "she's doggie washing dishes ."
    assert strip_chat_markup("mother (.) is (..) drying +...") == "mother is drying ."


def test_continuation_lines_are_joined():
    t = parse_chat("*PAR:\tthe boy is\n\ton the stool .\n%mor:\tdet|the n|boy\n")
    assert [u.raw_text for u in t.utterances] == ["the boy is on the stool ."]


def test_indices_consecutive_and_empty_dropped():
    t = parse_chat("*PAR:\t&-um .\n*PAR:\tcookie .\n*INV:\tmhm .\n*PAR:\txxx .\n*PAR:\tjar .")
    assert [(u.index, u.raw_text) for u in t.utterances] == [(0, "cookie ."), (1, "jar .")]


def test_bom_tolerated_and_bad_utf8_rejected():
    assert parse_chat("﻿*PAR:\thi .".encode("utf-8")).utterances[0].raw_text == "hi ."
    with pytest.raises(InputError):
        parse_chat(b"*PAR:\t\xff\xfe .")


def test_plain_sentences(golden_text):
    assert len(parse_plain("I see a boy. He falls.").utterances) == 2
    assert parse_plain("").utterances == ()
    t = parse_plain(golden_text)
    assert len(t.utterances) == 6
    assert t.utterances[0].raw_text == "I see mom's doing the dishes."
    assert t.utterances[-1].raw_text.endswith("“Shh, don’t tell anybody.”")


@given(st.lists(st.text(alphabet="abc xyz,.?!'", min_size=0, max_size=30), max_size=5))
def test_plain_round_trip(parts):
    text = " ".join(parts)
    t = parse_plain(text)
    assert "".join(u.raw_text for u in t.utterances).replace(" ", "") == text.replace(" ", "")
    assert parse_plain(text) == t


_chat_word = st.sampled_from(
    ["the", "boy", "&-um", "&uh", "xxx", "[/]", "[//]", "[*]", "<the", "girl>", "(be)cause", "\x1512_34\x15", "(.)", "."]
)


@given(st.lists(_chat_word, max_size=15))
def test_chat_output_has_no_markup(words):
    line = "*PAR:\t" + " ".join(words) + "\n*PAR:\tboy ."
    t = parse_chat(line)
    for u in t.utterances:
        assert u.raw_text
        for bad in ("[", "]", "&-", "\t", "\x15", "<", ">"):
            assert bad not in u.raw_text
    assert [u.index for u in t.utterances] == list(range(len(t.utterances)))
