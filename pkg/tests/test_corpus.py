import unicodedata

import pytest
from hypothesis import given, strategies as st

from punctstat.corpus import (ScriptClass, cjk_fraction, detect_script, load_document,
                              make_document, normalize_text)
from punctstat.errors import DocumentIOError, EmptyDocumentError, EncodingError


def test_crlf_and_bom(tmp_path):
    f = tmp_path / "a.txt"
    f.write_bytes("﻿你好。\r\n再见。".encode("utf-8"))
    doc = load_document(f)
    assert doc.text == "你好。\n再见。"
    assert doc.script is ScriptClass.CJK
    # the newline is a scalar of text too, so the count is 7
    assert doc.char_count == len(doc.text) == 7
    assert doc.id == "a"


def test_latin_detection(tmp_path):
    f = tmp_path / "b.txt"
    f.write_text("Hello, world.", encoding="utf-8")
    doc = load_document(f)
    assert doc.script is ScriptClass.LATIN and doc.char_count == 13


def test_forty_percent_cjk_is_latin():
    text = "你好北京人 abcdefg"  # 5 CJK of 12 countable scalars
    assert cjk_fraction(text) == pytest.approx(5 / 12)
    assert detect_script(text) is ScriptClass.LATIN
    assert make_document("你好 a").script is ScriptClass.CJK


def test_forced_script_and_threshold():
    assert make_document("abc 你", forced_script="cjk").script is ScriptClass.CJK
    assert detect_script("ab你好", threshold=0.6) is ScriptClass.LATIN


def test_lone_cr_and_controls():
    assert normalize_text("a\rb\r\nc\x07d\te") == "a\nb\ncd\te"


def test_errors(tmp_path):
    with pytest.raises(DocumentIOError):
        load_document(tmp_path / "missing.txt")
    bad = tmp_path / "bad.txt"
    bad.write_bytes(b"\xff\xfeabc")
    with pytest.raises(EncodingError):
        load_document(bad)
    blank = tmp_path / "blank.txt"
    blank.write_text(" \n\t\n", encoding="utf-8")
    with pytest.raises(EmptyDocumentError):
        load_document(blank)


@given(st.text())
def test_normalize_idempotent(text):
    once = normalize_text(text)
    assert normalize_text(once) == once
    assert "\r" not in once and "﻿" not in once


@given(st.text(alphabet=st.characters(blacklist_categories=("Cc", "Cs"), blacklist_characters="﻿")))
def test_no_content_dropped(text):
    assert normalize_text(text) == unicodedata.normalize("NFC", text)
