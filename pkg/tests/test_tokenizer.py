import re

import pytest
from hypothesis import given, settings, strategies as st

from punctstat.corpus import make_document
from punctstat.errors import ConfigError, EmptyLexiconError, ParseError, PolicyError, ScriptMismatchError
from punctstat.tokenizer import (Lexicon, PunctPolicy, TokenKind, classify_scalar, parse_lexicon,
                                 read_jsonl, segment_cjk, segment_run, tokenize, tokenize_latin)

W, P, T, N = TokenKind.WORD, TokenKind.PUNCT, TokenKind.TERMINAL, TokenKind.NEWLINE
CJK = PunctPolicy.cjk()
LATIN = PunctPolicy.latin()


def pairs(seq):
    return [(t.surface, t.kind) for t in seq]


def cjk_doc(text):
    return make_document(text, forced_script="cjk")


def latin_doc(text):
    return make_document(text, forced_script="latin")


# -- lexicon -------------------------------------------------------------------------

def test_lexicon_parse():
    lex = parse_lexicon(["北京 34488", "天安门 329"])
    assert len(lex) == 2 and lex.max_word_len == 3 and lex.total == 34488 + 329


def test_lexicon_duplicate_keeps_max():
    assert parse_lexicon(["了 1000", "了 500"]).entries["了"] == 1000
    assert parse_lexicon(["了 500", "了 1000"]).entries["了"] == 1000


def test_lexicon_errors():
    with pytest.raises(ParseError) as info:
        parse_lexicon(["abc"])
    assert info.value.line == 1
    with pytest.raises(ParseError) as info:
        parse_lexicon(["好 3", "坏 -1"])
    assert info.value.line == 2
    with pytest.raises(EmptyLexiconError):
        parse_lexicon(["", "   "])


def test_lexicon_pos_column_and_floor():
    lex = parse_lexicon(["北京 10 ns", "我 90 r"])
    assert lex.entries == {"北京": 10, "我": 90}
    assert lex.floor_log_prob < min(lex.log_prob(w) for w in lex.entries)


# -- CJK segmentation -----------------------------------------------------------------

def test_segment_sentence():
    lex = Lexicon.from_entries({"我": 50, "爱": 30, "北京": 40, "天安门": 20, "天安": 1, "门": 10})
    got = pairs(segment_cjk(cjk_doc("我爱北京天安门。"), lex, CJK))
    assert got == [("我", W), ("爱", W), ("北京", W), ("天安门", W), ("。", T)]


def test_segment_comma():
    lex = Lexicon.from_entries({"你好": 10, "再见": 10})
    got = pairs(segment_cjk(cjk_doc("你好，再见。"), lex, CJK))
    assert got == [("你好", W), ("，", P), ("再见", W), ("。", T)]


def test_repeated_question_marks_not_merged():
    lex = Lexicon.from_entries({"真的": 10, "吗": 10})
    got = pairs(segment_cjk(cjk_doc("真的吗？？"), lex, CJK))
    assert got == [("真的", W), ("吗", W), ("？", T), ("？", T)]


def test_ellipsis_runs_merge_but_not_across_space():
    lex = Lexicon.from_entries({"好": 1})
    assert pairs(segment_cjk(cjk_doc("好……好"), lex, CJK)) == [("好", W), ("……", T), ("好", W)]
    assert pairs(segment_cjk(cjk_doc("好… …"), lex, CJK)) == [("好", W), ("…", T), ("…", T)]


def test_oov_scalars_become_single_words():
    lex = Lexicon.from_entries({"北京": 5})
    assert segment_run("北京鼹鼠", lex) == ["北京", "鼹", "鼠"]


def test_tie_prefers_fewer_words():
    # P(甲乙) = 1/16 = P(甲) P(乙): an exact tie between one and two words
    lex = Lexicon.from_entries({"甲乙": 1, "甲": 4, "乙": 4, "丙": 7})
    assert lex.total == 16
    assert segment_run("甲乙", lex) == ["甲乙"]


def test_script_mismatch_and_missing_lexicon():
    lex = Lexicon.from_entries({"a": 1})
    with pytest.raises(ScriptMismatchError):
        segment_cjk(latin_doc("abc."), lex, CJK)
    with pytest.raises(ScriptMismatchError):
        tokenize_latin(cjk_doc("你好。"), LATIN)
    with pytest.raises(ConfigError):
        tokenize(cjk_doc("你好。"))


def test_gold_segmentation(fixtures, zh_lexicon):
    doc = make_document((fixtures / "zh_story.txt").read_text(encoding="utf-8"), "zh_story")
    toks = tokenize(doc, zh_lexicon, CJK)
    lines, cur = [], []
    for t in toks:
        if t.kind is N:
            if cur:
                lines.append(" ".join(cur))
            cur = []
        else:
            cur.append(t.surface)
    if cur:
        lines.append(" ".join(cur))
    gold = [l for l in (fixtures / "zh_story.gold.txt").read_text(encoding="utf-8").splitlines() if l]
    assert lines == gold


def test_cjk_word_chars_match_text(fixtures, zh_lexicon):
    doc = make_document((fixtures / "zh_story.txt").read_text(encoding="utf-8"), "zh_story")
    toks = tokenize(doc, zh_lexicon, CJK)
    marks = CJK.terminal_set | CJK.nonterminal_set | CJK.excluded_set
    expected = sum(1 for ch in doc.text if not ch.isspace() and ch not in marks)
    assert sum(t.char_len for t in toks.words()) == expected


# -- Latin -----------------------------------------------------------------------------

def test_latin_examples():
    assert pairs(tokenize_latin(latin_doc("Hello, world."), LATIN)) == [
        ("Hello", W), (",", P), ("world", W), (".", T)]
    assert pairs(tokenize_latin(latin_doc("Wait... done"), LATIN)) == [
        ("Wait", W), ("...", T), ("done", W)]
    assert pairs(tokenize_latin(latin_doc("don't stop"), LATIN)) == [("don't", W), ("stop", W)]


def test_latin_brackets_dropped_and_recorded():
    seq = tokenize_latin(latin_doc('He said (quietly) "no!"'), LATIN)
    assert seq.surfaces() == ["He", "said", "quietly", "no", "!"]
    assert [m for _, m in seq.dropped] == ["(", ")", '"', '"']


def test_latin_newline_tokens():
    seq = tokenize_latin(latin_doc("One\nTwo."), LATIN)
    assert pairs(seq) == [("One", W), ("\n", N), ("Two", W), (".", T)]


# -- classification and policy --------------------------------------------------------------

@pytest.mark.parametrize("mark,kind", [("。", T), ("，", P), ("【", TokenKind.DROPPED), ("……", T),
                                       ("\n", N), ("字", W), ("；", T), ("、", P)])
def test_classify_cjk(mark, kind):
    assert classify_scalar(mark, CJK) is kind


def test_policy_must_be_disjoint():
    with pytest.raises(PolicyError):
        PunctPolicy.cjk(nonterminal_set=frozenset({"，", "。"}))


def test_policy_override_changes_classification():
    pol = PunctPolicy.latin(terminal_set=frozenset({".", "!", "?", "…", "...", ";"}),
                            nonterminal_set=frozenset({",", ":"}))
    assert classify_scalar(";", pol) is T
    assert PunctPolicy.from_dict(pol.to_dict(), "latin") == pol


# -- invariants ---------------------------------------------------------------------------------

cjk_alphabet = st.sampled_from(list("我你他好的了是在北京天安门。！？…；，、：【】“”—\n 　ab"))
latin_alphabet = st.sampled_from(list("abcXY'.,;:!?…()[]\"-*_ \n\t"))
ZH_LEX = Lexicon.from_entries({"我": 9, "你好": 5, "北京": 7, "天安门": 3, "好的": 2, "是": 8})


def _squeeze(text):
    return re.sub(r"[^\S\n]", "", text)


@settings(max_examples=300)
@given(st.text(cjk_alphabet, min_size=1).filter(lambda s: s.strip()))
def test_cjk_reconstructs(text):
    doc = cjk_doc(text)
    seq = segment_cjk(doc, ZH_LEX, CJK)
    assert seq.reconstruct() == _squeeze(doc.text)
    assert pairs(segment_cjk(doc, ZH_LEX, CJK)) == pairs(seq)
    for t in seq:
        if t.kind is T:
            assert t.surface in CJK.terminal_set or set(t.surface) == {"…"}


@settings(max_examples=300)
@given(st.text(latin_alphabet, min_size=1).filter(lambda s: s.strip()))
def test_latin_reconstructs(text):
    doc = latin_doc(text)
    seq = tokenize_latin(doc, LATIN)
    assert seq.reconstruct() == _squeeze(doc.text)
    for t in seq:
        if t.kind is T:
            assert t.surface in LATIN.terminal_set or set(t.surface) == {"…"}


def test_jsonl_roundtrip(tmp_path):
    seq = tokenize_latin(latin_doc("A b, c.\nD!"), LATIN)
    path = tmp_path / "t.jsonl"
    seq.write_jsonl(path)
    back = read_jsonl(path, "latin")
    assert pairs(back) == pairs(seq)
    assert [t.char_len for t in back] == [t.char_len for t in seq]
