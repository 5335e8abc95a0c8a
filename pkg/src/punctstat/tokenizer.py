"""Word segmentation and punctuation classification.

Chinese runs are segmented with a unigram maximum-probability dynamic
program over a frequency lexicon (the ``word freq [tag]`` dictionary format
used by common Chinese segmenters). Alphabetic text is split on whitespace
with leading and trailing marks peeled off each word.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .corpus import Document, ScriptClass, is_cjk_scalar
from .errors import (ConfigError, DocumentIOError, EmptyLexiconError, EncodingError, ParseError,
                     PolicyError, ScriptMismatchError)

ELLIPSIS = "…"
THREE_DOTS = "..."
# relative tolerance under which two segmentation scores count as tied
_TIE_EPS = 1e-12


class TokenKind(str, enum.Enum):
    WORD = "word"
    PUNCT = "punct"
    TERMINAL = "terminal"
    NEWLINE = "newline"
    # classifier-only signal for excluded marks; never stored in a sequence
    DROPPED = "dropped"


@dataclass(frozen=True)
class Token:
    surface: str
    kind: TokenKind
    char_len: int

    def to_dict(self) -> dict:
        return {"surface": self.surface, "kind": self.kind.value, "char_len": self.char_len}


@dataclass
class TokenSequence:
    """Ordered tokens of one document.

    ``dropped`` holds ``(position, mark)`` pairs for excluded marks, where
    ``position`` is the number of tokens emitted before the mark. Together
    with the tokens it reconstructs the whitespace-free text.
    """
    tokens: list[Token]
    script: ScriptClass
    source_id: str = ""
    dropped: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def words(self) -> list[Token]:
        return [t for t in self.tokens if t.kind is TokenKind.WORD]

    def reconstruct(self) -> str:
        """Token surfaces with dropped marks re-inserted (whitespace other than newlines is gone)."""
        out = []
        drops = iter(self.dropped)
        pending = next(drops, None)
        for i, tok in enumerate(self.tokens):
            while pending is not None and pending[0] == i:
                out.append(pending[1])
                pending = next(drops, None)
            out.append(tok.surface)
        while pending is not None:
            out.append(pending[1])
            pending = next(drops, None)
        return "".join(out)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(t.to_dict(), ensure_ascii=False) + "\n" for t in self.tokens)

    def write_jsonl(self, path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


def read_jsonl(path, script: ScriptClass | str = ScriptClass.LATIN, source_id: str = "") -> TokenSequence:
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                tokens.append(Token(rec["surface"], TokenKind(rec["kind"]), int(rec["char_len"])))
            except (ValueError, KeyError) as exc:
                raise ParseError(f"bad token record: {exc}", lineno) from exc
    return TokenSequence(tokens, ScriptClass(script), source_id)


# -- punctuation policy --------------------------------------------------------

CJK_TERMINAL = frozenset({"。", "！", "？", ELLIPSIS, "；"})
CJK_NONTERMINAL = frozenset({"，", "、", "："})
LATIN_TERMINAL = frozenset({".", "!", "?", ELLIPSIS, THREE_DOTS})
LATIN_NONTERMINAL = frozenset({",", ";", ":"})

_BRACKETS = set("【】〖〗〔〕［］[]（）(){}｛｝")
_ANGLE_CORNER = set("〈〉《》<>＜＞「」『』﹁﹂﹃﹄«»‹›")
_DASHES = set("-‐‑‒–—―－~～⸺⸻")
_QUOTES = set("\"'“”‘’„‚‟‛＂＇`´")
_DOTS = set("·・•‧")

CJK_EXCLUDED = frozenset(_BRACKETS | _ANGLE_CORNER | _DASHES | _QUOTES | _DOTS)
LATIN_EXCLUDED = frozenset(_BRACKETS | _ANGLE_CORNER | _DASHES | _QUOTES | {"*", "_"})


@dataclass(frozen=True)
class PunctPolicy:
    terminal_set: frozenset
    nonterminal_set: frozenset
    excluded_set: frozenset
    newline_is_terminal: bool = True

    def __post_init__(self):
        object.__setattr__(self, "terminal_set", frozenset(self.terminal_set))
        object.__setattr__(self, "nonterminal_set", frozenset(self.nonterminal_set))
        object.__setattr__(self, "excluded_set", frozenset(self.excluded_set))
        t, n, e = self.terminal_set, self.nonterminal_set, self.excluded_set
        if t & n or t & e or n & e:
            raise PolicyError(f"punctuation sets overlap: {sorted((t & n) | (t & e) | (n & e))}")

    @classmethod
    def cjk(cls, **overrides) -> "PunctPolicy":
        base = dict(terminal_set=CJK_TERMINAL, nonterminal_set=CJK_NONTERMINAL,
                    excluded_set=CJK_EXCLUDED)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def latin(cls, **overrides) -> "PunctPolicy":
        base = dict(terminal_set=LATIN_TERMINAL, nonterminal_set=LATIN_NONTERMINAL,
                    excluded_set=LATIN_EXCLUDED)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def for_script(cls, script: ScriptClass | str, **overrides) -> "PunctPolicy":
        return cls.cjk(**overrides) if ScriptClass(script) is ScriptClass.CJK else cls.latin(**overrides)

    def to_dict(self) -> dict:
        return {
            "terminal_set": sorted(self.terminal_set),
            "nonterminal_set": sorted(self.nonterminal_set),
            "excluded_set": sorted(self.excluded_set),
            "newline_is_terminal": self.newline_is_terminal,
        }

    @classmethod
    def from_dict(cls, data: dict, script: ScriptClass | str) -> "PunctPolicy":
        keys = ("terminal_set", "nonterminal_set", "excluded_set", "newline_is_terminal")
        unknown = set(data) - set(keys)
        if unknown:
            raise PolicyError(f"unknown punctuation policy keys: {sorted(unknown)}")
        return cls.for_script(script, **{k: data[k] for k in keys if k in data})


def classify_scalar(s: str, policy: PunctPolicy) -> TokenKind:
    """Kind of a single scalar or recognised multi-scalar mark such as ``...``."""
    if s == "\n":
        return TokenKind.NEWLINE
    if s in policy.terminal_set:
        return TokenKind.TERMINAL
    if s in policy.nonterminal_set:
        return TokenKind.PUNCT
    if s in policy.excluded_set:
        return TokenKind.DROPPED
    if s and set(s) == {ELLIPSIS} and ELLIPSIS in policy.terminal_set:
        return TokenKind.TERMINAL
    return TokenKind.WORD


# -- lexicon -------------------------------------------------------------------

@dataclass(frozen=True)
class Lexicon:
    entries: dict
    max_word_len: int
    total: int

    @classmethod
    def from_entries(cls, entries: dict) -> "Lexicon":
        if not entries:
            raise EmptyLexiconError("lexicon has no entries")
        for word, freq in entries.items():
            if not word or int(freq) < 1:
                raise ParseError(f"entry {word!r} needs a positive integer frequency")
        return cls(dict(entries), max(len(w) for w in entries), sum(entries.values()))

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def log_prob(self, word: str) -> float | None:
        freq = self.entries.get(word)
        return None if freq is None else math.log(freq) - math.log(self.total)

    @property
    def floor_log_prob(self) -> float:
        # strictly below log(1 / total), the cheapest real entry
        return math.log(0.5) - math.log(self.total)


def parse_lexicon(lines: Iterable[str]) -> Lexicon:
    entries: dict[str, int] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        # word freq [part-of-speech tag]
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'word frequency', got {line!r}", lineno)
        word, freq_s = parts[0], parts[1]
        try:
            freq = int(freq_s)
        except ValueError:
            raise ParseError(f"frequency {freq_s!r} is not an integer", lineno) from None
        if freq < 1:
            raise ParseError(f"frequency must be positive, got {freq}", lineno)
        if freq > entries.get(word, 0):
            entries[word] = freq
    if not entries:
        raise EmptyLexiconError("lexicon has no entries")
    return Lexicon.from_entries(entries)


def load_lexicon(path) -> Lexicon:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DocumentIOError(f"cannot read lexicon {path}: {exc.strerror or exc}") from exc
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"lexicon {path} is not valid UTF-8") from exc
    return parse_lexicon(text.splitlines())


# -- Chinese segmentation --------------------------------------------------------

def segment_run(run: str, lexicon: Lexicon) -> list[str]:
    """Maximum-probability split of a punctuation-free CJK run.

    Scores are sums of log unigram probabilities; scalars not in the lexicon
    may stand alone at the floor probability. Ties prefer fewer words, then
    the earliest boundaries.
    """
    n = len(run)
    if n == 0:
        return []
    floor = lexicon.floor_log_prob
    maxlen = lexicon.max_word_len
    # best[i] = (score, n_words, next boundary) for the suffix run[i:]
    best: list[tuple[float, int, int]] = [(0.0, 0, n)] * (n + 1)
    for i in range(n - 1, -1, -1):
        cand = None
        for j in range(i + 1, min(n, i + maxlen) + 1):
            lp = lexicon.log_prob(run[i:j])
            if lp is None:
                if j != i + 1:
                    continue
                lp = floor
            score = lp + best[j][0]
            nw = 1 + best[j][1]
            if cand is None:
                cand = (score, nw, j)
                continue
            tol = _TIE_EPS * max(1.0, abs(score), abs(cand[0]))
            if score > cand[0] + tol or (abs(score - cand[0]) <= tol and nw < cand[1]):
                cand = (score, nw, j)
        best[i] = cand
    out, i = [], 0
    while i < n:
        j = best[i][2]
        out.append(run[i:j])
        i = j
    return out


def _split_word_material(chunk: str) -> list[tuple[str, bool]]:
    """Split into (piece, is_cjk) runs so that non-CJK stretches stay whole."""
    pieces: list[tuple[str, bool]] = []
    for ch in chunk:
        flag = is_cjk_scalar(ch)
        if pieces and pieces[-1][1] == flag:
            pieces[-1] = (pieces[-1][0] + ch, flag)
        else:
            pieces.append((ch, flag))
    return pieces


def segment_cjk(doc: Document, lexicon: Lexicon, policy: PunctPolicy | None = None) -> TokenSequence:
    if doc.script is not ScriptClass.CJK:
        raise ScriptMismatchError(f"{doc.id}: segment_cjk needs a CJK document, got {doc.script.value}")
    policy = policy or PunctPolicy.cjk()
    seq = TokenSequence([], ScriptClass.CJK, doc.id)
    tokens, dropped = seq.tokens, seq.dropped
    buf: list[str] = []

    def flush():
        if not buf:
            return
        for piece, cjk in _split_word_material("".join(buf)):
            words = segment_run(piece, lexicon) if cjk else [piece]
            tokens.extend(Token(w, TokenKind.WORD, len(w)) for w in words)
        buf.clear()

    prev_ch = ""
    for ch in doc.text:
        kind = classify_scalar(ch, policy)
        if kind is TokenKind.WORD:
            if ch.isspace():
                flush()
            else:
                buf.append(ch)
        else:
            flush()
            if kind is TokenKind.DROPPED:
                dropped.append((len(tokens), ch))
            elif kind is TokenKind.NEWLINE:
                tokens.append(Token("\n", TokenKind.NEWLINE, 1))
            elif ch == ELLIPSIS and prev_ch == ELLIPSIS:
                last = tokens[-1]
                tokens[-1] = Token(last.surface + ch, TokenKind.TERMINAL, last.char_len + 1)
            else:
                tokens.append(Token(ch, kind, 1))
        prev_ch = ch
    flush()
    return seq


# -- alphabetic tokenisation -------------------------------------------------------

def _peel(cluster: str, policy: PunctPolicy) -> list[tuple[str, TokenKind]]:
    """Split a run of edge marks into classified pieces, ``...`` first."""
    out = []
    i = 0
    while i < len(cluster):
        if cluster.startswith(THREE_DOTS, i) and THREE_DOTS in policy.terminal_set:
            out.append((THREE_DOTS, TokenKind.TERMINAL))
            i += 3
            continue
        ch = cluster[i]
        out.append((ch, classify_scalar(ch, policy)))
        i += 1
    return out


def _is_mark(ch: str, policy: PunctPolicy) -> bool:
    return (ch in policy.terminal_set or ch in policy.nonterminal_set
            or ch in policy.excluded_set or (ch == "." and THREE_DOTS in policy.terminal_set))


def tokenize_latin(doc: Document, policy: PunctPolicy | None = None) -> TokenSequence:
    if doc.script is not ScriptClass.LATIN:
        raise ScriptMismatchError(f"{doc.id}: tokenize_latin needs a Latin document, got {doc.script.value}")
    policy = policy or PunctPolicy.latin()
    seq = TokenSequence([], ScriptClass.LATIN, doc.id)
    tokens, dropped = seq.tokens, seq.dropped

    def emit(pieces):
        for surface, kind in pieces:
            if kind is TokenKind.DROPPED:
                dropped.append((len(tokens), surface))
            elif kind is TokenKind.WORD:
                # a lone "." when only "..." is a terminal, or similar leftovers
                tokens.append(Token(surface, TokenKind.WORD, len(surface)))
            else:
                tokens.append(Token(surface, kind, len(surface)))

    for line_no, line in enumerate(doc.text.split("\n")):
        if line_no:
            tokens.append(Token("\n", TokenKind.NEWLINE, 1))
        for chunk in line.split():
            lo, hi = 0, len(chunk)
            while lo < hi and _is_mark(chunk[lo], policy):
                lo += 1
            while hi > lo and _is_mark(chunk[hi - 1], policy):
                hi -= 1
            emit(_peel(chunk[:lo], policy))
            if hi > lo:
                core = chunk[lo:hi]
                tokens.append(Token(core, TokenKind.WORD, len(core)))
            emit(_peel(chunk[hi:], policy))
    return seq


def tokenize(doc: Document, lexicon: Lexicon | None = None, policy: PunctPolicy | None = None) -> TokenSequence:
    """Dispatch on ``doc.script``."""
    if doc.script is ScriptClass.CJK:
        if lexicon is None:
            raise ConfigError(f"{doc.id}: CJK segmentation needs a lexicon")
        return segment_cjk(doc, lexicon, policy)
    return tokenize_latin(doc, policy)
