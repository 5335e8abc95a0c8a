"""Loading and normalising raw text files."""
from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .errors import DocumentIOError, EmptyDocumentError, EncodingError

DEFAULT_CJK_THRESHOLD = 0.5


class ScriptClass(str, enum.Enum):
    CJK = "cjk"
    LATIN = "latin"


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    script: ScriptClass
    source_path: str
    char_count: int


def is_cjk_scalar(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x4E00 <= cp <= 0x9FFF
        or 0x3400 <= cp <= 0x4DBF
        or 0xF900 <= cp <= 0xFAFF
        or 0x20000 <= cp <= 0x3134F
    )


def cjk_fraction(text: str) -> float:
    """Fraction of CJK ideographs among non-space, non-punctuation scalars."""
    cjk = total = 0
    for ch in text:
        if ch.isspace() or unicodedata.category(ch)[0] == "P":
            continue
        total += 1
        if is_cjk_scalar(ch):
            cjk += 1
    return cjk / total if total else 0.0


def detect_script(text: str, threshold: float = DEFAULT_CJK_THRESHOLD) -> ScriptClass:
    return ScriptClass.CJK if cjk_fraction(text) > threshold else ScriptClass.LATIN


def normalize_text(text: str) -> str:
    """Canonical newlines, no BOM, NFC, control characters other than \\n and \\t removed.

    Idempotent: ``normalize_text(normalize_text(t)) == normalize_text(t)``.
    """
    text = text.replace("\r\n", "\n").replace("\r", "\n").replace("\ufeff", "")
    # controls go before NFC so their removal cannot expose a composable pair
    text = "".join(
        ch for ch in text
        if ch in "\n\t" or unicodedata.category(ch) != "Cc"
    )
    return unicodedata.normalize("NFC", text)


def make_document(text: str, doc_id: str = "document", forced_script: ScriptClass | str | None = None,
                  source_path: str = "", threshold: float = DEFAULT_CJK_THRESHOLD) -> Document:
    text = normalize_text(text)
    if not text.strip():
        raise EmptyDocumentError(f"{doc_id}: document has no non-whitespace content")
    if forced_script is not None:
        script = ScriptClass(forced_script)
    else:
        script = detect_script(text, threshold)
    return Document(id=doc_id, text=text, script=script,
                    source_path=source_path, char_count=len(text))


def load_document(path, forced_script: ScriptClass | str | None = None,
                  threshold: float = DEFAULT_CJK_THRESHOLD, doc_id: str | None = None) -> Document:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DocumentIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path} is not valid UTF-8 (byte {exc.start})") from exc
    return make_document(text, doc_id=doc_id or path.stem, forced_script=forced_script,
                         source_path=str(path), threshold=threshold)
