"""Distance series between punctuation marks and their empirical distributions."""
from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import NoBoundariesError, ParseError, PolicyError, EmptyInputError
from .tokenizer import TokenKind, TokenSequence


class Unit(str, enum.Enum):
    WORDS = "words"
    CHARACTERS = "chars"


class Scope(str, enum.Enum):
    ALL_PUNCT = "all"
    TERMINAL_ONLY = "terminal"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DistanceSeries:
    values: np.ndarray
    unit: Unit
    scope: Scope
    source_id: str = ""
    outliers_removed: tuple = ()
    # words/chars after the last boundary; not part of ``values``
    unterminated_tail: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "unit", Unit(self.unit))
        object.__setattr__(self, "scope", Scope(self.scope))
        object.__setattr__(self, "outliers_removed", tuple(tuple(o) for o in self.outliers_removed))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def label(self) -> str:
        return f"{self.scope.value}_{self.unit.value}"

    def metadata(self) -> dict:
        return {
            "source_id": self.source_id,
            "unit": self.unit.value,
            "scope": self.scope.value,
            "n": int(len(self.values)),
            "outliers_removed": [[int(i), int(v)] for i, v in self.outliers_removed],
            "unterminated_tail": int(self.unterminated_tail),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "value"])
        w.writerows((i, int(v)) for i, v in enumerate(self.values))
        return buf.getvalue()

    def write(self, csv_path) -> tuple[Path, Path]:
        """Write ``<name>.csv`` plus a ``<name>.json`` metadata sidecar."""
        csv_path = Path(csv_path)
        csv_path.write_text(self.to_csv(), encoding="utf-8")
        side = csv_path.with_suffix(".json")
        side.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return csv_path, side


def read_series(csv_path, unit: Unit | str | None = None, scope: Scope | str | None = None) -> DistanceSeries:
    """Read a series CSV; metadata comes from the JSON sidecar when present."""
    csv_path = Path(csv_path)
    meta = {}
    side = csv_path.with_suffix(".json")
    if side.exists():
        meta = json.loads(side.read_text(encoding="utf-8"))
    values = []
    with open(csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{csv_path} is empty")
        col = header.index("value") if "value" in header else len(header) - 1
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                values.append(int(row[col]))
            except (ValueError, IndexError):
                raise ParseError(f"{csv_path}: bad value {row!r}", lineno) from None
    return DistanceSeries(
        values,
        unit=unit or meta.get("unit", Unit.WORDS),
        scope=scope or meta.get("scope", Scope.ALL_PUNCT),
        source_id=meta.get("source_id", csv_path.stem),
        outliers_removed=meta.get("outliers_removed", ()),
        unterminated_tail=meta.get("unterminated_tail", 0),
    )


def boundary_mask(tokens: TokenSequence, scope: Scope | str, newline_is_terminal: bool = True) -> list[bool]:
    """Per-token flag: does this token close a gap?

    A newline is a boundary only when the last non-newline token before it is
    not a terminal mark, i.e. it ends an otherwise unterminated run. The same
    newlines count for the all-punctuation scope so that every sentence splits
    exactly into inter-punctuation gaps.
    """
    scope = Scope(scope)
    marks = (TokenKind.TERMINAL,) if scope is Scope.TERMINAL_ONLY else (TokenKind.TERMINAL, TokenKind.PUNCT)
    out = []
    last = None
    for tok in tokens:
        kind = tok.kind
        if kind is TokenKind.NEWLINE:
            out.append(newline_is_terminal and last is not None and last is not TokenKind.TERMINAL)
            continue
        out.append(kind in marks)
        last = kind
    return out


def extract_distances(tokens: TokenSequence, unit: Unit | str = Unit.WORDS,
                      scope: Scope | str = Scope.ALL_PUNCT, newline_is_terminal: bool = True) -> DistanceSeries:
    unit, scope = Unit(unit), Scope(scope)
    if len(tokens) == 0:
        raise EmptyInputError("token sequence is empty")
    mask = boundary_mask(tokens, scope, newline_is_terminal)
    if not any(mask):
        raise NoBoundariesError(f"{tokens.source_id}: no {scope.value} boundary in the token stream")
    values = []
    acc = 0
    for tok, is_boundary in zip(tokens, mask):
        if is_boundary:
            if acc:
                values.append(acc)
            acc = 0
        elif tok.kind is TokenKind.WORD:
            acc += 1 if unit is Unit.WORDS else tok.char_len
    return DistanceSeries(values, unit, scope, source_id=tokens.source_id, unterminated_tail=acc)


def trim_outliers(series: DistanceSeries, drop_largest: int | None = None) -> DistanceSeries:
    """Remove the ``drop_largest`` largest values; ties go to the first occurrence."""
    if not drop_largest:
        return series
    m = int(drop_largest)
    n = len(series.values)
    if m < 0 or m >= n:
        raise PolicyError(f"cannot drop {m} of {n} values")
    order = np.argsort(-series.values, kind="stable")[:m]
    keep = np.ones(n, dtype=bool)
    keep[order] = False
    removed = series.outliers_removed + tuple((int(i), int(series.values[i])) for i in order)
    return replace(series, values=series.values[keep], outliers_removed=removed)


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """Empirical PMF/CMF over the observed support.

    ``pmf`` is defined as successive differences of ``cmf`` so the two agree
    bit-for-bit; ``sf`` is the tail fraction computed from integer counts,
    which keeps ``1 - F`` accurate far into the tail.
    """
    support: np.ndarray
    counts: np.ndarray
    pmf: np.ndarray
    cmf: np.ndarray
    sf: np.ndarray
    n: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "support": self.support.tolist(),
            "counts": self.counts.tolist(),
            "pmf": self.pmf.tolist(),
            "cmf": self.cmf.tolist(),
        }


def empirical_distribution(series: DistanceSeries | np.ndarray) -> DistributionTable:
    values = series.values if isinstance(series, DistanceSeries) else np.asarray(series, dtype=np.int64)
    if len(values) == 0:
        raise EmptyInputError("cannot build a distribution from an empty series")
    support, counts = np.unique(values, return_counts=True)
    n = int(counts.sum())
    cum = np.cumsum(counts)
    cmf = cum / n
    pmf = np.diff(cmf, prepend=0.0)
    sf = (n - cum) / n
    return DistributionTable(support.astype(np.int64), counts.astype(np.int64), pmf, cmf, sf, n)
