"""Rank-frequency tables and log-log power-law fits."""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ._linfit import LineFit, fit_line
from .errors import EmptyInputError, RangeTooSmallError
from .tokenizer import TokenKind, TokenSequence

MIN_FIT_RANKS = 10


@dataclass(frozen=True, eq=False)
class RankTable:
    tokens: tuple
    counts: np.ndarray
    probs: np.ndarray
    include_punct: bool
    total_tokens: int

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, len(self.tokens) + 1)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def entries(self):
        return [(int(r), t, int(c), float(p))
                for r, t, c, p in zip(self.ranks, self.tokens, self.counts, self.probs)]

    @classmethod
    def from_counts(cls, items, include_punct: bool = False) -> "RankTable":
        """Build from ``(token, count)`` pairs already in first-occurrence order."""
        items = list(items)
        if not items:
            raise EmptyInputError("no countable tokens")
        order = sorted(range(len(items)), key=lambda i: -items[i][1])  # stable: ties keep input order
        toks = tuple(items[i][0] for i in order)
        counts = np.array([items[i][1] for i in order], dtype=np.int64)
        total = int(counts.sum())
        return cls(toks, counts, counts / total, include_punct, total)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "token", "count", "prob"])
        w.writerows((r, t, c, repr(p)) for r, t, c, p in self.entries)
        return buf.getvalue()


def rank_frequency(tokens: TokenSequence, include_punct: bool = False, case_fold: bool = True) -> RankTable:
    counter: Counter = Counter()
    for tok in tokens:
        if tok.kind is TokenKind.WORD:
            counter[tok.surface.casefold() if case_fold else tok.surface] += 1
        elif include_punct and tok.kind in (TokenKind.PUNCT, TokenKind.TERMINAL):
            counter[tok.surface] += 1
    # Counter preserves insertion order, i.e. first occurrence
    return RankTable.from_counts(counter.items(), include_punct)


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    intercept: float
    r_squared: float
    fit_range: tuple
    stderr: float = float("nan")

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "intercept": self.intercept, "r_squared": self.r_squared,
                "fit_range": list(self.fit_range), "stderr": self.stderr}


def auto_range(table: RankTable) -> tuple[int, int]:
    """Ranks 1 .. last rank with count >= 2 (drops the hapax plateau)."""
    multi = np.nonzero(table.counts >= 2)[0]
    hi = int(multi[-1]) + 1 if len(multi) else 1
    return 1, hi


def _loglog(table: RankTable, lo: int, hi: int):
    r = np.arange(lo, hi + 1, dtype=np.float64)
    return np.log(r), np.log(table.probs[lo - 1:hi])


def _as_powerlaw(line: LineFit, lo: int, hi: int) -> PowerLawFit:
    return PowerLawFit(-line.slope, line.intercept, line.r_squared, (lo, hi), line.slope_stderr)


def fit_power_law(table: RankTable, fit_range: tuple[int, int] | str | None = "auto") -> PowerLawFit:
    """OLS of log P(R) on log R over the inclusive rank range."""
    if fit_range is None or fit_range == "auto":
        lo, hi = auto_range(table)
    else:
        lo, hi = int(fit_range[0]), int(fit_range[1])
    if lo < 1 or hi > len(table) or hi - lo + 1 < MIN_FIT_RANKS:
        raise RangeTooSmallError(
            f"rank range ({lo}, {hi}) needs >= {MIN_FIT_RANKS} ranks within 1..{len(table)}")
    x, y = _loglog(table, lo, hi)
    return _as_powerlaw(fit_line(x, y), lo, hi)


@dataclass(frozen=True)
class CrossoverFit:
    breakpoint: int
    fit_low: PowerLawFit
    fit_high: PowerLawFit
    ssr_two: float
    ssr_single: float
    # share of the single-line residual removed by the break; 0 when the
    # single line is already exact to rounding
    improvement: float

    def to_dict(self) -> dict:
        return {"breakpoint": self.breakpoint, "fit_low": self.fit_low.to_dict(),
                "fit_high": self.fit_high.to_dict(), "ssr_two": self.ssr_two,
                "ssr_single": self.ssr_single, "improvement": self.improvement}


def log_rank_grid(lo: int, hi: int, per_decade: int = 50) -> np.ndarray:
    """Distinct integer ranks on a log-spaced grid covering [lo, hi]."""
    a, b = np.log10(lo), np.log10(hi)
    exps = np.arange(np.ceil(a * per_decade), np.floor(b * per_decade) + 1) / per_decade
    return np.unique(np.clip(np.rint(10.0 ** exps).astype(np.int64), lo, hi))


def detect_crossover(table: RankTable, min_segment: int = 10, per_decade: int = 50,
                     min_decades: float = 0.5) -> CrossoverFit:
    """Two-regime fit: low segment ranks 1..b, high segment b+1..R_hi.

    Candidate breakpoints come from a log-spaced rank grid; each segment
    holds at least ``min_segment`` ranks and spans at least ``min_decades``
    in log10 rank, so a segment cannot collapse onto one flat plateau of
    equal low counts. Returns the candidate with the smallest total squared
    residual.
    """
    _, hi = auto_range(table)
    if hi < 2 * min_segment:
        raise RangeTooSmallError(
            f"crossover search needs >= {2 * min_segment} ranks with count >= 2, got {hi}")
    x, y = _loglog(table, 1, hi)
    cands = log_rank_grid(min_segment, hi - min_segment, per_decade)
    span_ok = (np.log10(cands) >= min_decades) & (np.log10(hi / (cands + 1.0)) >= min_decades)
    cands = cands[span_ok]
    if not len(cands):
        raise RangeTooSmallError(
            f"no breakpoint leaves {min_decades} decades on each side within ranks 1..{hi}")
    best_b, best_ssr = None, np.inf
    for b in cands:
        ssr = fit_line(x[:b], y[:b]).ssr + fit_line(x[b:], y[b:]).ssr
        if ssr < best_ssr:
            best_b, best_ssr = int(b), ssr
    single = fit_line(x, y)
    low = _as_powerlaw(fit_line(x[:best_b], y[:best_b]), 1, best_b)
    high = _as_powerlaw(fit_line(x[best_b:], y[best_b:]), best_b + 1, hi)
    sst = float(np.sum((y - y.mean()) ** 2))
    ssr_two = max(float(best_ssr), 0.0)
    if single.ssr <= 1e-12 * sst:
        improvement = 0.0
    else:
        improvement = (single.ssr - ssr_two) / single.ssr
    return CrossoverFit(best_b, low, high, ssr_two, single.ssr, improvement)
