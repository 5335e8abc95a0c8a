"""Synthetic signals and texts with known statistics.

These generators back the test oracles and the bundled fixture corpus; they
share no code with the estimators they are used to check.
"""
from __future__ import annotations

import numpy as np

from .weibull import WeibullParams, sample as sample_dweibull


def fgn(hurst: float, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit-variance fractional Gaussian noise by circulant embedding (Davies-Harte)."""
    if not 0.0 < hurst < 1.0:
        raise ValueError("hurst must lie in (0, 1)")
    rng = rng or np.random.default_rng()
    k = np.arange(n + 1, dtype=np.float64)
    h2 = 2.0 * hurst
    acov = 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k ** h2 + np.abs(k - 1) ** h2)
    row = np.concatenate([acov, acov[-2:0:-1]])
    lam = np.fft.fft(row).real
    if lam.min() < -1e-8 * lam.max():
        raise ValueError("circulant embedding is not positive semi-definite")
    lam = np.clip(lam, 0.0, None)
    m = len(row)
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return np.fft.fft(np.sqrt(lam / m) * z).real[:n]


def binomial_cascade(levels: int, a: float) -> np.ndarray:
    """Deterministic binomial multiplicative cascade of length ``2**levels``.

    Entry i carries weight ``a`` for every 0 bit and ``1 - a`` for every 1 bit
    of its binary index.
    """
    idx = np.arange(2 ** levels, dtype=np.uint64)
    ones = np.zeros(len(idx), dtype=np.int64)
    for b in range(levels):
        ones += ((idx >> np.uint64(b)) & np.uint64(1)).astype(np.int64)
    return a ** (levels - ones) * (1.0 - a) ** ones


def cascade_hurst(q, a: float):
    """Generalised Hurst exponent of the binomial cascade (limit taken at q = 0)."""
    q = np.asarray(q, dtype=np.float64)
    tau = -np.log2(a ** q + (1.0 - a) ** q)
    with np.errstate(invalid="ignore", divide="ignore"):
        h = (tau + 1.0) / q
    # d tau / dq at 0 gives the limit of (tau(q) + 1) / q
    h0 = -0.5 * (np.log(a) + np.log(1.0 - a)) / np.log(2.0)
    return np.where(q == 0.0, h0, h)


def cascade_alpha(q, a: float):
    """Singularity strength alpha(q) = d tau / dq for the binomial cascade."""
    q = np.asarray(q, dtype=np.float64)
    wa, wb = a ** q, (1.0 - a) ** q
    return -(wa * np.log(a) + wb * np.log(1.0 - a)) / ((wa + wb) * np.log(2.0))


def zipf_counts(n_tokens: int, n_types: int, gamma: float = 1.0,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Multinomial counts for ``n_types`` types with P(R) proportional to R**-gamma."""
    rng = rng or np.random.default_rng()
    p = np.arange(1, n_types + 1, dtype=np.float64) ** -gamma
    return rng.multinomial(n_tokens, p / p.sum())


_SYLLABLES = ["ka", "lo", "mi", "ne", "su", "ta", "ri", "po", "de", "va", "shi", "ru", "en", "to", "la"]


def pseudo_vocabulary(n: int, rng: np.random.Generator) -> list[str]:
    seen, words = set(), []
    while len(words) < n:
        k = int(rng.integers(1, 4))
        w = "".join(rng.choice(_SYLLABLES, size=k))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def synthetic_text(n_gaps: int, params: WeibullParams, terminal_share: float = 0.35,
                   n_types: int = 2000, seed: int = 0) -> str:
    """Alphabetic text whose inter-punctuation gaps (in words) follow ``params``.

    Words are drawn from a Zipfian pseudo-vocabulary; each gap ends with a
    comma or, with probability ``terminal_share``, a period. Every 8-20
    sentences start a new paragraph.
    """
    rng = np.random.default_rng(seed)
    vocab = pseudo_vocabulary(n_types, rng)
    probs = 1.0 / np.arange(1, n_types + 1)
    probs /= probs.sum()
    gaps = sample_dweibull(params, n_gaps, rng)
    lines, line = [], []
    sentences_left = int(rng.integers(8, 21))
    start = True
    for g in gaps:
        words = [vocab[i] for i in rng.choice(n_types, size=int(g), p=probs)]
        if start:
            words[0] = words[0].capitalize()
        terminal = rng.random() < terminal_share
        line.append(" ".join(words) + ("." if terminal else ","))
        start = terminal
        if terminal:
            sentences_left -= 1
            if sentences_left == 0:
                lines.append(" ".join(line))
                line = []
                sentences_left = int(rng.integers(8, 21))
    if line:
        text = " ".join(line)
        lines.append(text[:-1] + "." if text.endswith(",") else text)
    return "\n".join(lines) + "\n"
