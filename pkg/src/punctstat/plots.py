"""Figure families rendered from a report: SVG images or the plotted points as CSV."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .errors import EmptyInputError
from .svg import PALETTE, Panel, render_svg
from .weibull import WeibullParams, hazard, pmf

FAMILIES = ("rank_frequency", "weibull_pmf", "hazard", "weibull_plot", "fluctuation", "spectrum")
FLUCTUATION_QS = (-4.0, -2.0, 0.0, 2.0, 4.0)


def _color(i: int) -> str:
    return PALETTE[i % len(PALETTE)]


def _fitted(s: dict):
    w = s.get("weibull")
    return WeibullParams(w["p"], w["beta"]) if w else None


def rank_frequency_panels(doc: dict) -> list[Panel]:
    z = doc.get("zipf")
    if not z or not z.get("probs"):
        return []
    probs = np.asarray(z["probs"], dtype=float)
    ranks = np.arange(1, len(probs) + 1)
    punct = "with" if z["include_punct"] else "without"
    p = Panel(f"{doc['id']}: rank-frequency ({punct} punctuation)", "rank R", "P(R)", xlog=True, ylog=True)
    p.points(ranks, probs, "#555555", "empirical")
    fit = z.get("fit")
    if fit:
        lo, hi = fit["fit_range"]
        r = np.array([lo, hi], dtype=float)
        p.line(r, np.exp(fit["intercept"]) * r ** -fit["gamma"], _color(1), f"gamma={fit['gamma']:.3f}")
    cross = z.get("crossover")
    if cross:
        for i, key in enumerate(("fit_low", "fit_high")):
            seg = cross[key]
            r = np.array(seg["fit_range"], dtype=float)
            p.line(r, np.exp(seg["intercept"]) * r ** -seg["gamma"], _color(2 + i),
                   f"gamma={seg['gamma']:.3f}", dashed=True)
        p.vline(cross["breakpoint"])
    return [p]


def weibull_pmf_panels(doc: dict) -> list[Panel]:
    panels = []
    for s in doc["series"]:
        dist, params = s.get("distribution"), _fitted(s)
        if not dist or params is None:
            continue
        p = Panel(f"{doc['id']}: {s['label']}", s["unit"], "P(k)")
        p.points(dist["support"], dist["pmf"], "#555555", "empirical")
        k = np.arange(1, max(dist["support"]) + 1)
        p.line(k, pmf(k, params), _color(1), f"p={params.p:.3f} beta={params.beta:.3f}")
        panels.append(p)
    return panels


def hazard_panels(doc: dict) -> list[Panel]:
    p = Panel(f"{doc['id']}: hazard", "k", "h(k)")
    for i, s in enumerate(doc["series"]):
        params, dist = _fitted(s), s.get("distribution")
        if params is None or not dist:
            continue
        k = np.arange(1, max(dist["support"]) + 1)
        p.line(k, hazard(k, params), _color(i), s["label"])
    return [p] if p.layers else []


def weibull_plot_panels(doc: dict) -> list[Panel]:
    p = Panel(f"{doc['id']}: rescaled Weibull plot", "rescaled log k", "rescaled log(-log(1-F))")
    for i, s in enumerate(doc["series"]):
        params, dist = _fitted(s), s.get("distribution")
        if params is None or not dist:
            continue
        counts = np.asarray(dist["counts"])
        n = counts.sum()
        tail = (n - np.cumsum(counts)) / n
        keep = tail > 0
        if keep.sum() < 2:
            continue
        x = np.log(np.asarray(dist["support"], dtype=float)[keep])
        y = np.log(-np.log(tail[keep]))
        x0, xs, y0, ys = x.min(), np.ptp(x), y.min(), np.ptp(y)
        if xs == 0 or ys == 0:
            continue
        fy = params.beta * x + np.log(-np.log1p(-params.p))
        p.points((x - x0) / xs, (y - y0) / ys, _color(i), f"{s['label']} empirical")
        p.line((x - x0) / xs, (fy - y0) / ys, _color(i), f"{s['label']} beta={params.beta:.3f}")
    return [p] if p.layers else []


def fluctuation_panels(doc: dict) -> list[Panel]:
    panels = []
    for s in doc["series"]:
        m = s.get("mfdfa")
        if not m:
            continue
        p = Panel(f"{doc['id']}: {s['label']} F_q(s)", "s", "F_q(s)", xlog=True, ylog=True)
        qs = np.asarray(m["qs"])
        fq = np.asarray(m["Fq"], dtype=float)
        for i, q in enumerate(FLUCTUATION_QS):
            hit = np.nonzero(np.isclose(qs, q))[0]
            if len(hit):
                p.line(m["scales"], fq[hit[0]], _color(i), f"q={q:g}")
        for r in m["ranges"]:
            p.vline(r["s_lo"])
            p.vline(r["s_hi"])
        panels.append(p)
    return panels


def spectrum_panels(doc: dict) -> list[Panel]:
    p = Panel(f"{doc['id']}: singularity spectrum", "alpha", "f(alpha)")
    i = 0
    for s in doc["series"]:
        m = s.get("mfdfa")
        if not m:
            continue
        for j, r in enumerate(m["ranges"]):
            a, f = np.asarray(r["alpha"], dtype=float), np.asarray(r["f"], dtype=float)
            bad = np.asarray(r["nonphysical"], dtype=bool)
            tag = s["label"] if len(m["ranges"]) == 1 else f"{s['label']} range {j + 1}"
            p.line(a[~bad], f[~bad], _color(i), f"{tag} d_alpha={r['delta_alpha']:.3f}")
            if bad.any():
                p.points(a[bad], f[bad], "#999999", f"{tag} non-physical")
            i += 1
    return [p] if p.layers else []


BUILDERS = {
    "rank_frequency": rank_frequency_panels,
    "weibull_pmf": weibull_pmf_panels,
    "hazard": hazard_panels,
    "weibull_plot": weibull_plot_panels,
    "fluctuation": fluctuation_panels,
    "spectrum": spectrum_panels,
}


def panels_to_csv(panels: list[Panel]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["panel", "curve", "x", "y"])
    for p in panels:
        for layer in p.layers:
            name = layer.label or layer.kind
            w.writerows((p.title, name, repr(float(a)), repr(float(b))) for a, b in zip(layer.x, layer.y))
    return buf.getvalue()


def emit_plots(bundle, out_dir, fmt: str = "svg") -> list[Path]:
    """Write one file per figure family per document; returns the paths written.

    ``bundle`` is a ReportBundle or the dict form read back from report.json.
    Families with nothing to show (for instance MFDFA on a too-short series)
    are skipped.
    """
    if fmt not in ("svg", "csv"):
        raise ValueError(f"unknown plot format {fmt!r}")
    report = bundle if isinstance(bundle, dict) else bundle.to_dict()
    docs = report.get("documents") or []
    rendered = []
    for doc in docs:
        for family in FAMILIES:
            panels = BUILDERS[family](doc)
            if panels:
                text = render_svg(panels) if fmt == "svg" else panels_to_csv(panels)
                rendered.append((doc["id"], family, text))
    if not rendered:
        raise EmptyInputError("report holds no results to plot")
    out = Path(out_dir)
    written = []
    for doc_id, family, text in rendered:
        ddir = out / doc_id
        ddir.mkdir(parents=True, exist_ok=True)
        path = ddir / f"{family}.{fmt}"
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
