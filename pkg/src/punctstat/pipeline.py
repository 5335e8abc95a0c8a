"""End-to-end analysis of a set of documents into one JSON report plus CSV sidecars."""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import BACKEND
from .corpus import DEFAULT_CJK_THRESHOLD, Document, ScriptClass, load_document
from .errors import ConfigError, PunctstatError
from .mfdfa import MfdfaResult, default_qs, run_mfdfa
from .series import (DistanceSeries, DistributionTable, Scope, Unit, empirical_distribution,
                     extract_distances, trim_outliers)
from .tokenizer import Lexicon, PunctPolicy, TokenSequence, load_lexicon, tokenize
from .weibull import WeibullFit, fit_discrete_weibull
from .zipf import CrossoverFit, PowerLawFit, RankTable, detect_crossover, fit_power_law, rank_frequency


def _known_keys(cls, data: dict, where: str) -> dict:
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return data


@dataclass
class DocumentSpec:
    path: str
    script: str | None = None
    id: str | None = None


@dataclass
class ZipfOptions:
    include_punct: bool = True
    case_fold: bool = True
    fit_range: object = "auto"
    crossover: bool = True
    min_segment: int = 10


@dataclass
class MfdfaOptions:
    detrend_order: int = 2
    q_min: float = -4.0
    q_max: float = 4.0
    q_step: float = 0.25
    scale_mode: object = "auto"
    s_min: int = 16
    n_scales: int = 24
    min_points: int = 6


@dataclass
class AnalysisConfig:
    documents: list
    lexicon: str | None = None
    punct_policy: dict = field(default_factory=dict)
    units: list = field(default_factory=lambda: ["words", "chars"])
    scopes: list = field(default_factory=lambda: ["all", "terminal"])
    zipf: ZipfOptions = field(default_factory=ZipfOptions)
    weibull_min_n: int = 30
    mfdfa: MfdfaOptions = field(default_factory=MfdfaOptions)
    drop_largest: int | None = None
    cjk_threshold: float = DEFAULT_CJK_THRESHOLD
    output_dir: str = "report"
    workers: int = 1
    # directory that relative paths are resolved against; not serialised
    base_dir: str = field(default=".", repr=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d

    def analysis_dict(self) -> dict:
        """Everything that can change results; ``workers`` only changes scheduling."""
        d = self.to_dict()
        d.pop("workers")
        return d

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "AnalysisConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(_known_keys(cls, data, "config"))
        data.pop("base_dir", None)
        if "documents" not in data:
            raise ConfigError("config needs a 'documents' list")
        docs = []
        for i, d in enumerate(data["documents"]):
            if isinstance(d, str):
                d = {"path": d}
            if not isinstance(d, dict) or "path" not in d:
                raise ConfigError(f"documents[{i}] needs a 'path'")
            docs.append(DocumentSpec(**_known_keys(DocumentSpec, d, f"documents[{i}]")))
        data["documents"] = docs
        data["zipf"] = ZipfOptions(**_known_keys(ZipfOptions, data.get("zipf", {}), "zipf"))
        data["mfdfa"] = MfdfaOptions(**_known_keys(MfdfaOptions, data.get("mfdfa", {}), "mfdfa"))
        return cls(**data, base_dir=str(base_dir))

    @classmethod
    def load(cls, path) -> "AnalysisConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data, base_dir=str(path.parent))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def sha256(self) -> str:
        canon = json.dumps(self.analysis_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def policy_for(self, script: ScriptClass) -> PunctPolicy:
        overrides = self.punct_policy.get(script.value, {})
        try:
            return PunctPolicy.from_dict(overrides, script)
        except PunctstatError as exc:
            raise ConfigError(f"punct_policy.{script.value}: {exc}") from exc

    def qs(self) -> np.ndarray:
        m = self.mfdfa
        return default_qs(m.q_min, m.q_max, m.q_step)


# -- validation -----------------------------------------------------------------------

@dataclass
class Prepared:
    documents: list
    lexicon: Lexicon | None


def validate(config: AnalysisConfig) -> Prepared:
    """Check every path and option before any analysis; load documents and lexicon."""
    if not config.documents:
        raise ConfigError("config lists no documents")
    for u in config.units:
        if u not in {x.value for x in Unit}:
            raise ConfigError(f"unknown unit {u!r} (expected words or chars)")
    for s in config.scopes:
        if s not in {x.value for x in Scope}:
            raise ConfigError(f"unknown scope {s!r} (expected all or terminal)")
    if not config.units or not config.scopes:
        raise ConfigError("need at least one unit and one scope")
    m = config.mfdfa
    if not 1 <= m.detrend_order <= 4:
        raise ConfigError("mfdfa.detrend_order must be 1..4")
    if m.q_step <= 0 or m.q_max < m.q_min:
        raise ConfigError("mfdfa q grid is empty")
    if not (m.scale_mode in ("auto", "two") or
            (isinstance(m.scale_mode, (list, tuple)) and len(m.scale_mode) == 2)):
        raise ConfigError("mfdfa.scale_mode must be 'auto', 'two' or [s_lo, s_hi]")
    zr = config.zipf.fit_range
    if not (zr == "auto" or (isinstance(zr, (list, tuple)) and len(zr) == 2)):
        raise ConfigError("zipf.fit_range must be 'auto' or [R_lo, R_hi]")
    if config.drop_largest is not None and config.drop_largest < 0:
        raise ConfigError("drop_largest must be >= 0")

    missing = [d.path for d in config.documents if not config.resolve(d.path).is_file()]
    if config.lexicon is not None and not config.resolve(config.lexicon).is_file():
        missing.append(config.lexicon)
    if missing:
        raise ConfigError(f"missing input files: {', '.join(missing)}")

    docs, seen = [], set()
    for spec in config.documents:
        if spec.script is not None and spec.script not in {x.value for x in ScriptClass}:
            raise ConfigError(f"{spec.path}: unknown script {spec.script!r}")
        doc = load_document(config.resolve(spec.path), forced_script=spec.script,
                            threshold=config.cjk_threshold, doc_id=spec.id)
        if doc.id in seen:
            if spec.id is not None:
                raise ConfigError(f"duplicate document id {doc.id!r}")
            k = 2
            while f"{doc.id}-{k}" in seen:
                k += 1
            doc = Document(f"{doc.id}-{k}", doc.text, doc.script, doc.source_path, doc.char_count)
        seen.add(doc.id)
        docs.append(doc)
    for script in {d.script for d in docs}:
        config.policy_for(script)

    lexicon = None
    if any(d.script is ScriptClass.CJK for d in docs):
        if config.lexicon is None:
            cjk = [d.id for d in docs if d.script is ScriptClass.CJK]
            raise ConfigError(f"CJK documents {cjk} need a lexicon")
        lexicon = load_lexicon(config.resolve(config.lexicon))
    return Prepared(docs, lexicon)


# -- results ----------------------------------------------------------------------------

@dataclass
class SeriesResult:
    series: DistanceSeries
    distribution: DistributionTable | None = None
    weibull: WeibullFit | None = None
    mfdfa: MfdfaResult | None = None

    def to_dict(self) -> dict:
        v = self.series.values
        out = {
            "unit": self.series.unit.value,
            "scope": self.series.scope.value,
            "label": self.series.label,
            "series": {**self.series.metadata(),
                       "mean": float(v.mean()) if len(v) else None,
                       "max": int(v.max()) if len(v) else None},
            "distribution": self.distribution.to_dict() if self.distribution else None,
            "weibull": self.weibull.to_dict() if self.weibull else None,
            "mfdfa": self.mfdfa.to_dict() if self.mfdfa else None,
        }
        return out


@dataclass
class DocumentResult:
    document: Document
    n_tokens: int = 0
    rank_table: RankTable | None = None
    power_law: PowerLawFit | None = None
    crossover: CrossoverFit | None = None
    series: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def to_dict(self) -> dict:
        zipf = None
        if self.rank_table is not None:
            t = self.rank_table
            zipf = {
                "include_punct": t.include_punct,
                "types": len(t),
                "total_tokens": t.total_tokens,
                "fit": self.power_law.to_dict() if self.power_law else None,
                "crossover": self.crossover.to_dict() if self.crossover else None,
                "probs": t.probs.tolist(),
            }
        return {
            "id": self.document.id,
            "script": self.document.script.value,
            "source_path": self.document.source_path,
            "char_count": self.document.char_count,
            "n_tokens": self.n_tokens,
            "zipf": zipf,
            "series": [s.to_dict() for s in self.series],
        }


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


@dataclass
class ReportBundle:
    config: AnalysisConfig
    documents: list
    errors: list

    def provenance(self) -> dict:
        cfg = self.config
        m = cfg.mfdfa
        scripts = sorted({d.document.script for d in self.documents}, key=lambda s: s.value)
        return {
            "config_sha256": cfg.sha256(),
            "toolkit": {"name": "punctstat", "version": __version__, "backend": BACKEND},
            "decisions": {
                "punctuation": {s.value: cfg.policy_for(s).to_dict() for s in scripts},
                "newline_rule": "a newline closes a gap only when the preceding non-newline token "
                                "is not a terminal mark (applies to both scopes)",
                "zero_gaps": "skipped",
                "leading_text": "text before the first mark counts as a gap",
                "trailing_text": "text after the last mark is dropped (reported as unterminated_tail)",
                "outlier_policy": {"drop_largest": cfg.drop_largest},
                "segmenter": "unigram max-probability DP; out-of-lexicon scalars at log(0.5/total)",
                "zipf": {"estimator": "OLS on log-log", "fit_range": cfg.zipf.fit_range,
                         "auto_range": "ranks 1..last rank with count >= 2",
                         "include_punct": cfg.zipf.include_punct, "case_fold": cfg.zipf.case_fold},
                "weibull": {"estimator": "maximum likelihood: grid p 0.01..0.99, beta 0.2..3.0, "
                                         "then Nelder-Mead", "min_n": cfg.weibull_min_n,
                            "rescaled_plot": "min-max affine map of empirical points onto [0,1]^2"},
                "mfdfa": {"detrend_order": m.detrend_order,
                          "q_grid": [m.q_min, m.q_max, m.q_step],
                          "scales": f"{m.n_scales} log-spaced integers from {m.s_min} to T/4",
                          "scale_mode": m.scale_mode,
                          "auto_selection": "contiguous window (>= %d scales) with the smallest mean "
                                            "squared residual of log F_2 vs log s" % m.min_points,
                          "profile": "cumulative sum of the mean-centred series",
                          "q0": "exp(mean(ln f2) / 2)",
                          "width_labels": {"monofractal": "<= 0.1", "multifractal": ">= 0.2"}},
            },
        }

    def to_dict(self) -> dict:
        return _clean({
            "provenance": self.provenance(),
            "config": self.config.analysis_dict(),
            "documents": [d.to_dict() for d in self.documents],
            "errors": self.errors,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, ensure_ascii=False,
                          allow_nan=False) + "\n"

    def weibull_fits(self) -> list:
        return [s.weibull for d in self.documents for s in d.series if s.weibull is not None]

    def mfdfa_results(self) -> list:
        return [s.mfdfa for d in self.documents for s in d.series if s.mfdfa is not None]

    def rank_tables(self) -> list:
        return [d.rank_table for d in self.documents if d.rank_table is not None]


def _error(doc_id, stage, exc, unit=None, scope=None) -> dict:
    rec = {"document": doc_id, "stage": stage, "error": type(exc).__name__, "message": str(exc)}
    if unit is not None:
        rec.update(unit=unit, scope=scope)
    return rec


def analyze_document(doc: Document, config: AnalysisConfig, lexicon: Lexicon | None) -> DocumentResult:
    res = DocumentResult(doc)
    try:
        tokens: TokenSequence = tokenize(doc, lexicon, config.policy_for(doc.script))
    except PunctstatError as exc:
        res.errors.append(_error(doc.id, "tokenize", exc))
        return res
    res.n_tokens = len(tokens)
    z = config.zipf
    try:
        res.rank_table = rank_frequency(tokens, z.include_punct, z.case_fold)
        res.power_law = fit_power_law(res.rank_table, z.fit_range)
    except PunctstatError as exc:
        res.errors.append(_error(doc.id, "zipf", exc))
    if z.crossover and res.rank_table is not None:
        try:
            res.crossover = detect_crossover(res.rank_table, z.min_segment)
        except PunctstatError as exc:
            res.errors.append(_error(doc.id, "crossover", exc))

    newline_terminal = config.policy_for(doc.script).newline_is_terminal
    m = config.mfdfa
    scale_mode = m.scale_mode if isinstance(m.scale_mode, str) else tuple(m.scale_mode)
    for unit in config.units:
        for scope in config.scopes:
            stage = "series"
            try:
                series = extract_distances(tokens, unit, scope, newline_terminal)
                series = trim_outliers(series, config.drop_largest)
            except PunctstatError as exc:
                res.errors.append(_error(doc.id, stage, exc, unit, scope))
                continue
            sr = SeriesResult(series)
            res.series.append(sr)
            try:
                stage = "distribution"
                sr.distribution = empirical_distribution(series)
                stage = "weibull"
                sr.weibull = fit_discrete_weibull(series, config.weibull_min_n)
            except PunctstatError as exc:
                res.errors.append(_error(doc.id, stage, exc, unit, scope))
            try:
                sr.mfdfa = run_mfdfa(series, order=m.detrend_order, qs=config.qs(),
                                     scale_mode=scale_mode, s_min=m.s_min, n_scales=m.n_scales,
                                     min_points=m.min_points)
            except PunctstatError as exc:
                res.errors.append(_error(doc.id, "mfdfa", exc, unit, scope))
    return res


def run_pipeline(config: AnalysisConfig, prepared: Prepared | None = None) -> ReportBundle:
    prepared = prepared or validate(config)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda d: analyze_document(d, config, prepared.lexicon),
                                    prepared.documents))
    else:
        results = [analyze_document(d, config, prepared.lexicon) for d in prepared.documents]
    errors = [e for r in results for e in r.errors]
    return ReportBundle(config, results, errors)


def write_report(bundle: ReportBundle, out_dir) -> list[Path]:
    """``report.json`` plus per-document CSV sidecars; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    report = out / "report.json"
    report.write_text(bundle.to_json(), encoding="utf-8")
    written.append(report)
    for doc in bundle.documents:
        ddir = out / doc.document.id
        ddir.mkdir(exist_ok=True)
        if doc.rank_table is not None:
            p = ddir / "rank_table.csv"
            p.write_text(doc.rank_table.to_csv(), encoding="utf-8")
            written.append(p)
        for sr in doc.series:
            sdir = ddir / sr.series.label
            sdir.mkdir(exist_ok=True)
            written.extend(sr.series.write(sdir / "series.csv"))
            if sr.mfdfa is not None:
                p = sdir / "fq.csv"
                p.write_text(sr.mfdfa.matrix.to_csv(), encoding="utf-8")
                written.append(p)
                for i, rr in enumerate(sr.mfdfa.ranges):
                    for name, text in (("hq", rr.hq.to_csv()), ("spectrum", rr.spectrum.to_csv())):
                        p = sdir / f"{name}_{i}.csv"
                        p.write_text(text, encoding="utf-8")
                        written.append(p)
    return written
