import json
import shutil

import pytest

from punctstat.errors import ConfigError
from punctstat.pipeline import AnalysisConfig, run_pipeline, validate, write_report
from punctstat.plots import FAMILIES, emit_plots
from punctstat.errors import EmptyInputError


@pytest.fixture
def corpus(tmp_path, fixtures):
    for name in ("synthetic_en.txt", "zh_story.txt", "zh_lexicon.txt", "corpus.json"):
        shutil.copy(fixtures / name, tmp_path / name)
    return tmp_path


def latin_config(corpus, **kw):
    return AnalysisConfig.from_dict({"documents": ["synthetic_en.txt"], "units": ["words"],
                                     "scopes": ["all", "terminal"], **kw}, base_dir=corpus)


def test_fan_out_counts(corpus):
    b = run_pipeline(latin_config(corpus))
    assert len(b.weibull_fits()) == 2 and len(b.mfdfa_results()) == 2 and len(b.rank_tables()) == 1
    assert b.errors == []


def test_missing_lexicon_is_caught_before_analysis(corpus):
    cfg = AnalysisConfig.from_dict({"documents": ["zh_story.txt"]}, base_dir=corpus)
    with pytest.raises(ConfigError, match="lexicon"):
        validate(cfg)
    cfg = AnalysisConfig.from_dict({"documents": ["zh_story.txt"], "lexicon": "nope.txt"}, base_dir=corpus)
    with pytest.raises(ConfigError, match="nope.txt"):
        run_pipeline(cfg)


def test_config_validation(corpus):
    with pytest.raises(ConfigError):
        AnalysisConfig.from_dict({"documents": ["a.txt"], "colour": "blue"})
    with pytest.raises(ConfigError):
        validate(latin_config(corpus, units=["lines"]))
    with pytest.raises(ConfigError):
        validate(latin_config(corpus, mfdfa={"detrend_order": 7}))
    with pytest.raises(ConfigError):
        validate(AnalysisConfig.from_dict({"documents": []}, base_dir=corpus))


def test_config_roundtrip(corpus):
    cfg = AnalysisConfig.load(corpus / "corpus.json")
    again = AnalysisConfig.from_dict(json.loads(cfg.dumps()), base_dir=cfg.base_dir)
    assert again == cfg and again.dumps() == cfg.dumps() and again.sha256() == cfg.sha256()
    cfg2 = latin_config(corpus, mfdfa={"scale_mode": [16, 200]}, zipf={"fit_range": [1, 50]})
    assert AnalysisConfig.from_dict(cfg2.to_dict()) == cfg2


def test_partial_failure_is_recorded(corpus):
    b = run_pipeline(AnalysisConfig.load(corpus / "corpus.json"))
    zh = [e for e in b.errors if e["document"] == "zh_story"]
    # 27 ranks with count >= 2 leave no room for two half-decade segments
    assert [e["stage"] for e in zh].count("crossover") == 1
    short = [e for e in zh if e["stage"] == "mfdfa"]
    assert len(short) == 4 and all(e["error"] == "SeriesTooShortError" for e in short)
    assert b.documents[1].power_law is not None
    doc = b.to_dict()["documents"][1]
    assert all(s["weibull"] is not None and s["mfdfa"] is None for s in doc["series"])


def test_results_carry_series_metadata(corpus):
    d = run_pipeline(latin_config(corpus, drop_largest=1)).to_dict()
    for s in d["documents"][0]["series"]:
        meta = s["series"]
        assert meta["source_id"] == "synthetic_en" and meta["unit"] == s["unit"]
        assert len(meta["outliers_removed"]) == 1
        assert s["weibull"]["n"] == meta["n"] == s["mfdfa"]["n"]


def test_provenance_lists_decisions(corpus):
    prov = run_pipeline(AnalysisConfig.load(corpus / "corpus.json")).to_dict()["provenance"]
    dec = prov["decisions"]
    assert set(dec["punctuation"]) == {"cjk", "latin"}
    assert "。" in dec["punctuation"]["cjk"]["terminal_set"]
    assert dec["mfdfa"]["detrend_order"] == 2 and dec["mfdfa"]["scale_mode"] == "auto"
    assert dec["outlier_policy"] == {"drop_largest": None}
    assert len(prov["config_sha256"]) == 64


def test_deterministic_and_thread_independent(corpus):
    cfg = AnalysisConfig.load(corpus / "corpus.json")
    one = run_pipeline(cfg).to_json()
    assert run_pipeline(cfg).to_json() == one
    cfg.workers = 4
    assert run_pipeline(cfg).to_json() == one


def test_write_report_and_plots(corpus, tmp_path):
    b = run_pipeline(AnalysisConfig.load(corpus / "corpus.json"))
    out = tmp_path / "out"
    written = write_report(b, out)
    assert (out / "report.json").exists() and (out / "synthetic_en" / "rank_table.csv").exists()
    assert (out / "synthetic_en" / "terminal_words" / "fq.csv").exists()
    assert all(p.exists() for p in written)
    svgs = emit_plots(b, out / "plots")
    names = {(p.parent.name, p.name) for p in svgs}
    assert {("synthetic_en", f + ".svg") for f in FAMILIES} <= names
    # too short for MFDFA: no fluctuation or spectrum figure
    assert ("zh_story", "fluctuation.svg") not in names and ("zh_story", "hazard.svg") in names
    csvs = emit_plots(json.loads((out / "report.json").read_text(encoding="utf-8")), out / "csv", "csv")
    assert sorted(p.stem for p in csvs) == sorted(p.stem for p in svgs)
    assert all(p.read_text().startswith("panel,curve,x,y\n") for p in csvs)
    svg = svgs[0].read_text()
    assert svg.startswith("<svg") and "http" not in svg.replace("http://www.w3.org/2000/svg", "")


def test_one_weibull_fit_manifest(corpus, tmp_path):
    cfg = latin_config(corpus, scopes=["all"])
    d = run_pipeline(cfg).to_dict()
    d["documents"][0]["zipf"] = None
    d["documents"][0]["series"][0]["mfdfa"] = None
    files = emit_plots(d, tmp_path)
    assert sorted(p.name for p in files) == ["hazard.svg", "weibull_plot.svg", "weibull_pmf.svg"]


def test_empty_bundle_writes_nothing(tmp_path):
    with pytest.raises(EmptyInputError):
        emit_plots({"documents": []}, tmp_path / "none")
    assert not (tmp_path / "none").exists()
