"""Statistics of punctuation spacing in written text.

Turns documents into inter-punctuation distance series, then fits discrete
Weibull laws, rank-frequency power laws and multifractal spectra to them.
"""
__version__ = "0.1.0"

from ._accel import BACKEND
from .corpus import Document, ScriptClass, detect_script, load_document, make_document
from .errors import AnalysisError, PunctstatError, ValidationError
from .mfdfa import MfdfaResult, estimate_hq, fluctuation_matrix, run_mfdfa, singularity_spectrum
from .series import (DistanceSeries, DistributionTable, Scope, Unit, empirical_distribution,
                     extract_distances, trim_outliers)
from .tokenizer import Lexicon, PunctPolicy, TokenSequence, load_lexicon, tokenize
from .weibull import WeibullFit, WeibullParams, dweibull_eval, fit_discrete_weibull, weibull_plot
from .zipf import RankTable, detect_crossover, fit_power_law, rank_frequency

__all__ = [
    "__version__", "BACKEND",
    "Document", "ScriptClass", "detect_script", "load_document", "make_document",
    "AnalysisError", "PunctstatError", "ValidationError",
    "MfdfaResult", "estimate_hq", "fluctuation_matrix", "run_mfdfa", "singularity_spectrum",
    "DistanceSeries", "DistributionTable", "Scope", "Unit", "empirical_distribution",
    "extract_distances", "trim_outliers",
    "Lexicon", "PunctPolicy", "TokenSequence", "load_lexicon", "tokenize",
    "WeibullFit", "WeibullParams", "dweibull_eval", "fit_discrete_weibull", "weibull_plot",
    "RankTable", "detect_crossover", "fit_power_law", "rank_frequency",
]
