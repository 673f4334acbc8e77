"""Realized volatility measures and HAR/MEM models backed by the rvkit C++ core."""

import json as _json

from . import _rvkit
from ._rvkit import (
    MAX_HORIZON,
    MIN_ESTIMATION_OBS,
    PARZEN_C_STAR,
    Api,
    Config,
    InsufficientDataError,
    IntegrityError,
    NumericalError,
    ParseError,
    annualize,
    bipower_variation,
    clean_symbol,
    compute_measures,
    covariance_names,
    ingest_files,
    measure_names,
    newey_west_lags,
    read_parquet,
    realized_quarticity,
    realized_variance,
    return_measures,
    simulate_har,
    simulate_mem,
    write_corpus,
    write_parquet,
)

__all__ = [
    "MAX_HORIZON", "MIN_ESTIMATION_OBS", "PARZEN_C_STAR", "Api", "Config", "InsufficientDataError",
    "IntegrityError", "NumericalError", "ParseError", "annualize", "bipower_variation", "clean_symbol",
    "compute_measures", "covariance_names", "fit", "forecast", "ingest_files", "measure_names",
    "newey_west_lags", "read_parquet", "realized_quarticity", "realized_variance", "request",
    "return_measures", "simulate_har", "simulate_mem", "write_corpus", "write_parquet",
]


def fit(y, family, measure="rv5", rq=None, negative=None):
    """Fit a model; returns the parameter table, fit statistics and diagnostics as a dict."""
    return _json.loads(_rvkit.fit_json(list(y), family, measure, list(rq or []), list(negative or [])))


def forecast(y, n_est, family, measure="rv5", rq=None, negative=None, max_h=MAX_HORIZON):
    """Fit on y[:n_est], then forecast one step ahead over the following observations."""
    return _json.loads(
        _rvkit.forecast_json(list(y), n_est, family, measure, list(rq or []), list(negative or []), max_h)
    )


def request(api, method, path, query=None, body=None):
    """Call the HTTP handler in process; JSON bodies are decoded, archives returned as bytes."""
    payload = body if isinstance(body, str) or body is None else _json.dumps(body)
    status, content_type, raw = api.handle(method, path, dict(query or {}), payload or "")
    if content_type == "application/json":
        return status, _json.loads(raw)
    return status, raw
