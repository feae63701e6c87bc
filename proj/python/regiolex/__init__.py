"""Regionalism detection over geotagged short-text corpora."""

from ._core import (
    CorpusError,
    CorpusStats,
    LocationError,
    LocationTable,
    StatsError,
    SynthConfig,
    analyze,
    apply_thresholds,
    build_ranking,
    generate,
    geolocation_sweep,
    h_users,
    h_words,
    haversine_km,
    igr,
    ingest,
    ingest_file,
    ltf_ig,
    luf_ig,
    merge,
    metric_names,
    normalize_token,
    rank_diffs,
    score,
    tokenize,
    write_corpus,
)

__version__ = "0.1.0"
