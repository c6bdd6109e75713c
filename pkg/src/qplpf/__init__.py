"""Quasiperiodic low pass filtering by delay embedding and neighbor averaging."""

from .analysis import PCAResult, pca
from .baselines import adaptive_filter, boxcar, local_max_frequency
from .embed import (
    DelaySet,
    EmbeddedCloud,
    GridImage,
    SampleSeries,
    consecutive_delays,
    embed_image,
    embed_series,
    square_window_offsets,
)
from .errors import (
    DegenerateEnvelopeError,
    DomainTooShortError,
    InvalidParameterError,
    QPLPFError,
    ShapeError,
    TooFewPointsError,
    UndefinedMetricError,
)
from .filter import (
    PhaseOracle,
    neighborhood_average,
    oracle_phase_average,
    qplpf_image,
    qplpf_series,
)
from .graph import MetricKind, NeighborGraph, knn_brute, knn_indexed
from .metrics import envelope, envelope_variability, find_peaks, rms_error, spectrum2d
from .synth import NoiseSpec, awgn, lfm_chirp, periodic_sine, snr_to_sigma, warped_sine_image

__version__ = "0.1.0"
