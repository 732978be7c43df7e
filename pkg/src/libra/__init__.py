"""Differentially private event log anonymization via Poisson subsampling."""

from .accountant import (
    PrivacyConfig,
    PrivacyReport,
    amplify_simple,
    build_report,
    clipping_threshold,
    compose,
    eps_laplace,
    rdp_to_dp,
    subsampled_rdp,
)
from .anonymizer import (
    AnonymizedSample,
    anonymize_subsample,
    anonymize_timestamps,
    clip_rare_variants,
    randomize_variant_frequencies,
)
from .errors import (
    BadTimestamp,
    BothEmpty,
    DomainError,
    EmptyDistribution,
    EpochAfterStart,
    LibraError,
    MalformedRow,
    MalformedXml,
    MissingAttribute,
    MissingColumn,
    NotAnonymizable,
)
from .evaluator import DFG, Distribution1D, build_dfg, emd_1d, emd_frequency, emd_time
from .log_io import CsvSchema, parse_csv, parse_xes, serialize_csv
from .log_model import (
    Event,
    EventLog,
    RelativeTrace,
    Trace,
    TraceVariant,
    extract_variants,
    from_relative,
    to_relative,
    variant_set,
)
from .pipeline import RunResult, cli_main, run
from .postprocessor import Abstraction, PickState, abstract, is_informative, pick_relevant
from .sampler import RngStream, Subsample, poisson_sample

__version__ = "0.1.0"

__all__ = [
    "Abstraction", "AnonymizedSample", "BadTimestamp", "BothEmpty", "CsvSchema",
    "DFG", "Distribution1D", "DomainError", "EmptyDistribution", "EpochAfterStart",
    "Event", "EventLog", "LibraError", "MalformedRow", "MalformedXml",
    "MissingAttribute", "MissingColumn", "NotAnonymizable", "PickState",
    "PrivacyConfig", "PrivacyReport", "RelativeTrace", "RngStream", "RunResult",
    "Subsample", "Trace", "TraceVariant", "abstract", "amplify_simple",
    "anonymize_subsample", "anonymize_timestamps", "build_dfg", "build_report",
    "cli_main", "clip_rare_variants", "clipping_threshold", "compose", "emd_1d",
    "emd_frequency", "emd_time", "eps_laplace", "extract_variants", "from_relative",
    "is_informative", "parse_csv", "parse_xes", "pick_relevant", "poisson_sample",
    "randomize_variant_frequencies", "rdp_to_dp", "run", "serialize_csv",
    "subsampled_rdp", "to_relative", "variant_set",
]
