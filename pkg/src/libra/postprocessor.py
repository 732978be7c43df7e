"""Statistical post-processing of anonymized subsamples.

Traces are scanned in seeded random order and kept only while they still
contribute new behavior, where behavior is abstracted as the set of
directly-follows activity pairs. A run of N consecutive uninformative
traces ends the scan: N is chosen so that, with confidence rho, the
probability of any further trace being informative is below p_hat.
Operating on anonymized samples only, this step cannot weaken the
guarantee of its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .anonymizer import AnonymizedSample
from .log_model import Trace
from .sampler import RngStream, as_generator

_LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class Abstraction:
    """Set of ordered activity pairs observed adjacently in one or more traces."""

    df_pairs: frozenset[tuple[str, str]] = frozenset()

    def union(self, other: "Abstraction") -> "Abstraction":
        return Abstraction(self.df_pairs | other.df_pairs)


@dataclass
class PickState:
    """Mutable scan state of one picking session."""

    omega: float
    stop_threshold: int
    union_abstraction: Abstraction = field(default_factory=Abstraction)
    picked: list[Trace] = field(default_factory=list)
    consecutive_uninformative: int = 0


def abstract(trace: Trace) -> Abstraction:
    """Adjacent activity pairs of the trace's variant; empty for one event."""
    acts = trace.activities
    return Abstraction(frozenset(zip(acts, acts[1:])))


def is_informative(state: PickState, trace: Trace) -> bool:
    """True when the trace carries more than omega directly-follows pairs
    not yet present in the union abstraction."""
    novel = abstract(trace).df_pairs - state.union_abstraction.df_pairs
    return len(novel) > state.omega


def stop_threshold(rho: float, p_hat: float) -> int:
    """Consecutive-failure count N = ceil(ln(1-rho) / ln(1-p_hat)).

    After N uninformative traces in a row, the chance that informative
    traces still occur with probability >= p_hat is below 1-rho.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if not 0.0 < p_hat < 1.0:
        raise ValueError(f"p_hat must lie in (0, 1), got {p_hat}")
    n = math.log(1.0 - rho) / math.log(max(1.0 - p_hat, _LOG_FLOOR))
    return max(1, math.ceil(n))


def pick_relevant(
    sample: AnonymizedSample,
    omega: float,
    rho: float,
    rng: RngStream | np.random.Generator,
    p_hat: float = 0.05,
) -> list[Trace]:
    """Select the traces of the sample that still add new behavior.

    The sample is scanned in a seeded uniformly random permutation (the
    stopping argument needs exchangeable draws). Informative traces are
    picked and merged into the union abstraction, resetting the failure
    counter; once the counter reaches the stop threshold the remaining
    traces are dropped.
    """
    if omega < 0.0:
        raise ValueError(f"omega must be non-negative, got {omega}")
    if not sample.traces:
        return []
    gen = as_generator(rng)
    state = PickState(omega=omega, stop_threshold=stop_threshold(rho, p_hat))
    for idx in gen.permutation(len(sample.traces)):
        trace = sample.traces[int(idx)]
        if is_informative(state, trace):
            state.picked.append(trace)
            state.union_abstraction = state.union_abstraction.union(abstract(trace))
            state.consecutive_uninformative = 0
        else:
            state.consecutive_uninformative += 1
            if state.consecutive_uninformative >= state.stop_threshold:
                break
    return state.picked
