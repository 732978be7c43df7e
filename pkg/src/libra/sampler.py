"""Poisson subsampling with seedable, splittable randomness streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .log_model import EventLog, Trace

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream_index) pair that fully determines a random sequence.

    Substreams are derived through the SeedSequence spawn mechanism, so
    distinct stream indices yield statistically independent generators and
    rounds can run in parallel without coordination.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed & _MASK64, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng: RngStream | np.random.Generator) -> np.random.Generator:
    """Accept either a stream descriptor or a live generator.

    Operations that draw several times from one logical stream construct the
    generator once and hand it down; callers holding an RngStream get a fresh
    deterministic generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


@dataclass(frozen=True)
class Subsample:
    """Whole traces drawn from a source log, never subtraces."""

    traces: tuple[Trace, ...]
    round_index: int = 0


def poisson_sample(
    log: EventLog,
    gamma: float,
    rng: RngStream | np.random.Generator,
    round_index: int | None = None,
) -> Subsample:
    """Keep each trace independently with probability gamma.

    Traces are visited in stable case-ID order and one uniform draw is
    consumed per trace, so the sample depends only on (log, gamma, stream),
    not on in-memory trace ordering.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if round_index is None:
        round_index = rng.stream_index if isinstance(rng, RngStream) else 0
    gen = as_generator(rng)
    ordered = sorted(log.traces, key=lambda t: t.case_id)
    draws = gen.random(len(ordered))
    picked = tuple(t for t, u in zip(ordered, draws) if u < gamma)
    return Subsample(picked, round_index)
