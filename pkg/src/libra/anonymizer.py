"""Per-subsample anonymization mechanism.

Three steps give each subsample its guarantee: rare variants are clipped
from the source log before any sampling, variant frequencies inside a
sample are randomized with integer-rounded Laplace noise (sensitivity 1,
one individual contributes one whole trace), and timestamps are perturbed
in the relative representation (start offset in days, cycle times in
minutes) with Laplace noise of scale b. No step can introduce an activity
sequence that was absent from its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .accountant import PrivacyConfig, eps_laplace
from .errors import NotAnonymizable
from .log_model import (
    EventLog,
    RelativeTrace,
    Trace,
    extract_variants,
    from_relative,
    to_relative,
)
from .sampler import RngStream, Subsample, as_generator


@dataclass(frozen=True)
class AnonymizedSample:
    """One subsample after count randomization and timestamp noise."""

    traces: tuple[Trace, ...]
    round_index: int = 0


def laplace_draw(gen: np.random.Generator, scale: float) -> float:
    """One Laplace(0, scale) sample via the inverse CDF of a single uniform:
    x = -scale * sgn(u - 1/2) * ln(1 - 2|u - 1/2|)."""
    u = gen.random()
    centered = u - 0.5
    if centered == 0.0:
        return 0.0
    # u = 0.0 has probability 2**-53 but would take the log to -inf
    arg = max(1.0 - 2.0 * abs(centered), 5e-324)
    return -scale * math.copysign(1.0, centered) * math.log(arg)


def clip_rare_variants(log: EventLog, threshold: float) -> EventLog:
    """Drop every trace whose variant frequency falls below the threshold.

    Refuses logs in which all variants are unique: no sample of such a log,
    however small, can be released safely.
    """
    if threshold < 0.0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    variants = extract_variants(log)
    if variants and all(v.frequency == 1 for v in variants):
        raise NotAnonymizable("log not anonymizable: all trace variants unique")
    freq = {v.activities: v.frequency for v in variants}
    kept = tuple(t for t in log.traces if freq[t.activities] >= threshold)
    return EventLog(kept)


def _fresh_case_id(base: str, used: set[str]) -> str:
    n = 1
    candidate = f"{base}+{n}"
    while candidate in used:
        n += 1
        candidate = f"{base}+{n}"
    used.add(candidate)
    return candidate


def randomize_variant_frequencies(
    sample: Subsample,
    epsilon: float,
    rng: RngStream | np.random.Generator,
    zero_noise: bool = False,
) -> list[Trace]:
    """Perturb each variant count with round(Laplace(0, 1/epsilon)), clamped
    at zero, and realize the new counts by cloning or deleting whole traces.

    All noise draws happen first, one per variant in lexicographic order,
    and only then are the new counts realized; clones receive fresh case
    IDs. The outcome is thus a pure function of (sample, epsilon, stream).
    Deleted instances are chosen uniformly; clones copy a uniformly chosen
    instance. Variants absent from the sample never gain a positive count.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    gen = as_generator(rng)

    groups: dict[tuple[str, ...], list[int]] = {}
    for idx, trace in enumerate(sample.traces):
        groups.setdefault(trace.activities, []).append(idx)

    ordered = sorted(groups)
    noises = {
        variant: 0.0 if zero_noise else laplace_draw(gen, 1.0 / epsilon)
        for variant in ordered
    }

    used_ids = {t.case_id for t in sample.traces}
    keep = [True] * len(sample.traces)
    clones: list[Trace] = []
    for variant in ordered:
        indices = groups[variant]
        count = len(indices)
        new_count = max(0, count + round(noises[variant]))
        if new_count < count:
            dropped = gen.choice(count, size=count - new_count, replace=False)
            for local in dropped:
                keep[indices[int(local)]] = False
        elif new_count > count:
            for _ in range(new_count - count):
                source = sample.traces[indices[int(gen.integers(count))]]
                clones.append(source.with_case_id(_fresh_case_id(source.case_id, used_ids)))

    survivors = [t for flag, t in zip(keep, sample.traces) if flag]
    survivors.extend(clones)
    return survivors


def anonymize_timestamps(
    rel: RelativeTrace,
    b: float,
    rng: RngStream | np.random.Generator,
    zero_noise: bool = False,
) -> RelativeTrace:
    """Add independent Laplace(0, b) noise to the relative start (in days)
    and to each cycle time (in minutes), clamping every component at zero.

    Draw order is fixed: start first, then cycles left to right.
    """
    if b <= 0.0:
        raise ValueError(f"scale b must be positive, got {b}")
    if zero_noise:
        return rel
    gen = as_generator(rng)
    start = max(0.0, rel.relative_start_days + laplace_draw(gen, b))
    cycles = tuple(max(0.0, c + laplace_draw(gen, b)) for c in rel.cycle_times_minutes)
    return RelativeTrace(rel.case_id, rel.variant, start, cycles)


def anonymize_subsample(
    sample: Subsample,
    config: PrivacyConfig,
    rng: RngStream | np.random.Generator,
    *,
    epoch: datetime | None = None,
) -> AnonymizedSample:
    """Apply count randomization, then timestamp noise to every surviving
    trace. epoch is the reference instant of the source log; it defaults to
    the earliest start within the sample."""
    if not sample.traces:
        return AnonymizedSample((), sample.round_index)
    gen = as_generator(rng)
    if epoch is None:
        epoch = min(t.start for t in sample.traces)
    epsilon = eps_laplace(config.alpha, config.b)
    survivors = randomize_variant_frequencies(sample, epsilon, gen, config.zero_noise)
    out = []
    for trace in survivors:
        rel = to_relative(trace, epoch)
        noisy = anonymize_timestamps(rel, config.b, gen, config.zero_noise)
        out.append(from_relative(noisy, epoch))
    return AnonymizedSample(tuple(out), sample.round_index)
