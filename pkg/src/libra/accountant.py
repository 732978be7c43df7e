"""Privacy budget accounting.

All budget quantities derive from the Renyi divergence curve of the Laplace
mechanism at integer orders. The per-subsample guarantee is amplified by the
Poisson sampling ratio, composed additively over the subsample rounds, and
finally converted to a standard (epsilon, delta) guarantee. Everything here
is a deterministic pure function; sums of exponentials are evaluated in log
space so large orders do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.special import gammaln

from .errors import DomainError


@dataclass(frozen=True)
class PrivacyConfig:
    """Input parameters of an anonymization run.

    alpha is the Renyi divergence order, b the Laplace scale shared by the
    count and timestamp mechanisms, gamma the Poisson sampling ratio, omega
    the relevance distance threshold and rho the confidence of the
    discovery-sufficiency stopping rule (with p_hat its target probability
    of still seeing new information).
    """

    alpha: int
    delta: float = 1e-4
    gamma: float = 0.05
    b: float = 2.0
    omega: float = 0.0
    rho: float = 0.95
    p_hat: float = 0.05
    seed: int = 0
    eta_literal: bool = False
    zero_noise: bool = False
    clip_override: float | None = None
    threads: int = 1

    def __post_init__(self):
        if not isinstance(self.alpha, int) or self.alpha < 2:
            raise DomainError(f"alpha must be an integer >= 2, got {self.alpha}")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 < self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.b <= 0.0:
            raise DomainError(f"scale b must be positive, got {self.b}")
        if self.omega < 0.0:
            raise DomainError(f"omega must be non-negative, got {self.omega}")
        if not 0.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0.0 < self.p_hat < 1.0:
            raise DomainError(f"p_hat must lie in (0, 1), got {self.p_hat}")
        if self.clip_override is not None and self.clip_override < 0.0:
            raise DomainError("clip_override must be non-negative")
        if self.threads < 1:
            raise DomainError("threads must be >= 1")


@dataclass(frozen=True)
class PrivacyReport:
    """Budget accounting of one run, rendered as flat key = value lines."""

    alpha: int
    gamma: float
    b: float
    delta: float
    epsilon_laplace: float
    clipping_threshold_C: float | None
    variants_before: int
    variants_after: int
    cases_before: int
    cases_after: int
    eta: int
    epsilon_subsampled_rdp: float
    epsilon_composed_rdp: float
    epsilon_prime_dp: float
    warnings: tuple[str, ...] = field(default=())

    def lines(self) -> list[str]:
        out = []
        for name in (
            "alpha", "gamma", "b", "delta", "epsilon_laplace",
            "clipping_threshold_C", "variants_before", "variants_after",
            "cases_before", "cases_after", "eta", "epsilon_subsampled_rdp",
            "epsilon_composed_rdp", "epsilon_prime_dp",
        ):
            value = getattr(self, name)
            out.append(f"{name} = {'undefined' if value is None else value}")
        for w in self.warnings:
            out.append(f"warning = {w}")
        return out

    def render(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _log_add(logx: float, logy: float) -> float:
    """log(exp(logx) + exp(logy)) without leaving log space."""
    a, b = min(logx, logy), max(logx, logy)
    if a == -math.inf:
        return b
    return b + math.log1p(math.exp(a - b))


def _log_comb(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def _xlog(exponent: float, log_base: float) -> float:
    # exponent * log_base with the 0 * -inf corner defined as 0
    return 0.0 if exponent == 0 else exponent * log_base


def eps_laplace(alpha: int, b: float) -> float:
    """Renyi divergence bound of the Laplace mechanism at integer order alpha.

    Computes (1/(alpha-1)) * ln(alpha/(2*alpha-1) * e^((alpha-1)/b)
    + (alpha-1)/(2*alpha-1) * e^(-alpha/b)), strictly positive for finite b.
    """
    if not isinstance(alpha, int) or alpha < 2:
        raise DomainError(f"alpha must be an integer >= 2, got {alpha}")
    if b <= 0.0:
        raise DomainError(f"scale b must be positive, got {b}")
    a = float(alpha)
    x = (a - 1) / b
    if x < 30.0:
        # expm1 keeps the result positive when b is huge: the linear parts of
        # the two exponentials cancel exactly and only the curvature remains
        arg = (a * math.expm1(x) + (a - 1) * math.expm1(-a / b)) / (2 * a - 1)
        return math.log1p(arg) / (a - 1)
    first = math.log(a / (2 * a - 1)) + x
    second = math.log((a - 1) / (2 * a - 1)) - a / b
    return _log_add(first, second) / (a - 1)


def clipping_threshold(epsilon: float, delta: float, k: int) -> float:
    """Minimum variant frequency that may be released: (1/eps) * ln(2k/delta)."""
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if k < 1:
        raise DomainError(f"variant count k must be >= 1, got {k}")
    return math.log(2 * k / delta) / epsilon


def amplify_simple(epsilon: float, delta: float, gamma: float) -> tuple[float, float]:
    """Amplification of a single (eps, delta) guarantee by sampling ratio gamma:
    eps' = ln(1 + gamma*(e^eps - 1)), delta' = gamma*delta."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    if gamma == 0.0:
        return 0.0, 0.0
    if gamma == 1.0:
        return epsilon, delta
    # clamp: amplification can never exceed the unamplified guarantee, but the
    # expm1/log1p round trip may land one ulp above it
    eps_prime = min(epsilon, math.log1p(gamma * math.expm1(epsilon)))
    return eps_prime, gamma * delta


def subsampled_rdp(alpha: int, gamma: float, b: float) -> float:
    """Renyi bound at order alpha for the Laplace mechanism run on a Poisson
    sample with ratio gamma.

    Three additive contributions inside the log: the (1-gamma)-weighted
    leading term (1-g)^(a-1) * ((a-1)g + 1), the order-2 binomial term with
    e^{eps(2)}, and three times the binomial tail sum over j = 3..alpha with
    e^{(j-1) eps(j)}, where eps(j) is the Laplace curve at order j. The sum
    is evaluated via log-sum-exp; the result is 0 exactly at gamma = 0.
    """
    if not isinstance(alpha, int) or alpha < 2:
        raise DomainError(f"alpha must be an integer >= 2, got {alpha}")
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    if b <= 0.0:
        raise DomainError(f"scale b must be positive, got {b}")
    if gamma == 0.0:
        return 0.0
    log_g = math.log(gamma)
    log_1mg = math.log1p(-gamma) if gamma < 1.0 else -math.inf

    total = _xlog(alpha - 1, log_1mg) + math.log((alpha - 1) * gamma + 1.0)
    total = _log_add(
        total,
        _log_comb(alpha, 2) + 2 * log_g + _xlog(alpha - 2, log_1mg) + eps_laplace(2, b),
    )
    for j in range(3, alpha + 1):
        term = (
            math.log(3.0)
            + _log_comb(alpha, j)
            + _xlog(alpha - j, log_1mg)
            + j * log_g
            + (j - 1) * eps_laplace(j, b)
        )
        total = _log_add(total, term)
    return max(0.0, total / (alpha - 1))


def compose(epsilon_per_round: float, eta: int) -> float:
    """Additive composition over eta rounds (valid for DP and for RDP at a
    fixed order alike)."""
    if eta < 1:
        raise DomainError(f"eta must be >= 1, got {eta}")
    return eta * epsilon_per_round


def rdp_to_dp(epsilon_rdp: float, alpha: int, delta: float) -> float:
    """Standard order-alpha conversion: eps_DP = eps_RDP + ln(1/delta)/(alpha-1)."""
    if not isinstance(alpha, int) or alpha < 2:
        raise DomainError(f"alpha must be an integer >= 2, got {alpha}")
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    return epsilon_rdp + math.log(1.0 / delta) / (alpha - 1)


def subsample_rounds(config: PrivacyConfig, z: int) -> int:
    """Number of subsample rounds eta.

    Default is ceil(1/gamma): each round recovers about gamma*z cases, so
    1/gamma rounds rebuild roughly the filtered case count. The literal
    variant gamma*z is available behind eta_literal for comparison.
    """
    if config.eta_literal:
        return max(1, math.ceil(config.gamma * z))
    return max(1, math.ceil(1.0 / config.gamma))


def build_report(
    config: PrivacyConfig,
    z: int,
    k: int,
    *,
    cases_before: int | None = None,
    variants_after: int | None = None,
    warnings: tuple[str, ...] = (),
) -> PrivacyReport:
    """Chain the budget functions into the run report.

    z is the case count of the filtered log, k the variant count of the
    input log. With k = 0 (empty input) the clipping threshold is undefined
    and every epsilon field is zero.
    """
    if z < 0 or k < 0:
        raise DomainError("counts must be non-negative")
    eta = subsample_rounds(config, z)
    if k == 0:
        return PrivacyReport(
            alpha=config.alpha, gamma=config.gamma, b=config.b, delta=config.delta,
            epsilon_laplace=0.0, clipping_threshold_C=None,
            variants_before=0, variants_after=0, cases_before=0, cases_after=0,
            eta=eta, epsilon_subsampled_rdp=0.0, epsilon_composed_rdp=0.0,
            epsilon_prime_dp=0.0, warnings=warnings,
        )
    eps = eps_laplace(config.alpha, config.b)
    threshold = (
        config.clip_override
        if config.clip_override is not None
        else clipping_threshold(eps, config.delta, k)
    )
    per_round = subsampled_rdp(config.alpha, config.gamma, config.b)
    composed = compose(per_round, eta)
    return PrivacyReport(
        alpha=config.alpha, gamma=config.gamma, b=config.b, delta=config.delta,
        epsilon_laplace=eps, clipping_threshold_C=threshold,
        variants_before=k,
        variants_after=k if variants_after is None else variants_after,
        cases_before=z if cases_before is None else cases_before,
        cases_after=z, eta=eta,
        epsilon_subsampled_rdp=per_round, epsilon_composed_rdp=composed,
        epsilon_prime_dp=rdp_to_dp(composed, config.alpha, config.delta),
        warnings=warnings,
    )
