"""Report figures rendered to files next to the delimited output."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .accountant import PrivacyConfig, build_report
from .evaluator import DFG
from .log_model import EventLog, extract_variants


def save_variant_frequency_figure(
    original: EventLog, anonymized: EventLog, path: str, top: int = 20
) -> str:
    """Bar chart of the most frequent variants before and after anonymization."""
    orig = extract_variants(original)[:top]
    anon_freq = {v.activities: v.frequency for v in extract_variants(anonymized)}
    labels = [f"v{i + 1}" for i in range(len(orig))]
    before = [v.frequency for v in orig]
    after = [anon_freq.get(v.activities, 0) for v in orig]

    fig, ax = plt.subplots(figsize=(8, 4.5))
    x = range(len(labels))
    ax.bar([i - 0.2 for i in x], before, width=0.4, label="original")
    ax.bar([i + 0.2 for i in x], after, width=0.4, label="anonymized")
    ax.set_xticks(list(x), labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("trace count")
    ax.set_title("Variant frequencies (original order, most frequent first)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_budget_curve_figure(config: PrivacyConfig, z: int, k: int, path: str) -> str:
    """Composed RDP and converted DP guarantee as a function of the order."""
    orders = [2, 3, 5, 8, 12, 16, 24, 32, 48, 64, 96, 128]
    composed, converted = [], []
    for a in orders:
        cfg = PrivacyConfig(
            alpha=a, delta=config.delta, gamma=config.gamma, b=config.b,
            eta_literal=config.eta_literal,
        )
        rep = build_report(cfg, z, k)
        composed.append(rep.epsilon_composed_rdp)
        converted.append(rep.epsilon_prime_dp)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(orders, composed, marker="o", label="composed (Renyi)")
    ax.plot(orders, converted, marker="s", label="converted (eps', delta)")
    ax.axvline(config.alpha, color="grey", linestyle=":", label=f"run order {config.alpha}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("divergence order")
    ax.set_ylabel("privacy loss")
    ax.set_title(f"Budget vs order (gamma={config.gamma}, b={config.b}, delta={config.delta})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_dfg_frequency_figure(original: DFG, anonymized: DFG, path: str) -> str:
    """Scatter of per-edge frequencies, original vs anonymized."""
    union = sorted(set(original.edges) | set(anonymized.edges))
    xs = [original.frequency(e) for e in union]
    ys = [anonymized.frequency(e) for e in union]

    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    ax.scatter(xs, ys, s=18, alpha=0.7)
    limit = max(xs + ys + [1])
    ax.plot([0, limit], [0, limit], color="grey", linewidth=0.8)
    ax.set_xlabel("edge frequency, original")
    ax.set_ylabel("edge frequency, anonymized")
    ax.set_title("Directly-follows frequencies")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_run_figures(
    original: EventLog,
    anonymized: EventLog,
    config: PrivacyConfig,
    z: int,
    k: int,
    directory: str,
) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    written = [
        save_variant_frequency_figure(
            original, anonymized, os.path.join(directory, "variant_frequencies.png")
        )
    ]
    if k > 0:
        written.append(
            save_budget_curve_figure(
                config, z, k, os.path.join(directory, "privacy_budget.png")
            )
        )
    return written
