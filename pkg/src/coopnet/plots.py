"""Matplotlib figures for the report bundle."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .accounting import Outcome, payoff, tnv  # noqa: E402
from .scenario import format_rational  # noqa: E402


def plot_payoffs(outcome: Outcome, path: str) -> None:
    """Bar chart of company payoffs with exact labels."""
    ids = outcome.game.company_ids()
    values = [payoff(outcome, cid) for cid in ids]
    fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(ids)), 3.5))
    bars = ax.bar(ids, [float(v) for v in values], color="#4878a8")
    for bar, v in zip(bars, values):
        ax.annotate(
            str(format_rational(v)),
            (bar.get_x() + bar.get_width() / 2, bar.get_height()),
            ha="center",
            va="bottom",
            fontsize=9,
        )
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_ylabel("payoff")
    ax.set_title(f"Payoffs (TNV = {format_rational(tnv(outcome))})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_network(outcome: Outcome, path: str) -> None:
    """Companies on a circle; solid arrows carry goods, dashed carry value."""
    ids = outcome.game.company_ids()
    n = max(len(ids), 1)
    pos = {
        cid: (math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n))
        for k, cid in enumerate(ids)
    }
    fig, ax = plt.subplots(figsize=(6, 6))
    for cid, (x, y) in pos.items():
        ax.plot(x, y, "o", markersize=26, color="#e8e2cf", markeredgecolor="black", zorder=3)
        ax.annotate(cid, (x, y), ha="center", va="center", zorder=4, fontsize=9)

    def arrow(a, b, label, style, color, rad):
        ax.annotate(
            "",
            xy=pos[b],
            xytext=pos[a],
            arrowprops=dict(
                arrowstyle="-|>",
                linestyle=style,
                color=color,
                shrinkA=16,
                shrinkB=16,
                connectionstyle=f"arc3,rad={rad}",
            ),
            zorder=2,
        )
        # label a third of the way along, nudged off the line
        (ax0, ay0), (bx, by) = pos[a], pos[b]
        dx, dy = bx - ax0, by - ay0
        norm = math.hypot(dx, dy) or 1.0
        px, py = -dy / norm, dx / norm
        off = 0.10 if rad >= 0 else -0.10
        ax.annotate(
            label,
            (ax0 + 0.33 * dx + off * px, ay0 + 0.33 * dy + off * py),
            fontsize=7,
            color=color,
            ha="center",
        )

    for (a, b), vec in sorted(outcome.goods.internal.items()):
        arrow(a, b, " ".join(f"{g}:{k}" for g, k in vec.items()), "solid", "#2a6f2a", 0.1)
    for (a, b), amount in sorted(outcome.value.internal.items()):
        arrow(a, b, str(format_rational(amount)), "dashed", "#a03030", -0.1)

    for cid, vec in sorted(outcome.goods.external_sales.items()):
        x, y = pos[cid]
        ax.annotate(
            "sink: " + " ".join(f"{g}:{k}" for g, k in vec.items()),
            (x * 1.22, y * 1.22),
            fontsize=7,
            ha="center",
            color="#444444",
        )
    ax.set_xlim(-1.6, 1.6)
    ax.set_ylim(-1.6, 1.6)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("Goods (solid) and value (dashed) flows")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
