"""Report bundle: delimited payoff table plus rendered figures."""
from __future__ import annotations

import csv
import os

from .accounting import Outcome, budget_identity_gap, node_flows, payoff, tnv
from .plots import plot_network, plot_payoffs
from .scenario import format_rational, render_report


def write_report_bundle(outcome: Outcome, out_dir: str, mode: str = "disposal") -> list[str]:
    """Write report.txt, payoffs.csv, and the figures into out_dir.

    Returns the written paths. Money in the CSV is exact ("p/q"), never a
    rounded decimal.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    report_path = os.path.join(out_dir, "report.txt")
    with open(report_path, "wb") as fh:
        fh.write(render_report(outcome, format="text", mode=mode))
    written.append(report_path)

    csv_path = os.path.join(out_dir, "payoffs.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["company", "payoff", "goods_in", "goods_out", "tnv", "identity_gap"])
        total = format_rational(tnv(outcome))
        gap = format_rational(budget_identity_gap(outcome))
        for cid in outcome.game.company_ids():
            g_in, g_out = node_flows(outcome, cid)
            writer.writerow(
                [
                    cid,
                    format_rational(payoff(outcome, cid)),
                    " ".join(f"{g}:{n}" for g, n in g_in.items()),
                    " ".join(f"{g}:{n}" for g, n in g_out.items()),
                    total,
                    gap,
                ]
            )
    written.append(csv_path)

    for name, plot in (("payoffs.png", plot_payoffs), ("network.png", plot_network)):
        path = os.path.join(out_dir, name)
        plot(outcome, path)
        written.append(path)
    return written
