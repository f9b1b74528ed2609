"""Figure rendering for CLI reports. Figures are written to files only."""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .energy import PowerTrace  # noqa: E402
from .model import US_PER_S  # noqa: E402
from .report import CompareRow  # noqa: E402

FIG_SIZE = (6.4, 3.6)


def plot_tradeoff(rows: Sequence[CompareRow], path, title: str = "") -> None:
    """Runtime and energy side by side against node count."""
    ns = [r.n for r in rows]
    fig, (ax_t, ax_e) = plt.subplots(1, 2, figsize=FIG_SIZE)
    ax_t.bar(ns, [r.runtime_s for r in rows], color="tab:blue")
    ax_t.set_xlabel("nodes")
    ax_t.set_ylabel("runtime [s]")
    ax_e.bar(ns, [r.energy_j for r in rows], color="tab:orange")
    ax_e.set_xlabel("nodes")
    ax_e.set_ylabel("energy [J]")
    for ax in (ax_t, ax_e):
        ax.set_xticks(ns)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_power_traces(traces: Mapping[str, PowerTrace], path) -> None:
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    for node_id in sorted(traces):
        samples = traces[node_id].samples
        ax.plot([t / US_PER_S for t, _ in samples], [w for _, w in samples], label=node_id, lw=1)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("power [W]")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
