"""Figure rendering for scenario output, written next to the delimited data."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import TimeSeries  # noqa: E402


def _site_map(series: TimeSeries, prefix: str) -> np.ndarray | None:
    cols = [c for c in series.columns if c.startswith(prefix)]
    if not cols:
        return None
    cols.sort(key=lambda c: int(c.split("_")[-1]))
    return np.column_stack([series.columns[c] for c in cols])


def _heatmap(ax, series: TimeSeries, data: np.ndarray, label: str):
    im = ax.imshow(
        data.T,
        origin="lower",
        aspect="auto",
        extent=(series.index[0], series.index[-1], 0.5, data.shape[1] + 0.5),
        cmap="inferno",
    )
    ax.set_xlabel("t [1/J]")
    ax.set_ylabel("site")
    plt.colorbar(im, ax=ax, label=label)


def plot_walk(series: TimeSeries, path, slice_time: float | None = None):
    data = _site_map(series, "p_")
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    _heatmap(ax0, series, data, "$p_i(t)$")
    if slice_time is None:
        slice_time = series.index[-1] / 2
    k = int(np.argmin(np.abs(series.index - slice_time)))
    sites = np.arange(1, data.shape[1] + 1)
    ax1.bar(sites, data[k], color="tab:blue")
    ax1.set_xlabel("site")
    ax1.set_ylabel("$p_i$")
    ax1.set_title(f"t = {series.index[k]:g}/J")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_transport(series: TimeSeries, path):
    data = _site_map(series, "n_")
    ln_cols = sorted(
        (c for c in series.columns if c.startswith("ln_pair_")),
        key=lambda c: int(c.split("_")[-1]),
    )
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    _heatmap(ax0, series, data, r"$\langle n_i \rangle$")
    for c in ln_cols:
        ax1.plot(series.index, series.columns[c], label=c.replace("ln_pair_", "k="))
    ax1.set_xlabel("t [1/J]")
    ax1.set_ylabel("LN(mid-k, mid+k)")
    ax1.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(series: TimeSeries, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(series.index, series.columns["ln_first_max"], "o-")
    ax.set_xlabel("U/J")
    ax.set_ylabel("LN(1, M) at first maximum")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cotunnel(series: TimeSeries, path):
    data = _site_map(series, "n_")
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    _heatmap(ax0, series, data, r"$\langle n_i \rangle$")
    ax1.plot(series.index, series.columns["spread"])
    ax1.set_xlabel("t [1/J]")
    ax1.set_ylabel(r"cloud spread $\Delta$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sdq(series: TimeSeries, path):
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    ax0.plot(series.index, series.columns["p"], label="p")
    ax0.plot(series.index, series.columns["ln"], "--", label="LN")
    ax0.plot(series.index, series.columns["p_ln"], ":", label="p LN")
    ax0.set_xlabel("t [1/J]")
    ax0.legend()
    for label in ("00", "01", "10", "11"):
        ax1.plot(series.index, series.columns[f"pop_{label}"],
                 label=rf"$|{label}\rangle$")
    ax1.set_xlabel("t [1/J]")
    ax1.set_ylabel("population")
    ax1.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


_RENDERERS = {
    "ctqw": plot_walk,
    "ctrw": plot_walk,
    "transport": plot_transport,
    "ln_sweep": plot_sweep,
    "cotunnel": plot_cotunnel,
    "sdq": plot_sdq,
}


def render(series: TimeSeries, path) -> bool:
    """Render the figure matching the series kind; False if none exists."""
    fn = _RENDERERS.get(series.name)
    if fn is None:
        return False
    fn(series, path)
    return True
