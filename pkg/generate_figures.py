#!/usr/bin/env python3
"""
Render static figures from tc_sweep CSV files.

Figure ids and the sweep they read:
  fig3  : variational |α|, (μ−ω_c)/g, θ, ⟨J_z⟩/N against ρ_ex (4 panels)
  fig4  : exact       photon number, inversion, chemical potential
  fig5  : exact       g²(0) and linear entropy
  fig6  : exact       light moments with Poisson references
  fig6m : exact       matter moments
  fig7  : scaling     scaled inversion against ω_a, one curve per ρ_ex
  tomo  : tomography  density-matrix heatmap per manifold

Each figure is written as PNG and PDF next to the requested stem. Rendering
the same CSV twice gives identical files.

Usage:
    uv run python generate_figures.py exact_N1000.csv --figure fig5
    uv run python generate_figures.py scaling_N10.csv --figure fig7 --out figs/fig7a
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable
from pathlib import Path

import matplotlib
matplotlib.use("Agg")  # non-interactive backend
import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

logger = logging.getLogger(__name__)


class SchemaError(ValueError):
    """CSV lacks a column the requested figure needs."""


# ---------------------------------------------------------------------------
# House style
# ---------------------------------------------------------------------------

def setup_style():
    """Muted colours, serif fonts, light horizontal grid."""
    sns.set_theme(style="whitegrid", font_scale=1.0)
    plt.rcParams.update({
        "font.family": "serif",
        "font.serif": ["DejaVu Serif"],
        "axes.edgecolor": "0.3",
        "axes.linewidth": 0.8,
        "grid.alpha": 0.3,
        "grid.linewidth": 0.5,
        "figure.dpi": 150,
        "savefig.dpi": 300,
        "axes.spines.top": False,
        "axes.spines.right": False,
        "figure.facecolor": "white",
        "axes.facecolor": "white",
        "legend.framealpha": 0.9,
        "legend.edgecolor": "0.8",
    })


LIGHT_COLOR = "#2c5f8a"    # Navy
MATTER_COLOR = "#8b6914"   # Dark goldenrod
REFERENCE_COLOR = "#b0b0b0"
CROSSOVER_COLOR = "#c44444"


# ---------------------------------------------------------------------------
# Data loading
# ---------------------------------------------------------------------------

FIGURE_COLUMNS: dict[str, tuple[str, ...]] = {
    "fig3": ("rho_ex", "alpha", "mu_scaled", "theta", "jz_per_emitter"),
    "fig4": ("rho_ex", "light_mean", "jz_mean", "mu_scaled"),
    "fig5": ("rho_ex", "g2", "lin_entropy"),
    "fig6": ("rho_ex", "light_mean", "light_variance", "light_skewness",
             "light_kurtosis", "poisson_skewness", "poisson_kurtosis"),
    "fig6m": ("rho_ex", "matter_mean", "matter_variance", "matter_skewness",
              "matter_kurtosis"),
    "fig7": ("omega_a", "rho_target", "jz_scaled"),
    "tomo": ("nu", "row_m", "row_n", "col_m", "col_n", "value"),
}


def load_sweep(csv_path: Path, figure_id: str) -> pd.DataFrame:
    """Read a sweep CSV (comment lines skipped) and check its columns."""
    if figure_id not in FIGURE_COLUMNS:
        raise SchemaError(
            f"unknown figure id {figure_id!r}; expected one of {', '.join(FIGURE_COLUMNS)}"
        )
    frame = pd.read_csv(csv_path, comment="#")
    for column in FIGURE_COLUMNS[figure_id]:
        if column not in frame.columns:
            raise SchemaError(f"{csv_path}: figure {figure_id} needs column {column!r}")
    return frame


def _crossover(ax):
    ax.axvline(0.5, color=CROSSOVER_COLOR, linewidth=0.8, linestyle=":", alpha=0.7)


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

def fig3_variational(df: pd.DataFrame):
    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5), sharex=True)
    panels = [
        ("alpha", r"$|\alpha|$"),
        ("mu_scaled", r"$(\mu-\omega_c)/g$"),
        ("theta", r"$\theta$"),
        ("jz_per_emitter", r"$\langle J_z\rangle/N$"),
    ]
    for ax, (column, label) in zip(axes.flat, panels):
        ax.plot(df["rho_ex"], df[column], color=LIGHT_COLOR, linewidth=1.2)
        ax.set_ylabel(label)
        _crossover(ax)
    for ax in axes[1]:
        ax.set_xlabel(r"$\rho_{ex}$")
    return fig


def fig4_exact(df: pd.DataFrame):
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.8), sharex=True)
    axes[0].plot(df["rho_ex"], df["light_mean"], color=LIGHT_COLOR)
    axes[0].set_ylabel(r"$\langle a^\dagger a\rangle$")
    axes[1].plot(df["rho_ex"], df["jz_mean"], color=MATTER_COLOR)
    axes[1].set_ylabel(r"$\langle J_z\rangle$")
    axes[2].plot(df["rho_ex"], df["mu_scaled"], color="0.2")
    axes[2].set_ylabel(r"$(\mu-\omega_c)/g$")
    for ax in axes:
        ax.set_xlabel(r"$\rho_{ex}$")
        _crossover(ax)
    return fig


def fig5_correlations(df: pd.DataFrame):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.8), sharex=True)
    axes[0].plot(df["rho_ex"], df["g2"], color=LIGHT_COLOR)
    axes[0].axhline(1.0, color=REFERENCE_COLOR, linewidth=0.8, linestyle="--")
    axes[0].set_ylabel(r"$g^{(2)}(0)$")
    axes[1].plot(df["rho_ex"], df["lin_entropy"], color=MATTER_COLOR)
    axes[1].set_ylabel(r"$S_L$")
    axes[1].set_ylim(0, 1.05)
    for ax in axes:
        ax.set_xlabel(r"$\rho_{ex}$")
        _crossover(ax)
    return fig


def _moment_panels(df: pd.DataFrame, prefix: str, color: str, reference: bool):
    fig, axes = plt.subplots(1, 2, figsize=(10, 3.8), sharex=True)
    ax = axes[0]
    ax.plot(df["rho_ex"], df[f"{prefix}_mean"].abs(), color=color, label=r"$|\lambda_1|$")
    ax.plot(df["rho_ex"], df[f"{prefix}_variance"], color=color, linestyle="--",
            label=r"$\lambda_2$")
    ax.set_yscale("symlog", linthresh=1.0)
    ax.legend(fontsize=8)
    ax = axes[1]
    ax.plot(df["rho_ex"], df[f"{prefix}_skewness"], color=color, label=r"$\lambda_3$")
    ax.plot(df["rho_ex"], df[f"{prefix}_kurtosis"], color=color, linestyle="--",
            label=r"$\lambda_4$")
    if reference:
        ax.plot(df["rho_ex"], df["poisson_skewness"], color=REFERENCE_COLOR,
                label=r"$\lambda_3^{P}$")
        ax.plot(df["rho_ex"], df["poisson_kurtosis"], color=REFERENCE_COLOR, linestyle="--",
                label=r"$\lambda_4^{P}$")
    ax.legend(fontsize=8)
    for ax in axes:
        ax.set_xlabel(r"$\rho_{ex}$")
        _crossover(ax)
    return fig


def fig6_light_moments(df: pd.DataFrame):
    return _moment_panels(df, "light", LIGHT_COLOR, reference=True)


def fig6m_matter_moments(df: pd.DataFrame):
    return _moment_panels(df, "matter", MATTER_COLOR, reference=False)


def fig7_scaling(df: pd.DataFrame):
    fig, ax = plt.subplots(figsize=(6, 4))
    sns.lineplot(data=df, x="omega_a", y="jz_scaled", hue="rho_target",
                 palette="crest", marker="o", markersize=3, ax=ax)
    ax.set_xlabel(r"$\omega_a$")
    ax.set_ylabel(r"$\langle \tilde J_z\rangle$")
    ax.legend(title=r"$\rho_{ex}$", fontsize=8)
    return fig


def tomo_heatmap(df: pd.DataFrame):
    manifolds = sorted(df["nu"].unique())
    fig, axes = plt.subplots(1, len(manifolds), figsize=(3.6 * len(manifolds), 3.4), squeeze=False)
    for ax, nu in zip(axes[0], manifolds):
        block = df[df["nu"] == nu]
        matrix = block.pivot_table(index="row_n", columns="col_n", values="value")
        matrix = matrix.sort_index(ascending=False).sort_index(axis=1, ascending=False)
        sns.heatmap(matrix, cmap="vlag", center=0.0, ax=ax, cbar=ax is axes[0][-1],
                    xticklabels=False, yticklabels=False)
        ax.set_title(rf"$\nu = {nu}$", fontsize=9)
        ax.set_xlabel("")
        ax.set_ylabel("")
    return fig


FIGURES: dict[str, Callable[[pd.DataFrame], plt.Figure]] = {
    "fig3": fig3_variational,
    "fig4": fig4_exact,
    "fig5": fig5_correlations,
    "fig6": fig6_light_moments,
    "fig6m": fig6m_matter_moments,
    "fig7": fig7_scaling,
    "tomo": tomo_heatmap,
}


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def render_plots(csv_path: Path, figure_id: str, out: Path | None = None) -> list[Path]:
    """Render one figure; returns the written PNG and PDF paths."""
    df = load_sweep(csv_path, figure_id)
    stem = out if out is not None else csv_path.with_name(f"{csv_path.stem}_{figure_id}")
    stem.parent.mkdir(parents=True, exist_ok=True)

    setup_style()
    fig = FIGURES[figure_id](df)
    fig.tight_layout()
    written = [stem.with_suffix(".png"), stem.with_suffix(".pdf")]
    fig.savefig(written[0], bbox_inches="tight", metadata={"Software": None})
    fig.savefig(written[1], bbox_inches="tight", metadata={"CreationDate": None, "Creator": None})
    plt.close(fig)
    logger.debug("%s: %s saved", figure_id, stem)
    return written


def main():
    parser = argparse.ArgumentParser(description="Render tc_sweep figures")
    parser.add_argument("csv", type=Path, help="sweep CSV written by tc_sweep")
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES),
                        help="figure id")
    parser.add_argument("--out", type=Path, default=None,
                        help="output stem (default: <csv stem>_<figure>)")
    args = parser.parse_args()

    try:
        for path in render_plots(args.csv, args.figure, args.out):
            print(f"  {path}")
    except (SchemaError, OSError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
