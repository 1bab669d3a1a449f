"""Render figure recipes to image files.

Rendering is read-only with respect to its inputs and deterministic:
the Agg backend, a pinned figure geometry, and timestamp-free save
options make repeated renders of the same recipe byte-identical.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotkit"

import matplotlib.pyplot as plt

from .csvio import PlotInputError, read_sidecar, read_table
from .recipes import FigureRecipe

_FIGSIZE = (7.0, 4.5)
_DPI = 120

_INTERACTION_WORDS = {
    "full": "full coupling",
    "jc": "corotating only",
    "ajc": "counterrotating only",
    "none": "no coupling",
}


def _rabi_period(meta: dict, source) -> float:
    # time axes are drawn in units of the coherent exchange period pi/g
    try:
        g = float(meta["g"])
    except (KeyError, ValueError):
        raise PlotInputError(f"{source}.meta: needs a numeric 'g' to scale the time axis")
    if g <= 0:
        raise PlotInputError(f"{source}.meta: 'g' must be positive")
    return math.pi / g


def _curve_label(meta: dict, source) -> str:
    word = _INTERACTION_WORDS.get(meta.get("terms.interaction", ""))
    return word if word is not None else str(source)


def _rate_label(meta: dict) -> str:
    parts = []
    for key, symbol in (("gamma", "$\\gamma$"), ("gamma_phi", "$\\gamma_\\phi$"), ("kappa", "$\\kappa$")):
        if key in meta:
            parts.append(f"{symbol}={float(meta[key]):g}")
    return ", ".join(parts) if parts else "run"


def _save(fig, output):
    output.parent.mkdir(parents=True, exist_ok=True)
    kwargs = {}
    suffix = output.suffix.lower()
    if suffix == ".svg":
        kwargs["metadata"] = {"Date": None}
    elif suffix == ".pdf":
        kwargs["metadata"] = {"CreationDate": None}
    fig.savefig(output, dpi=_DPI, **kwargs)
    plt.close(fig)


def _trajectory_pair(recipe: FigureRecipe) -> None:
    fig, (ax_w, ax_n) = plt.subplots(
        2, 1, sharex=True, figsize=_FIGSIZE, dpi=_DPI, constrained_layout=True
    )
    for path in recipe.inputs:
        table = read_table(path, ("t", "w_e", "n_ph"))
        meta = read_sidecar(path)
        x = table["t"] / _rabi_period(meta, path)
        label = _curve_label(meta, path)
        ax_w.plot(x, table["w_e"] - table["w_e"][0], lw=0.8, label=label)
        ax_n.plot(x, table["n_ph"] - table["n_ph"][0], lw=0.8, label=label)
    ax_w.set_ylabel(r"$\Delta w_e$")
    ax_n.set_ylabel(r"$\Delta n_{ph}$")
    ax_n.set_xlabel(r"$t/T_R$")
    if len(recipe.inputs) > 1:
        ax_w.legend(loc="upper left", fontsize="small")
    if recipe.title:
        ax_w.set_title(recipe.title)
    _save(fig, recipe.output)


def _sweep_envelope(recipe: FigureRecipe) -> None:
    path = recipe.inputs[0]
    table = read_table(path, ("axis_value", "w_e_min", "w_e_max"))
    try:
        axis = read_sidecar(path).get("sweep.axis", "Omega")
    except PlotInputError:
        axis = "Omega"  # sidecar is optional here; the x column is self-contained
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI, constrained_layout=True)
    x = table["axis_value"]
    # markers keep one-row tables visible; NaN rows (breached points) leave gaps
    ax.plot(x, table["w_e_max"], "o-", ms=3, lw=1.0, color="tab:red", label=r"$w_e$ max")
    ax.plot(x, table["w_e_min"], "s-", ms=3, lw=1.0, color="tab:blue", label=r"$w_e$ min")
    ax.set_xlabel(r"$\Omega/\omega_0$" if axis == "Omega" else axis)
    ax.set_ylabel(r"$w_e$")
    ax.legend(loc="upper right", fontsize="small")
    if recipe.title:
        ax.set_title(recipe.title)
    _save(fig, recipe.output)


def _decoherence_overlay(recipe: FigureRecipe) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI, constrained_layout=True)
    for path in recipe.inputs:
        table = read_table(path, ("t", "w_e"))
        meta = read_sidecar(path)
        x = table["t"] / _rabi_period(meta, path)
        ax.plot(x, table["w_e"], lw=0.8, label=_rate_label(meta))
    ax.set_xlabel(r"$t/T_R$")
    ax.set_ylabel(r"$w_e$")
    ax.legend(loc="upper right", fontsize="small")
    if recipe.title:
        ax.set_title(recipe.title)
    _save(fig, recipe.output)


_RENDERERS = {
    "trajectory-pair": _trajectory_pair,
    "sweep-envelope": _sweep_envelope,
    "decoherence-overlay": _decoherence_overlay,
}


def render(recipe: FigureRecipe):
    """Draw the recipe and return the written image path."""
    _RENDERERS[recipe.kind](recipe)
    return recipe.output
