"""Render qwblow CSV outputs into deterministic publication-style figures.

Five figure kinds, one per emitting schema:

  lifespan_trend  <- sweep CSV      (epsilon,T_num,eps_ln_T,tau0_ref,dr,cause)
  fan             <- profile CSV    (s,q,V,dqV,d2qV,dsq)
  profile         <- profile CSV    (s,q,V,dqV,d2qV,dsq)
  scaling         <- ja-probe CSV   (t,supJa)
  monitors        <- run CSV        (t,max_abs_w1,max_abs_w2,min_c2,A,B,C,D)

Headers are validated exactly; a mismatch reports the offending column.
Rendering is a pure function of the inputs: fixed backend, fixed layout,
fixed metadata, so identical CSVs produce identical image bytes.
"""

from __future__ import annotations

import csv
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FIGURE_KINDS", "SchemaError", "render"]

FIGURE_KINDS = ("lifespan_trend", "fan", "profile", "scaling", "monitors")

_SCHEMAS = {
    "lifespan_trend": ["epsilon", "T_num", "eps_ln_T", "tau0_ref", "dr", "cause"],
    "fan": ["s", "q", "V", "dqV", "d2qV", "dsq"],
    "profile": ["s", "q", "V", "dqV", "d2qV", "dsq"],
    "scaling": ["t", "supJa"],
    "monitors": ["t", "max_abs_w1", "max_abs_w2", "min_c2", "A", "B", "C", "D"],
}

_SAVEFIG = dict(dpi=130, metadata={"Software": "qwblow-report"})


class SchemaError(ValueError):
    """Input CSV header does not match the emitting module's schema."""


def _load(path: str, kind: str):
    expected = _SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {','.join(expected)}")
        if header != expected:
            for i, name in enumerate(expected):
                if i >= len(header) or header[i] != name:
                    got = header[i] if i < len(header) else "<missing>"
                    raise SchemaError(
                        f"{path}: column {i + 1} is {got!r}, expected {name!r} "
                        f"(schema {','.join(expected)})")
            raise SchemaError(f"{path}: trailing columns beyond {','.join(expected)}")
        rows = [row for row in reader if row]
    cols = {name: [] for name in expected}
    for row in rows:
        for name, cell in zip(expected, row):
            cols[name].append(cell)
    return cols


def _floats(cells, allow_blank=False):
    out = []
    for cell in cells:
        if cell == "" and allow_blank:
            out.append(math.nan)
        else:
            out.append(float(cell))
    return np.asarray(out)


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    return fig, ax


def _render_lifespan_trend(cols, out_path, tau0=None):
    eps = _floats(cols["epsilon"])
    eln = _floats(cols["eps_ln_T"], allow_blank=True)
    tau_ref = _floats(cols["tau0_ref"]) if cols["tau0_ref"] else np.array([])
    if tau0 is None:
        tau0 = float(tau_ref[0]) if tau_ref.size else 1.0
    fig, ax = _new_axes("lifespan trend", r"$\varepsilon$", r"$\varepsilon \, \ln T_\ast$")
    ax.axhline(tau0, color="#888888", lw=1.2, ls="--", label=r"$\tau_0$")
    good = ~np.isnan(eln)
    if np.any(good):
        ax.plot(eps[good], eln[good], "o-", color="#1f5fa8", ms=6, label="measured")
    missing = np.isnan(eln)
    for e in eps[missing]:
        ax.axvline(e, color="#c44e52", lw=0.8, ls=":", alpha=0.8)
    if np.any(missing):
        ax.plot([], [], ls=":", color="#c44e52", label="no blowup detected")
    if eps.size:
        ax.set_xlim(0.0, float(np.max(eps)) * 1.15)
    ax.legend(loc="best", frameon=False)
    fig.savefig(out_path, **_SAVEFIG)
    plt.close(fig)


def _render_fan(cols, out_path, tau0=None):
    s = _floats(cols["s"])
    q = _floats(cols["q"])
    dsq = _floats(cols["dsq"])
    M = float(q[-1]) if q.size else 1.0
    rho0 = float(s[np.argmin(dsq)]) if s.size else 0.0
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    # left: idealized light-cone geometry with the monitored strip
    t_line = np.linspace(0.0, 6.0, 2)
    for lam in np.linspace(rho0 - 1.0, M, 7):
        ax1.plot(t_line + lam, t_line, color="#1f5fa8", lw=0.8)
    for mu in np.linspace(2.0, 8.0, 4):
        ax1.plot(mu - t_line, t_line, color="#55a868", lw=0.8, ls="--")
    ax1.fill_betweenx(t_line, t_line + rho0 - 1.0, t_line + M, color="#1f5fa8", alpha=0.12)
    ax1.set_xlim(0.0, 9.0)
    ax1.set_ylim(0.0, 6.0)
    ax1.set_xlabel("r")
    ax1.set_ylabel("t")
    ax1.set_title("characteristic families and strip")
    # right: the measured fan, straight segments from (s, 0) to (q, 1)
    stride = max(1, s.size // 80)
    for sj, qj in zip(s[::stride], q[::stride]):
        ax2.plot([sj, qj], [0.0, 1.0], color="#1f5fa8", lw=0.7, alpha=0.85)
    ax2.set_xlabel("q")
    ax2.set_ylabel(r"$\tau$ (normalized)")
    ax2.set_title("fan: converging characteristics")
    for ax in (ax1, ax2):
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(out_path, **_SAVEFIG)
    plt.close(fig)


def _render_profile(cols, out_path, tau0=None):
    q = _floats(cols["q"])
    V = _floats(cols["V"])
    dqV = _floats(cols["dqV"])
    d2qV = _floats(cols["d2qV"])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 5.4), sharex=True)
    ax1.plot(q, V, color="#1f5fa8", lw=1.4, label="V")
    ax1.plot(q, dqV, color="#55a868", lw=1.1, label=r"$\partial_q V$")
    ax1.legend(loc="best", frameon=False)
    ax1.set_ylabel("profile")
    finite = np.isfinite(d2qV)
    ax2.plot(q[finite], d2qV[finite], color="#c44e52", lw=1.1)
    ax2.set_ylabel(r"$\partial_q^2 V$")
    ax2.set_xlabel("q")
    for ax in (ax1, ax2):
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(out_path, **_SAVEFIG)
    plt.close(fig)


def _render_scaling(cols, out_path, tau0=None):
    t = _floats(cols["t"])
    sup = _floats(cols["supJa"])
    fig, ax = _new_axes("interior residual scaling", "1 + t", r"$\sup_r |J_a|$")
    pos = (t > -1.0) & (sup > 0.0)
    ax.loglog(1.0 + t[pos], sup[pos], "o", color="#1f5fa8", ms=5)
    if np.count_nonzero(pos) >= 2:
        coef = np.polyfit(np.log(1.0 + t[pos]), np.log(sup[pos]), 1)
        tt = np.linspace(np.log(1.0 + t[pos].min()), np.log(1.0 + t[pos].max()), 50)
        ax.loglog(np.exp(tt), np.exp(coef[1] + coef[0] * tt), "-", color="#c44e52",
                  lw=1.0, label=f"slope {coef[0]:.2f}")
        ax.legend(loc="best", frameon=False)
    fig.savefig(out_path, **_SAVEFIG)
    plt.close(fig)


def _render_monitors(cols, out_path, tau0=None):
    t = _floats(cols["t"])
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.0), sharex=True)
    panels = (
        (axes[0, 0], [("max_abs_w1", "#c44e52"), ("max_abs_w2", "#55a868")], "max |w1|, |w2|", "log"),
        (axes[0, 1], [("min_c2", "#1f5fa8")], "min c^2", "linear"),
        (axes[1, 0], [("A", "#1f5fa8"), ("B", "#55a868")], "A, B", "linear"),
        (axes[1, 1], [("C", "#c44e52"), ("D", "#8172b2")], "C, D", "linear"),
    )
    for ax, series, title, yscale in panels:
        for name, color in series:
            vals = _floats(cols[name])
            if yscale == "log":
                keep = vals > 0
                ax.semilogy(t[keep], vals[keep], color=color, lw=1.1, label=name)
            else:
                ax.plot(t, vals, color=color, lw=1.1, label=name)
        ax.set_title(title)
        ax.legend(loc="best", frameon=False, fontsize=8)
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
    axes[1, 0].set_xlabel("t")
    axes[1, 1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(out_path, **_SAVEFIG)
    plt.close(fig)


_RENDERERS = {
    "lifespan_trend": _render_lifespan_trend,
    "fan": _render_fan,
    "profile": _render_profile,
    "scaling": _render_scaling,
    "monitors": _render_monitors,
}


def render(kind: str, input_csv: str, out_path: str, tau0: float | None = None) -> str:
    """Render one figure job; returns out_path."""
    if kind not in FIGURE_KINDS:
        raise SchemaError(f"unknown figure kind {kind!r}, expected one of {FIGURE_KINDS}")
    cols = _load(input_csv, kind)
    _RENDERERS[kind](cols, out_path, tau0=tau0)
    return out_path
