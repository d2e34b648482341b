"""Text, delimited and figure renderers for engine values.

The verify pipeline writes three artifacts per case: a canonical JSON
report, a delimited (CSV) table of the headline numbers, and matplotlib
figures rendered to files next to them.
"""

from __future__ import annotations

import csv
from typing import Dict, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .mackey import MackeyFunctor  # noqa: E402
from .slices import SliceTable  # noqa: E402
from .zlin import FgModule  # noqa: E402


def module_label(m: FgModule) -> str:
    """Short human label from the invariant factors, e.g. Z, Z/2+Z/4, 0."""
    invs = m.invariant_factors()
    if not invs:
        return "0"
    parts = []
    for d in invs:
        parts.append("Z" if d == 0 else f"Z/{d}")
    return "+".join(parts)


def _matrix_text(mat) -> str:
    if mat.shape[0] == 0 or mat.shape[1] == 0:
        return "[]"
    return "[" + "; ".join(" ".join(str(v) for v in row) for row in mat) + "]"


def lewis_text(m: MackeyFunctor, name: str = "") -> str:
    """Aligned two-level diagram with the three structure maps."""
    rows = [
        ("fix", module_label(m.mfix)),
        ("e", module_label(m.me)),
        ("res", _matrix_text(m.res.matrix)),
        ("tr", _matrix_text(m.tr.matrix)),
        ("w", _matrix_text(m.w.matrix)),
    ]
    width = max(len(k) for k, _ in rows)
    head = [name] if name else []
    return "\n".join(head + [f"  {k.rjust(width)}: {v}" for k, v in rows])


def slice_table_text(t: SliceTable) -> str:
    lines = [f"slice table on [{t.range[0]}, {t.range[1]}]   "
             f"even={t.even} very_even={t.very_even}"]
    for n in sorted(t.entries):
        m = t.entries[n]
        if m.is_zero():
            lines.append(f"rho_{n}: 0")
        else:
            lines.append(f"rho_{n}:")
            lines.append(lewis_text(m))
    return "\n".join(lines)


def write_slice_table_csv(t: SliceTable, path: str):
    """Delimited dump: one row per filtration degree."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["n", "fix_level", "e_level", "zero"])
        for n in sorted(t.entries):
            m = t.entries[n]
            out.writerow([n, module_label(m.mfix), module_label(m.me),
                          int(m.is_zero())])


def write_homology_csv(table: Dict[int, MackeyFunctor], path: str):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["degree", "fix_level", "e_level"])
        for n in sorted(table):
            m = table[n]
            out.writerow([n, module_label(m.mfix), module_label(m.me)])


_FIG_KW = dict(figsize=(7.0, 3.0), dpi=150)


def render_slice_table_figure(t: SliceTable, path: str, title: str = ""):
    """Bar-style chart of the slice table: order (or rank) per degree."""
    degrees = sorted(t.entries)
    heights = []
    labels = []
    for n in degrees:
        m = t.entries[n]
        order = m.order()
        if order is None:
            free = sum(1 for d in m.me.invariant_factors() if d == 0) + \
                sum(1 for d in m.mfix.invariant_factors() if d == 0)
            heights.append(free)
            labels.append(module_label(m.mfix))
        else:
            heights.append(0 if order == 1 else len(
                m.me.invariant_factors()) + len(m.mfix.invariant_factors()))
            labels.append("" if order == 1 else module_label(m.mfix))
    fig, ax = plt.subplots(**_FIG_KW)
    bars = ax.bar(degrees, heights, color="#30618c", width=0.7)
    for rect, lab in zip(bars, labels):
        if lab:
            ax.annotate(lab, (rect.get_x() + rect.get_width() / 2,
                              rect.get_height()),
                        ha="center", va="bottom", fontsize=7)
    ax.set_xlabel("filtration degree n")
    ax.set_ylabel("cyclic summands")
    ax.set_xticks(degrees)
    flags = f"even={t.even}, very even={t.very_even}"
    ax.set_title(title or f"slice invariants ({flags})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_homology_figure(table: Dict[int, MackeyFunctor], path: str,
                           title: str = ""):
    degrees = sorted(table)
    fix_counts = [len(table[n].mfix.invariant_factors()) for n in degrees]
    e_counts = [len(table[n].me.invariant_factors()) for n in degrees]
    fig, ax = plt.subplots(**_FIG_KW)
    ax.plot(degrees, e_counts, "o-", label="underlying level", color="#30618c")
    ax.plot(degrees, fix_counts, "s--", label="fixed level", color="#a63d40")
    ax.set_xlabel("degree")
    ax.set_ylabel("cyclic summands")
    ax.set_xticks(degrees)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
