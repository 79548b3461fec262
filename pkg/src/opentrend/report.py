"""Deterministic result files: CSV, JSON, the reliability table, and SVG charts.

Every emitted file embeds a provenance line (tool, version, seed, config
hash) so a result can always be traced to the exact configuration that
produced it.  All numeric formatting is fixed, so re-running a configuration
yields byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from opentrend.explain import ShapleyReport
from opentrend.metrics import EvalRecord

RESULTS_HEADER = "market,task,feature_set,classifier,accuracy,mcc,n_train,n_test,effective"

#: plain-language reading of each task's question
TASK_IMPLICATIONS = {
    "op": "open(t+1) > open(t)",
    "hi": "open(t+1) > high(t)",
    "lo": "open(t+1) > low(t)",
    "cl": "open(t+1) > close(t)",
}


@dataclass(frozen=True)
class Provenance:
    seed: int
    config_hash: str
    tool: str = "opentrend"
    version: str = "0.1.0"

    @property
    def comment(self) -> str:
        return f"# provenance: tool={self.tool} version={self.version} seed={self.seed} config={self.config_hash}"

    def as_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "seed": self.seed,
            "config_hash": self.config_hash,
        }

    @classmethod
    def from_comment(cls, line: str) -> "Provenance":
        parts = dict(
            item.split("=", 1) for item in line.lstrip("# ").removeprefix("provenance:").split() if "=" in item
        )
        return cls(
            seed=int(parts.get("seed", 0)),
            config_hash=parts.get("config", ""),
            tool=parts.get("tool", "opentrend"),
            version=parts.get("version", "0.1.0"),
        )


def _metric(x: float) -> str:
    return f"{x:.6f}"


# ---------------------------------------------------------------------------
# results.csv / results.json
# ---------------------------------------------------------------------------


def results_csv(records: list[EvalRecord], provenance: Provenance) -> str:
    lines = [provenance.comment, RESULTS_HEADER]
    for r in records:
        lines.append(
            f"{r.market},{r.task},{r.feature_set},{r.classifier},"
            f"{_metric(r.accuracy)},{_metric(r.mcc)},{r.n_train},{r.n_test},"
            f"{'true' if r.effective else 'false'}"
        )
    return "\n".join(lines) + "\n"


def parse_results_csv(text: str) -> tuple[list[EvalRecord], Provenance]:
    """Read a results.csv back (for the table and chart subcommands)."""
    provenance = Provenance(seed=0, config_hash="")
    records: list[EvalRecord] = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if "provenance:" in stripped:
                provenance = Provenance.from_comment(stripped)
            continue
        if not header_seen:
            if stripped != RESULTS_HEADER:
                raise ValueError(f"line {lineno}: expected header {RESULTS_HEADER!r}, got {stripped!r}")
            header_seen = True
            continue
        parts = stripped.split(",")
        if len(parts) != 9:
            raise ValueError(f"line {lineno}: expected 9 fields, got {len(parts)}")
        records.append(
            EvalRecord(
                market=parts[0],
                task=parts[1],
                feature_set=parts[2],
                classifier=parts[3],
                accuracy=float(parts[4]),
                mcc=float(parts[5]),
                n_train=int(parts[6]),
                n_test=int(parts[7]),
                effective=parts[8] == "true",
            )
        )
    if not header_seen:
        raise ValueError("no results header found")
    return records, provenance


def results_json(
    records: list[EvalRecord],
    shapley: dict[tuple[str, str], ShapleyReport],
    shap_model: str,
    errors: list[tuple[str, str]],
    provenance: Provenance,
    config_text: str,
) -> str:
    blob = {
        "provenance": {**provenance.as_dict(), "config": config_text},
        "records": [
            {
                "market": r.market,
                "task": r.task,
                "feature_set": r.feature_set,
                "classifier": r.classifier,
                "accuracy": r.accuracy,
                "mcc": r.mcc,
                "n_train": r.n_train,
                "n_test": r.n_test,
                "effective": r.effective,
            }
            for r in records
        ],
        "shapley": {
            f"{market}/{task}": {
                "model": shap_model,
                "mode": rep.mode,
                "background_size": rep.background_size,
                "n_rows": len(rep.rows),
                "features": list(rep.feature_names),
                "global_importance": [float(v) for v in rep.global_importance],
            }
            for (market, task), rep in sorted(shapley.items())
        },
        "errors": [{"cell": cell, "message": message} for cell, message in errors],
    }
    return json.dumps(blob, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# shap CSV
# ---------------------------------------------------------------------------


def shap_csv(report: ShapleyReport, provenance: Provenance) -> str:
    lines = [provenance.comment, "feature,importance"]
    for name, value in zip(report.feature_names, report.global_importance):
        lines.append(f"{name},{float(value)!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reliability table (which market/task pairs have an effective cell)
# ---------------------------------------------------------------------------


def table3_text(
    records: list[EvalRecord],
    acc_threshold: float,
    mcc_threshold: float,
    provenance: Provenance,
) -> str:
    """Per (market, task): does any classifier/feature-set cell clear each bar?

    ``acc_ok`` / ``mcc_ok`` report the per-metric bars on their own;
    ``effective`` requires one single cell to clear both at once.
    """
    pairs = sorted({(r.market, r.task) for r in records})
    lines = [
        provenance.comment,
        f"# thresholds: accuracy>={_metric(acc_threshold)} mcc>={_metric(mcc_threshold)}",
        "market,task,implication,acc_ok,mcc_ok,effective",
    ]
    for market, task in pairs:
        cell = [r for r in records if r.market == market and r.task == task]
        acc_ok = any(r.accuracy >= acc_threshold for r in cell)
        mcc_ok = any(r.mcc >= mcc_threshold for r in cell)
        eff = any(r.accuracy >= acc_threshold and r.mcc >= mcc_threshold for r in cell)
        implication = TASK_IMPLICATIONS.get(task, "")
        lines.append(
            f"{market},{task},{implication},"
            f"{'yes' if acc_ok else 'no'},{'yes' if mcc_ok else 'no'},{'yes' if eff else 'no'}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SVG charts
# ---------------------------------------------------------------------------

_R_MIN = 3.0
_R_MAX = 18.0
_CELL = 46.0
_LEFT = 130.0
_TOP = 60.0
_LIGHT = (222, 235, 247)
_DARK = (8, 48, 107)


def _norm(metric: str, value: float) -> float:
    x = value if metric == "accuracy" else (value + 1.0) / 2.0
    return min(max(x, 0.0), 1.0)


def _color(t: float) -> str:
    rgb = tuple(round(l + (d - l) * t) for l, d in zip(_LIGHT, _DARK))
    return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def bubble_chart_svg(
    records: list[EvalRecord],
    market: str,
    task: str,
    metric: str,
    provenance: Provenance,
    classifiers: list[str] | None = None,
    feature_sets: list[str] | None = None,
) -> str:
    """Classifier x feature-set bubble grid; radius and darkness grow with the metric."""
    if metric not in ("accuracy", "mcc"):
        raise ValueError(f"unknown chart metric {metric!r}")
    cell = [r for r in records if r.market == market and r.task == task]
    xs = classifiers or sorted({r.classifier for r in cell})
    ys = feature_sets or sorted({r.feature_set for r in cell})
    by_key = {(r.classifier, r.feature_set): r for r in cell}
    width = _LEFT + _CELL * len(xs) + 40.0
    height = _TOP + _CELL * len(ys) + 110.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f"<!-- {_esc(provenance.comment.lstrip('# '))} -->",
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{_LEFT:.1f}" y="24" font-family="sans-serif" font-size="15" font-weight="bold">'
        f"{_esc(market)} / {_esc(task)} — {metric}</text>",
    ]
    for i, name in enumerate(xs):
        x = _LEFT + _CELL * (i + 0.5)
        parts.append(
            f'<text x="{x:.1f}" y="{_TOP - 10:.1f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="middle">{_esc(name)}</text>'
        )
    for j, name in enumerate(ys):
        y = _TOP + _CELL * (j + 0.5)
        parts.append(
            f'<text x="{_LEFT - 8:.1f}" y="{y + 4:.1f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_esc(name)}</text>'
        )
    for j, fs in enumerate(ys):
        for i, clf in enumerate(xs):
            record = by_key.get((clf, fs))
            if record is None:
                continue  # empty grid position stays blank
            value = record.accuracy if metric == "accuracy" else record.mcc
            t = _norm(metric, value)
            radius = _R_MIN + (_R_MAX - _R_MIN) * t
            x = _LEFT + _CELL * (i + 0.5)
            y = _TOP + _CELL * (j + 0.5)
            parts.append(
                f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{radius:.2f}" fill="{_color(t)}" '
                f'stroke="#333" stroke-width="0.5"><title>{_esc(clf)} / {_esc(fs)}: '
                f"{value:.6f}</title></circle>"
            )
    legend_y = _TOP + _CELL * len(ys) + 40.0
    lo_label = "0.0" if metric == "accuracy" else "-1.0"
    hi_label = "1.0"
    parts.append(
        f'<text x="{_LEFT:.1f}" y="{legend_y - 14:.1f}" font-family="sans-serif" font-size="11">'
        f"{metric}: radius and darkness grow from {lo_label} to {hi_label}</text>"
    )
    for idx, t in enumerate((0.0, 0.5, 1.0)):
        radius = _R_MIN + (_R_MAX - _R_MIN) * t
        x = _LEFT + 30.0 + 70.0 * idx
        label = lo_label if idx == 0 else ("0.5" if metric == "accuracy" else "0.0") if idx == 1 else hi_label
        parts.append(
            f'<circle cx="{x:.1f}" cy="{legend_y + 10:.1f}" r="{radius:.2f}" fill="{_color(t)}" '
            f'stroke="#333" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{legend_y + 42:.1f}" font-family="sans-serif" font-size="10" '
            f'text-anchor="middle">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def shap_bar_svg(report: ShapleyReport, title: str, provenance: Provenance) -> str:
    """Horizontal bar chart of mean |phi| per feature, largest on top."""
    order = sorted(range(len(report.feature_names)), key=lambda j: (-report.global_importance[j], j))
    peak = float(max(np.max(report.global_importance), 1e-12))
    bar_h = 18.0
    width = 560.0
    height = 70.0 + bar_h * 1.4 * len(order)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f"<!-- {_esc(provenance.comment.lstrip('# '))} -->",
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="20" y="26" font-family="sans-serif" font-size="14" font-weight="bold">'
        f"{_esc(title)} — mean |phi| ({_esc(report.mode)}, background {report.background_size})</text>",
    ]
    for row, j in enumerate(order):
        value = float(report.global_importance[j])
        y = 50.0 + bar_h * 1.4 * row
        bar = 360.0 * value / peak
        parts.append(
            f'<text x="110" y="{y + bar_h - 5:.1f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_esc(report.feature_names[j])}</text>'
        )
        parts.append(
            f'<rect x="120" y="{y:.1f}" width="{bar:.2f}" height="{bar_h:.0f}" fill="{_color(0.75)}"/>'
        )
        parts.append(
            f'<text x="{126 + bar:.1f}" y="{y + bar_h - 5:.1f}" font-family="sans-serif" '
            f'font-size="10">{value:.6g}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
