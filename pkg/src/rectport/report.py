"""Text, CSV and JSON rendering of stats, solve and sweep results.

Table output rounds to 3 decimals for eyeballing; csv and json carry a
fixed 6-decimal serialization so that re-parsing reproduces every
number exactly as printed.  Unbounded worsening factors serialize as
the string "inf" in every format.
"""

from __future__ import annotations

import math

from .analysis import Frontier, ReportRow
from .baselines import IdealPoint
from .objectives import ObjectivePair, ReferencePoint
from .solver import SolverResult

__all__ = [
    "OUTPUT_FORMATS",
    "fmt_fixed",
    "stats_report",
    "solve_report",
    "sweep_report",
    "plot_data_csv",
]

OUTPUT_FORMATS = ("table", "csv", "json")

SWEEP_COLUMNS = (
    "method",
    "gain",
    "risk",
    "area",
    "beta1",
    "beta2",
    "beta_norm",
    "improve_factor",
    "worsen_factor",
    "improved_objective",
    "active_positions",
)

PLOT_SERIES = ("ideal", "reference", "rect", "frontier", "area_solution")


def fmt_fixed(value: float, decimals: int = 6) -> str:
    if math.isinf(value):
        return "inf"
    return f"{value:.{decimals}f}"


def _json_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return '"inf"' if math.isinf(value) else fmt_fixed(value)
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _json_object(pairs, indent: int = 0) -> str:
    pad = " " * indent
    inner = ",\n".join(f'{pad}  "{key}": {rendered}' for key, rendered in pairs)
    return "{\n" + inner + "\n" + pad + "}"


def _check_format(fmt: str) -> None:
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"format must be one of {OUTPUT_FORMATS}, got {fmt!r}")


def stats_report(
    n: int,
    periods: int,
    ref: ReferencePoint,
    ideal: IdealPoint,
    fmt: str = "table",
) -> str:
    _check_format(fmt)
    fields = [
        ("n", n),
        ("periods", periods),
        ("gamma_ref", ref.gamma_ref),
        ("gamma_max", ideal.gamma_max),
        ("rho_min", ideal.rho_min),
        ("rho_ref", ref.rho_ref),
    ]
    if fmt == "csv":
        header = ",".join(name for name, _ in fields)
        row = ",".join(str(v) if isinstance(v, int) else fmt_fixed(v) for _, v in fields)
        return header + "\n" + row + "\n"
    if fmt == "json":
        pairs = [(name, _json_value(v)) for name, v in fields]
        return _json_object(pairs) + "\n"
    lines = [f"reference kind: {ref.kind}"]
    for name, v in fields:
        lines.append(f"{name:>10}: {v if isinstance(v, int) else fmt_fixed(v, 3)}")
    return "\n".join(lines) + "\n"


def solve_report(
    labels,
    result: SolverResult,
    start_pair: ObjectivePair,
    start_area: float,
    fmt: str = "table",
) -> str:
    _check_format(fmt)
    metrics = [
        ("gain", result.objective_pair.gain),
        ("risk", result.objective_pair.risk),
        ("area", result.area_value),
        ("iterations", result.iterations),
        ("elapsed_seconds", result.elapsed_seconds),
        ("residual", result.stationarity_residual),
        ("tau", result.tau),
        ("status", result.status),
        ("start_gain", start_pair.gain),
        ("start_risk", start_pair.risk),
        ("start_area", start_area),
    ]
    weights = result.x.x
    if fmt == "csv":
        lines = ["record,label,value"]
        for name, v in metrics:
            rendered = v if isinstance(v, (int, str)) else fmt_fixed(v)
            lines.append(f"metric,{name},{rendered}")
        for label, w in zip(labels, weights):
            lines.append(f"weight,{label},{fmt_fixed(w)}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        summary = _json_object([(name, _json_value(v)) for name, v in metrics], indent=2)
        weight_pairs = [(label, _json_value(float(w))) for label, w in zip(labels, weights)]
        body = _json_object(
            [("summary", summary), ("weights", _json_object(weight_pairs, indent=2))]
        )
        return body + "\n"
    lines = []
    for name, v in metrics:
        if isinstance(v, (int, str)):
            lines.append(f"{name:>15}: {v}")
        else:
            lines.append(f"{name:>15}: {fmt_fixed(v, 6 if name == 'elapsed_seconds' else 3)}")
    lines.append("weights (>= 1e-6):")
    for label, w in zip(labels, weights):
        if w >= 1e-6:
            lines.append(f"{label:>15}: {fmt_fixed(w, 6)}")
    return "\n".join(lines) + "\n"


def _row_values(row: ReportRow):
    return (
        row.method,
        row.gain,
        row.risk,
        row.area_value,
        row.beta1,
        row.beta2,
        row.beta_norm,
        row.improve_factor,
        row.worsen_factor,
        row.improved_objective,
        row.active_positions,
    )


def sweep_report(frontier: Frontier, fmt: str = "table") -> str:
    _check_format(fmt)
    if fmt == "csv":
        lines = [",".join(SWEEP_COLUMNS)]
        for row in frontier.rows:
            cells = []
            for value in _row_values(row):
                cells.append(value if isinstance(value, str) else
                             (str(value) if isinstance(value, int) else fmt_fixed(value)))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        row_objects = []
        for row in frontier.rows:
            pairs = [(col, _json_value(v)) for col, v in zip(SWEEP_COLUMNS, _row_values(row))]
            row_objects.append(_json_object(pairs, indent=4))
        meta = [
            ("reference_kind", _json_value(frontier.ref.kind)),
            ("gamma_ref", _json_value(frontier.ref.gamma_ref)),
            ("rho_ref", _json_value(frontier.ref.rho_ref)),
            ("gamma_max", _json_value(frontier.ideal.gamma_max)),
            ("rho_min", _json_value(frontier.ideal.rho_min)),
            ("degenerate", _json_value(frontier.degenerate)),
            ("rows", "[\n    " + ",\n    ".join(row_objects) + "\n  ]"),
        ]
        return _json_object(meta) + "\n"
    header = (
        f"{'method':<11}{'gain':>8}{'risk':>8}{'area':>8}"
        f"{'beta1':>8}{'beta2':>8}{'|beta|':>8}  improve|worsen  {'impr.':>5}{'#act':>6}"
    )
    lines = [
        f"reference ({frontier.ref.kind}): gamma_ref={fmt_fixed(frontier.ref.gamma_ref, 3)} "
        f"rho_ref={fmt_fixed(frontier.ref.rho_ref, 3)}  "
        f"ideal: gamma_max={fmt_fixed(frontier.ideal.gamma_max, 3)} "
        f"rho_min={fmt_fixed(frontier.ideal.rho_min, 3)}",
        header,
        "-" * len(header),
    ]
    for row in frontier.rows:
        pair = f"{fmt_fixed(row.improve_factor, 3)} | {fmt_fixed(row.worsen_factor, 3)}"
        lines.append(
            f"{row.method:<11}{fmt_fixed(row.gain, 3):>8}{fmt_fixed(row.risk, 3):>8}"
            f"{fmt_fixed(row.area_value, 3):>8}{fmt_fixed(row.beta1, 3):>8}"
            f"{fmt_fixed(row.beta2, 3):>8}{fmt_fixed(row.beta_norm, 3):>8}"
            f"  {pair:>14}  {row.improved_objective:>5}{row.active_positions:>6}"
        )
    return "\n".join(lines) + "\n"


def plot_data_csv(frontier: Frontier) -> str:
    """Plot-ready series in the (risk, gain) plane.

    One header line, then rows (series, risk, gain): the ideal and
    reference points, the four corners of the winning rectangle, every
    sweep solution as the frontier series, and the area solution itself.
    """
    area_rows = [row for row in frontier.rows if row.method == "area"]
    if len(area_rows) != 1:
        raise ValueError("plot data needs exactly one area row")
    area_row = area_rows[0]
    ref = frontier.ref
    ideal = frontier.ideal
    lines = ["series,risk,gain"]

    def add(series: str, risk_value: float, gain_value: float) -> None:
        lines.append(f"{series},{fmt_fixed(risk_value)},{fmt_fixed(gain_value)}")

    add("ideal", ideal.rho_min, ideal.gamma_max)
    add("reference", ref.rho_ref, ref.gamma_ref)
    add("rect", area_row.risk, area_row.gain)
    add("rect", ref.rho_ref, area_row.gain)
    add("rect", ref.rho_ref, ref.gamma_ref)
    add("rect", area_row.risk, ref.gamma_ref)
    for row in frontier.rows:
        if row.method != "area":
            add("frontier", row.risk, row.gain)
    add("area_solution", area_row.risk, area_row.gain)
    return "\n".join(lines) + "\n"
