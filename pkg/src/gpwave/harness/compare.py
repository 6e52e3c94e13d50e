from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..series import TimeSeries

REPORT_COLUMNS = ("t", "q_var", "mean_x_pde", "abs_err_x", "half_sigma_var", "var_x_pde", "abs_err_var")


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    rows: TimeSeries
    summary: dict
    c_int: float | None = None
    meta: dict = field(default_factory=dict)


def compare(var_series: TimeSeries, pde_series: TimeSeries, c_int: float | None = None) -> ComparisonReport:
    """Align a variational run (``q``, ``sigma``) with a PDE run (``mean_x``, ``var_x``).

    Both series are clipped to their common time range and the finer one is
    linearly interpolated onto the coarser time base.
    """
    tv, tp = var_series.t, pde_series.t
    lo, hi = max(tv[0], tp[0]), min(tv[-1], tp[-1])
    if hi < lo:
        raise ValueError(f"time ranges do not overlap: [{tv[0]}, {tv[-1]}] vs [{tp[0]}, {tp[-1]}]")
    slack = 1e-12 * max(1.0, abs(hi))
    inside_v = (tv >= lo - slack) & (tv <= hi + slack)
    inside_p = (tp >= lo - slack) & (tp <= hi + slack)
    base = tv[inside_v] if inside_v.sum() <= inside_p.sum() else tp[inside_p]

    q = np.interp(base, tv, var_series["q"])
    half_sigma = 0.5 * np.interp(base, tv, var_series["sigma"])
    mean_x = np.interp(base, tp, pde_series["mean_x"])
    var_x = np.interp(base, tp, pde_series["var_x"])
    rows = TimeSeries({
        "t": base, "q_var": q, "mean_x_pde": mean_x, "abs_err_x": np.abs(q - mean_x),
        "half_sigma_var": half_sigma, "var_x_pde": var_x, "abs_err_var": np.abs(half_sigma - var_x),
    })
    summary = {
        "max_abs_err_x": float(rows["abs_err_x"].max()),
        "max_abs_err_var": float(rows["abs_err_var"].max()),
        "max_rel_err_var": float(np.max(rows["abs_err_var"] / np.abs(var_x))),
        "n_rows": len(rows),
    }
    return ComparisonReport(rows, summary, c_int)
