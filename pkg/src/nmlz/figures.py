"""Curated data recipes for the reference figures.

Each recipe bakes in the published parameter set and emits plot-ready CSV
(numeric and analytic columns side by side where both exist).  Parameters
are code constants on purpose: the acceptance suite pins them.
"""

import math
import os

import numpy as np

from .errors import CriticalRegime, UnknownRecipe
from .catalog import normalize, solvable_n6, solvable_n6_model
from .model import eigenvalue_trace, two_level_model
from .modelio import write_csv, write_trace
from .propagate import PropagationSettings, scattering_matrix, transition_table
from .semiclassic import Hs4Params, classify_regime, hs4_model, \
    log_p34_composed


def _trace_recipe(model, t_min, t_max, samples, out_path, metadata):
    trace = eigenvalue_trace(model, t_min, t_max, samples)
    write_trace(out_path, trace, metadata)
    return [out_path]


def fig1(out_dir, grid_points=601):
    """Two-level eigenvalue traces, Hermitian vs anti-Hermitian coupling."""
    paths = []
    for flavor in ("hermitian", "antihermitian"):
        model = two_level_model(0.5, 2.0, flavor)
        path = os.path.join(out_dir, f"fig1_{flavor}.csv")
        paths += _trace_recipe(model, -3.0, 3.0, grid_points, path,
                               {"g": 0.5, "relative_slope": 2.0,
                                "hermiticity": flavor})
    return paths


def fig3a(out_dir, grid_points=2001):
    """Six-level eigenvalue traces with four nonreal windows."""
    model = solvable_n6_model(0.1, 0.2, 2.0, 0.2, 0.3)
    path = os.path.join(out_dir, "fig3a_trace.csv")
    return _trace_recipe(model, -35.0, 35.0, grid_points, path,
                         {"E": 2.0, "b1": 0.1, "b2": 0.2, "g": 0.2,
                          "gamma": 0.3})


FIG3B = dict(E=2.2, b1=0.3, b2=1.6, g=0.3, gamma=0.3)


def fig3b(out_dir, grid_points=None):
    """Normalized transitions out of level 1: analytic vs numeric."""
    p = FIG3B
    analytic, _ = normalize(solvable_n6(p["b1"], p["b2"], p["E"], p["g"],
                                        p["gamma"]))
    model = solvable_n6_model(p["b1"], p["b2"], p["E"], p["g"], p["gamma"])
    table = transition_table(scattering_matrix(
        model, PropagationSettings(horizon=60.0, rel_tol=1e-10, abs_tol=1e-10)))
    numeric = table.normalized
    rows = []
    for m in range(6):
        rows.append([m + 1, repr(float(analytic[m, 0])),
                     repr(float(numeric[m, 0])),
                     repr(float(abs(analytic[m, 0] - numeric[m, 0])))])
    path = os.path.join(out_dir, "fig3b.csv")
    write_csv(path, ["to", "p_analytic", "p_numeric", "abs_diff"], rows, p)
    return [path]


def fig4a(out_dir, grid_points=1201):
    """Eigenvalue traces of the two-parallel-pair model near its crossings."""
    model = hs4_model(Hs4Params(b=1.0, E1=0.25, E2=0.25, g=0.05))
    path = os.path.join(out_dir, "fig4a_trace.csv")
    return _trace_recipe(model, -1.2, 1.2, grid_points, path,
                         {"E1": 0.25, "E2": 0.25, "g": 0.05, "b": 1.0})


def fig4c(out_dir, grid_points=None):
    """Normalized column-3 transitions for two level separations."""
    paths = []
    for e2 in (2.0, 3.0):
        model = hs4_model(Hs4Params(b=2.0, E1=1.0, E2=e2, g=2.0))
        table = transition_table(scattering_matrix(
            model, PropagationSettings(horizon=60.0, rel_tol=1e-9,
                                       abs_tol=1e-9)))
        norm = table.normalized
        rows = [[m + 1, repr(float(norm[m, 2]))] for m in range(4)]
        path = os.path.join(out_dir, f"fig4c_E2_{e2:g}.csv")
        write_csv(path, ["to", "p_normalized_from_3"], rows,
                  {"b": 2.0, "g": 2.0, "E1": 1.0, "E2": e2})
        paths.append(path)
    return paths


FIG4D_G2 = (1.0, 2.0 * math.sqrt(2.0), 4.0, 9.0, 16.0)


def fig4d(out_dir, grid_points=50):
    """Unnormalized 3 -> 4 probability vs 1/b: semiclassics and numerics."""
    paths = []
    inv_b = np.linspace(0.1, 1.0, grid_points)
    for g2 in FIG4D_G2:
        rows = []
        for ib in inv_b:
            params = Hs4Params(b=1.0 / ib, E1=2.0, E2=2.0, g=math.sqrt(g2))
            rows.append(dykhne_curve_row(params))
        path = os.path.join(out_dir, f"fig4d_g2_{g2:.4g}.csv")
        write_csv(path, ["inv_b", "p34_semiclassical", "p34_numeric", "r",
                         "regime"], rows,
                  {"E1": 2.0, "E2": 2.0, "g2": g2, "grid_points": grid_points})
        paths.append(path)
    return paths


def dykhne_curve_row(params: Hs4Params, stokes_phase=0.0,
                     settings=None) -> list:
    """One sweep row: semiclassical and numeric p34 at these parameters."""
    regime = classify_regime(params.r)
    try:
        log_sc = log_p34_composed(params, stokes_phase)
    except CriticalRegime:
        log_sc = math.nan
    log_num = numeric_log_p34(params, settings)
    return [repr(1.0 / params.b), repr(_from_log(log_sc)),
            repr(_from_log(log_num)), repr(params.r), regime]


def numeric_log_p34(params: Hs4Params, settings=None) -> float:
    """Propagator log P~(3 -> 4) for the two-parallel-pair model."""
    from .propagate import propagate_column
    if settings is None:
        horizon = max(40.0, 60.0 / math.sqrt(params.b)) \
            + 2.0 * params.E2 / params.b
        settings = PropagationSettings(horizon=horizon, rel_tol=1e-8,
                                       abs_tol=1e-8)
    model = hs4_model(params)
    column = propagate_column(model, 2, settings)
    return float(column.log_probabilities[3])


def _from_log(log_value):
    if math.isnan(log_value):
        return math.nan
    return math.exp(log_value) if log_value <= 700.0 else math.inf


RECIPES = {
    "fig1": fig1,
    "fig3a": fig3a,
    "fig3b": fig3b,
    "fig4a": fig4a,
    "fig4c": fig4c,
    "fig4d": fig4d,
}


def run_figure_recipe(name, out_dir=".", grid_points=None):
    """Emit the CSV data behind one reference figure; returns written paths."""
    try:
        recipe = RECIPES[name]
    except KeyError:
        raise UnknownRecipe(
            f"unknown recipe {name!r}; available: {sorted(RECIPES)}") from None
    os.makedirs(out_dir, exist_ok=True)
    if grid_points is None:
        return recipe(out_dir)
    return recipe(out_dir, grid_points=grid_points)
