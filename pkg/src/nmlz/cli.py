"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 refused parameter regime.  Every flag of a subcommand can also be
supplied through ``--config file.json`` (explicit flags win).
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import (CriticalRegime, NmlzError, NoConvergence, Overflow,
                     ParseError, QuadratureFailure, StepLimitExceeded,
                     StepUnderflow, UnknownRecipe)
from . import adiabatic, bdg, catalog, figures, modelio
from .integrability import TwoTimeFamily, TwoTimePath, integrability_residual, \
    path_evolution
from .model import eigenvalue_trace, two_level_model
from .propagate import (PropagationSettings, TransitionTable,
                        scattering_matrix, transition_table)
from .semiclassic import Hs4Params

_NUMERIC_FAILURES = (NoConvergence, StepLimitExceeded, StepUnderflow,
                     QuadratureFailure, Overflow)


@dataclass(frozen=True)
class RunConfig:
    command: str
    options: dict


def _grid(spec, flag):
    """'a:b:n' -> np.linspace(a, b, n)."""
    try:
        lo, hi, num = spec.split(":")
        lo, hi, num = float(lo), float(hi), int(num)
    except ValueError as exc:
        raise ParseError(f"{flag} expects 'start:stop:count', got {spec!r}") \
            from exc
    if num < 1 or hi < lo:
        raise ParseError(f"{flag} grid must be nonempty and increasing")
    return np.linspace(lo, hi, num)


def _sweep_spec(spec):
    """'name=a:b:n' -> (name, grid)."""
    if "=" not in spec:
        raise ParseError(f"--sweep expects 'name=start:stop:count', got {spec!r}")
    name, grid = spec.split("=", 1)
    return name, _grid(grid, "--sweep")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nmlz",
        description="Non-unitary multistate Landau-Zener solver")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with defaults for any flag")
        return p

    p = add("solve", "numeric scattering run for a model file")
    p.add_argument("--model", help="model JSON path")
    p.add_argument("--horizon", type=float)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-10)
    p.add_argument("--out", help="output CSV path")

    p = add("analytic", "closed-form transition tables")
    p.add_argument("--model-kind", choices=["two-level", "n4", "n6"])
    p.add_argument("--g", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--v", type=float, help="relative slope (two-level)")
    p.add_argument("--b1", type=float)
    p.add_argument("--b2", type=float)
    p.add_argument("--E", type=float)
    p.add_argument("--E1", type=float, default=0.0)
    p.add_argument("--E2", type=float, default=0.0)
    p.add_argument("--out")
    p.add_argument("--explain-be", action="store_true",
                   help="diagnose the diagonal closed form for --model/--level")
    p.add_argument("--model", help="model JSON (with --explain-be)")
    p.add_argument("--level", type=int, help="1-based level (with --explain-be)")

    p = add("conservation", "signed conservation-law search on a table CSV")
    p.add_argument("--table", required=False)
    p.add_argument("--column", type=int, help="1-based initial level")
    p.add_argument("--tol", type=float, default=1e-6)

    p = add("dykhne", "semiclassical vs numeric 3->4 sweep")
    p.add_argument("--E1", type=float)
    p.add_argument("--E2", type=float)
    p.add_argument("--g2", type=float, help="coupling squared")
    p.add_argument("--b-inv-grid", help="1/b grid as start:stop:count")
    p.add_argument("--stokes-phase", type=float, default=0.0)
    p.add_argument("--out")

    p = add("check-integrability", "zero-curvature residual on a (t, tau) grid")
    p.add_argument("--family", choices=["hs4"], default="hs4")
    p.add_argument("--b", type=float)
    p.add_argument("--E1", type=float)
    p.add_argument("--E2", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--t-grid", default="-3:3:10")
    p.add_argument("--tau-grid", default="0.5:2:10")
    p.add_argument("--out")

    p = add("path-evolve", "deformed-path evolution for a family")
    p.add_argument("--family", choices=["hs4"], default="hs4")
    p.add_argument("--b", type=float)
    p.add_argument("--E1", type=float)
    p.add_argument("--E2", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--tau", type=float, default=2.0)
    p.add_argument("--horizon", type=float)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-10)
    p.add_argument("--out")

    p = add("dissociate", "pair-production occupations for linear sweeps")
    p.add_argument("--v", type=float, help="relative sweep rate")
    p.add_argument("--g", type=float, help="effective coupling")
    p.add_argument("--horizon", type=float)
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--out")

    p = add("trace", "instantaneous eigenvalue traces")
    p.add_argument("--model")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--samples", type=int, default=801)
    p.add_argument("--out")

    p = add("sweep", "numeric solve over a one-parameter grid")
    p.add_argument("--model-kind", choices=["two-level"], default="two-level")
    p.add_argument("--g", type=float, default=0.5)
    p.add_argument("--v", type=float, default=2.0)
    p.add_argument("--sweep", help="name=start:stop:count")
    p.add_argument("--horizon", type=float)
    p.add_argument("--out")

    p = add("figure", "emit the data behind one reference figure")
    p.add_argument("name")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--grid-points", type=int)
    return parser


def parse_config(argv) -> RunConfig:
    """argv (+ optional --config JSON) -> validated RunConfig."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    options = vars(ns)
    command = options.pop("command")
    config_path = options.pop("config", None)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                defaults = json.load(fh)
        except FileNotFoundError:
            raise
        except json.JSONDecodeError as exc:
            raise ParseError(f"{config_path}: invalid JSON ({exc})") from exc
        if not isinstance(defaults, dict):
            raise ParseError(f"{config_path}: config must be a JSON object")
        unknown = set(defaults) - set(options)
        if unknown:
            raise ParseError(
                f"{config_path}: unknown keys {sorted(unknown)} for "
                f"command {command!r}")
        explicit = _explicit_flags(argv)
        for key, value in defaults.items():
            if key not in explicit:
                options[key] = value
    return RunConfig(command=command, options=options)


def _explicit_flags(argv):
    names = set()
    for token in argv:
        if token.startswith("--"):
            names.add(token[2:].split("=", 1)[0].replace("-", "_"))
    return names


def _require(options, *names):
    missing = [n for n in names if options.get(n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ParseError(f"missing required flag(s): {flags}")


def _settings(options) -> PropagationSettings:
    kwargs = {}
    if options.get("horizon") is not None:
        kwargs["horizon"] = options["horizon"]
    for key in ("rel_tol", "abs_tol"):
        if options.get(key) is not None:
            kwargs[key] = options[key]
    return PropagationSettings(**kwargs)


def _cmd_solve(options):
    _require(options, "model", "out")
    model = modelio.read_model(options["model"])
    table = transition_table(scattering_matrix(model, _settings(options)))
    modelio.write_table(options["out"], table,
                        {"model": options["model"],
                         "horizon": options.get("horizon") or "auto",
                         "rel_tol": options["rel_tol"],
                         "abs_tol": options["abs_tol"]})
    print(f"wrote {options['out']}")


def _analytic_table(options):
    kind = options["model_kind"]
    if kind == "two-level":
        _require(options, "g", "v")
        res = catalog.nlz_two_level(options["g"], options["v"])
        log_p = np.array([[res.log_p11, res.log_p21],
                          [res.log_p21, res.log_p11]])
        return TransitionTable(log_unnormalized=log_p), \
            {"model_kind": kind, "g": options["g"], "v": options["v"]}
    if kind == "n4":
        _require(options, "b1", "b2", "g", "gamma")
        params = catalog.SolvableN4Params(
            b1=options["b1"], b2=options["b2"], E1=options["E1"],
            E2=options["E2"], g=options["g"], gamma=options["gamma"])
        log_p = catalog.log_table_n4(params)
        return TransitionTable(log_unnormalized=log_p), \
            {"model_kind": kind, "b1": options["b1"], "b2": options["b2"],
             "g": options["g"], "gamma": options["gamma"]}
    _require(options, "b1", "b2", "E", "g", "gamma")
    table = catalog.solvable_n6(options["b1"], options["b2"], options["E"],
                                options["g"], options["gamma"])
    with np.errstate(divide="ignore"):
        log_p = np.log(table)
    return TransitionTable(log_unnormalized=log_p), \
        {"model_kind": kind, "b1": options["b1"], "b2": options["b2"],
         "E": options["E"], "g": options["g"], "gamma": options["gamma"]}


def _cmd_analytic(options):
    if options.get("explain_be"):
        return _cmd_explain_be(options)
    _require(options, "model_kind", "out")
    table, meta = _analytic_table(options)
    modelio.write_table(options["out"], table, meta)
    print(f"wrote {options['out']}")


def _cmd_explain_be(options):
    _require(options, "model", "level")
    model = modelio.read_model(options["model"])
    n = options["level"] - 1
    closed = catalog.modified_be_diagonal(model, n)
    contour = adiabatic.be_contour_log_ratio(model, n, radius=1e4)
    quad = adiabatic.contour_quadrature_log_ratio(model, n, radius=200.0)
    print(f"log|S_nn| closed form        : {closed:.12f}")
    print(f"log|S_nn| analytic contour   : {contour:.12f}")
    print(f"log|S_nn| contour quadrature : {quad:.12f} (radius 200)")
    print(f"P~_nn = exp(2 log|S_nn|)     : {math.exp(2 * closed):.12g}")


def _cmd_conservation(options):
    _require(options, "table", "column")
    column = modelio.read_table_column(options["table"], options["column"])
    sig = catalog.conservation_signature(column, options["tol"],
                                         initial=options["column"] - 1)
    if sig is None:
        print("none")
    else:
        signs = " ".join("+1" if s > 0 else "-1" for s in sig.signs)
        print(f"signs: {signs}")
        print(f"residual: {sig.residual:.3e}")


def _cmd_dykhne(options):
    _require(options, "E1", "E2", "g2", "b_inv_grid", "out")
    grid = _grid(options["b_inv_grid"], "--b-inv-grid")
    rows = []
    for inv_b in grid:
        params = Hs4Params(b=1.0 / inv_b, E1=options["E1"], E2=options["E2"],
                           g=math.sqrt(options["g2"]))
        rows.append(figures.dykhne_curve_row(params, options["stokes_phase"]))
    modelio.write_csv(options["out"],
                      ["inv_b", "p34_semiclassical", "p34_numeric", "r",
                       "regime"], rows,
                      {"E1": options["E1"], "E2": options["E2"],
                       "g2": options["g2"],
                       "stokes_phase": options["stokes_phase"]})
    print(f"wrote {options['out']}")


def _hs4_family(options) -> TwoTimeFamily:
    _require(options, "b", "E1", "E2", "g")
    return TwoTimeFamily.for_hs4(Hs4Params(
        b=options["b"], E1=options["E1"], E2=options["E2"], g=options["g"]))


def _cmd_check_integrability(options):
    family = _hs4_family(options)
    t_grid = _grid(options["t_grid"], "--t-grid")
    tau_grid = _grid(options["tau_grid"], "--tau-grid")
    rows = []
    worst = 0.0
    for t in t_grid:
        for tau in tau_grid:
            r = integrability_residual(family, [(t, tau)])
            worst = max(worst, r)
            rows.append([repr(float(t)), repr(float(tau)), repr(r)])
    if options.get("out"):
        modelio.write_csv(options["out"], ["t", "tau", "residual"], rows,
                          {"family": "hs4", "b": options["b"],
                           "E1": options["E1"], "E2": options["E2"],
                           "g": options["g"]})
        print(f"wrote {options['out']}")
    print(f"max residual: {worst:.3e}")


def _cmd_path_evolve(options):
    family = _hs4_family(options)
    from .propagate import default_horizon
    horizon = options.get("horizon") or default_horizon(family.base)
    path = TwoTimePath.rectangle(horizon, options["tau"])
    table = path_evolution(family, path, _settings(options))
    _require(options, "out")
    modelio.write_table(options["out"], table,
                        {"family": "hs4", "tau": options["tau"],
                         "horizon": horizon})
    print(f"wrote {options['out']}")


def _cmd_dissociate(options):
    _require(options, "v", "g", "out")
    system = bdg.symmetric_dissociation(options["v"], options["g"])
    kwargs = {}
    if options.get("horizon") is not None:
        kwargs["horizon"] = options["horizon"]
    obs = bdg.pair_production_run(system, PropagationSettings(**kwargs),
                                  n_samples=options["samples"])
    rows = [[repr(float(t)), repr(float(a)), repr(float(b)), repr(float(d))]
            for t, a, b, d in zip(obs.times, obs.n_a, obs.n_b, obs.difference)]
    modelio.write_csv(options["out"], ["t", "n_a", "n_b", "diff"], rows,
                      {"v": options["v"], "g": options["g"],
                       "final_n_a": obs.final_n_a, "final_n_b": obs.final_n_b})
    print(f"wrote {options['out']}")


def _cmd_trace(options):
    _require(options, "model", "t_min", "t_max", "out")
    model = modelio.read_model(options["model"])
    trace = eigenvalue_trace(model, options["t_min"], options["t_max"],
                             options["samples"])
    modelio.write_trace(options["out"], trace, {"model": options["model"]})
    print(f"wrote {options['out']}")


def _cmd_sweep(options):
    _require(options, "sweep", "out")
    name, grid = _sweep_spec(options["sweep"])
    if name not in ("g", "v"):
        raise ParseError(f"two-level sweep parameter must be g or v, got {name!r}")
    rows = []
    for value in grid:
        g = value if name == "g" else options["g"]
        v = value if name == "v" else options["v"]
        model = two_level_model(g, v)
        table = transition_table(scattering_matrix(model, _settings(options)))
        for row in modelio.table_rows(table):
            rows.append([repr(float(value))] + row)
    modelio.write_csv(options["out"],
                      [name, "from", "to", "p_tilde", "p_normalized",
                       "log_p_tilde"], rows,
                      {"model_kind": "two-level", "sweep": options["sweep"],
                       "g": options["g"], "v": options["v"]})
    print(f"wrote {options['out']}")


def _cmd_figure(options):
    paths = figures.run_figure_recipe(options["name"], options["out_dir"],
                                      options.get("grid_points"))
    for p in paths:
        print(f"wrote {p}")


_COMMANDS = {
    "solve": _cmd_solve,
    "analytic": _cmd_analytic,
    "conservation": _cmd_conservation,
    "dykhne": _cmd_dykhne,
    "check-integrability": _cmd_check_integrability,
    "path-evolve": _cmd_path_evolve,
    "dissociate": _cmd_dissociate,
    "trace": _cmd_trace,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_config(argv)
        _COMMANDS[config.command](config.options)
    except (ParseError, UnknownRecipe, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CriticalRegime as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 4
    except _NUMERIC_FAILURES as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except NmlzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
