"""Command-line front end.

Commands
--------
price <config.yaml>     value a single contract (transform, Monte Carlo or both)
greeks <config.yaml>    contour Delta/Gamma with finite-difference cross-checks
table <1..5>            reproduce a reference valuation grid as CSV
validate <config.yaml>  schema + parameter + contour feasibility check

Exit codes: 0 success, 1 usage/config error, 2 numerical non-convergence,
3 tolerance breach in table mode. Machine-readable output is CSV with a
'#'-prefixed metadata header; the body is byte-stable for a given config and
seed (timestamps only ever appear in the header). QVPRICER_OUTPUT_DIR sets
the default output directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np
import yaml

from . import montecarlo
from .core import (Contour, Garch, Heston, MarketState, RatesSpec,
                   ThreeHalves, validate_model)
from .errors import QvPricerError, SchemaError
from .payoffs import (DoubleDigitalCall, TvoCall, TvoPut, VanillaCall,
                      VanillaPut, VolCappedCall, VolStruckCall)
from .pricer import (QuadConfig, choose_contour, delta, digital_call_price,
                     gamma, price, variance_sensitivity)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_TOLERANCE = 3

_MODEL_KINDS = {
    "heston": (Heston, ("kappa", "theta", "epsilon", "rho")),
    "three_halves": (ThreeHalves, ("kappa", "theta", "epsilon", "rho")),
    "garch": (Garch, ("theta", "epsilon")),
}
_CONTRACT_KINDS = {
    "tvo_call": (TvoCall, ("target_vol", "strike", "maturity")),
    "tvo_put": (TvoPut, ("target_vol", "strike", "maturity")),
    "double_digital_call": (DoubleDigitalCall,
                            ("asset_strike", "variance_strike", "maturity")),
    "vol_capped_call": (VolCappedCall, ("strike", "vol_lo", "vol_hi", "maturity")),
    "vol_struck_call": (VolStruckCall, ("notional", "maturity")),
    "vanilla_call": (VanillaCall, ("strike", "maturity")),
    "vanilla_put": (VanillaPut, ("strike", "maturity")),
}
_MARKET_FIELDS = ("spot", "variance", "accrued_variance", "time")
_RATES_FIELDS = ("risk_free", "dividend_yield")
_QUAD_FIELDS = ("rel_tol", "abs_tol", "max_halfwidth", "initial_panels",
                "max_refinements", "initial_span")
_MC_FIELDS = ("paths", "steps_per_year", "seed", "floor_policy")


@dataclass
class RunConfig:
    model: object
    rates: RatesSpec
    market: MarketState
    contract: object
    method: str
    quad: QuadConfig
    mc_paths: int
    mc_steps_per_year: int
    mc_seed: int
    mc_floor: str
    contour: Contour | None


def _tagged_block(block, registry, section):
    if not isinstance(block, dict):
        raise SchemaError(f"[{section}] must be a mapping")
    if "kind" not in block:
        raise SchemaError(f"[{section}] requires a 'kind' field")
    kind = block["kind"]
    if kind not in registry:
        raise SchemaError(f"[{section}] unknown kind {kind!r}; "
                          f"expected one of {sorted(registry)}")
    cls, fields = registry[kind]
    unknown = set(block) - set(fields) - {"kind"}
    if unknown:
        raise SchemaError(f"[{section}] unknown field(s) {sorted(unknown)} "
                          f"for kind {kind!r}")
    missing = [f for f in fields if f not in block
               and f not in ("rho",)]  # rho defaults to 0
    if missing:
        raise SchemaError(f"[{section}] missing field(s) {missing}")
    kwargs = {f: float(block[f]) for f in fields if f in block}
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"[{section}] {exc}") from exc


def _plain_block(block, fields, section, required=True):
    block = {} if block is None else block
    if not isinstance(block, dict):
        raise SchemaError(f"[{section}] must be a mapping")
    unknown = set(block) - set(fields)
    if unknown:
        raise SchemaError(f"[{section}] unknown field(s) {sorted(unknown)}")
    if required:
        missing = [f for f in fields if f not in block]
        if missing:
            raise SchemaError(f"[{section}] missing field(s) {missing}")
    return block


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise SchemaError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("config must be a mapping of sections")
    known = {"model", "rates", "market", "contract", "method", "quadrature",
             "montecarlo", "contour"}
    unknown = set(doc) - known
    if unknown:
        raise SchemaError(f"unknown section(s) {sorted(unknown)}")
    for req in ("model", "market", "contract"):
        if req not in doc:
            raise SchemaError(f"missing [{req}] section")

    model = _tagged_block(doc["model"], _MODEL_KINDS, "model")
    contract = _tagged_block(doc["contract"], _CONTRACT_KINDS, "contract")
    rb = _plain_block(doc.get("rates"), _RATES_FIELDS, "rates", required=False)
    rates = RatesSpec(float(rb.get("risk_free", 0.0)),
                      float(rb.get("dividend_yield", 0.0)))
    mb = _plain_block(doc["market"], _MARKET_FIELDS, "market", required=False)
    try:
        market = MarketState(float(mb.get("spot", 100.0)),
                             float(mb.get("variance", 0.04)),
                             float(mb.get("accrued_variance", 0.0)),
                             float(mb.get("time", 0.0)))
    except ValueError as exc:
        raise SchemaError(f"[market] {exc}") from exc

    method = doc.get("method", "transform")
    if isinstance(method, dict):
        method = method.get("kind", "transform")
        if set(doc["method"]) - {"kind"}:
            raise SchemaError("[method] only has a 'kind' field")
    if method not in ("transform", "montecarlo", "both"):
        raise SchemaError(f"method must be transform|montecarlo|both, "
                          f"got {method!r}")

    qb = _plain_block(doc.get("quadrature"), _QUAD_FIELDS, "quadrature",
                      required=False)
    quad = QuadConfig(
        rel_tol=float(qb.get("rel_tol", 1e-6)),
        abs_tol=float(qb.get("abs_tol", 1e-9)),
        max_halfwidth=float(qb.get("max_halfwidth", 200.0)),
        initial_panels=int(qb.get("initial_panels", 64)),
        max_refinements=int(qb.get("max_refinements", 12)),
        initial_span=float(qb.get("initial_span", 32.0)))
    cb = _plain_block(doc.get("montecarlo"), _MC_FIELDS, "montecarlo",
                      required=False)
    contour = None
    if "contour" in doc:
        kb = _plain_block(doc["contour"], ("k1", "k2"), "contour")
        contour = Contour(float(kb["k1"]), float(kb["k2"]))
    return RunConfig(
        model=model, rates=rates, market=market, contract=contract,
        method=method, quad=quad,
        mc_paths=int(cb.get("paths", 200_000)),
        mc_steps_per_year=int(cb.get("steps_per_year", 250)),
        mc_seed=int(cb.get("seed", 20110101)),
        mc_floor=str(cb.get("floor_policy", "full-truncation")),
        contour=contour)


def _mc_config(cfg: RunConfig, tau: float) -> montecarlo.McConfig:
    steps = max(1, int(math.ceil(cfg.mc_steps_per_year * tau)))
    return montecarlo.McConfig(cfg.mc_paths, steps, cfg.mc_seed, cfg.mc_floor)


def _run_mc(cfg: RunConfig):
    tau = cfg.contract.maturity - cfg.market.time
    mc_cfg = _mc_config(cfg, tau)
    spots, accrued = montecarlo.simulate_terminals(
        cfg.model, cfg.rates, cfg.market, cfg.contract.maturity, mc_cfg)
    return montecarlo.mc_price(cfg.contract, spots, accrued, cfg.rates, tau), mc_cfg


def _output_stream(args, default_name):
    if getattr(args, "output", None):
        path = args.output
    else:
        outdir = os.environ.get("QVPRICER_OUTPUT_DIR")
        if not outdir:
            return None, None
        path = os.path.join(outdir, default_name)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    return open(path, "w", newline=""), path


def _emit(args, text_lines, csv_header, csv_rows, default_name):
    if not args.quiet:
        for line in text_lines:
            print(line)
    stream, path = _output_stream(args, default_name)
    buf = io.StringIO()
    buf.write(f"# qvpricer {default_name} generated {time.strftime('%Y-%m-%dT%H:%M:%S')}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header)
    writer.writerows(csv_rows)
    if stream is not None:
        with stream:
            stream.write(buf.getvalue())
        if not args.quiet:
            print(f"report written to {path}")
    elif not args.quiet:
        sys.stdout.write(buf.getvalue())


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    res = validate_model(cfg.model)
    lines = [f"model: {cfg.model}",
             f"boundary condition: {'ok' if res.ok else 'REJECTED: ' + res.reason}"]
    code = EXIT_OK
    if not res.ok:
        code = EXIT_CONFIG
    else:
        tau = cfg.contract.maturity - cfg.market.time
        if tau <= 0:
            lines.append("contract expired at the valuation time")
            code = EXIT_CONFIG
        else:
            contour = cfg.contour or choose_contour(cfg.contract, cfg.model, tau)
            lines.append(f"contract: {cfg.contract}")
            lines.append(f"contour: k1={contour.k1:g}, k2={contour.k2:g}")
            lines.append("config OK")
    if not args.quiet:
        print("\n".join(lines))
    return code


def cmd_price(args) -> int:
    cfg = load_config(args.config)
    t0 = time.perf_counter()
    lines = [f"model: {cfg.model}", f"contract: {cfg.contract}",
             f"market: {cfg.market}", f"method: {cfg.method}"]
    row = {"method": cfg.method}
    code = EXIT_OK
    if cfg.method in ("transform", "both"):
        res = price(cfg.model, cfg.rates, cfg.contract, cfg.market,
                    cfg.contour, cfg.quad)
        lines += [f"transform value: {res.value:.6f}  "
                  f"(est err {res.est_error:.2e}, nodes {res.nodes_used}, "
                  f"contour k1={res.contour.k1:g} k2={res.contour.k2:g})"]
        row.update(transform_value=f"{res.value:.10g}",
                   transform_err=f"{res.est_error:.3g}",
                   k1=f"{res.contour.k1:g}", k2=f"{res.contour.k2:g}",
                   nodes=res.nodes_used)
        if not res.converged:
            lines.append("WARNING: quadrature did not reach its tolerance")
            code = EXIT_NUMERICAL
    if cfg.method in ("montecarlo", "both"):
        est, mc_cfg = _run_mc(cfg)
        lines += [f"monte carlo value: {est.mean:.6f} +- {est.std_error:.6f}  "
                  f"({est.n_paths} paths, {mc_cfg.n_steps} steps, "
                  f"seed {mc_cfg.seed})"]
        row.update(mc_value=f"{est.mean:.10g}", mc_se=f"{est.std_error:.3g}",
                   mc_paths=est.n_paths, mc_seed=mc_cfg.seed)
    if cfg.method == "both":
        gap = abs(float(row["transform_value"]) - est.mean)
        ses = gap / est.std_error if est.std_error > 0 else math.inf
        flagged = ses > 3.0
        lines.append(f"discrepancy: {gap:.6f} = {ses:.2f} MC standard errors"
                     f"{'  ** FLAGGED **' if flagged else ''}")
        row.update(discrepancy_se=f"{ses:.3g}", flagged=flagged)
    lines.append(f"runtime: {time.perf_counter() - t0:.2f}s")
    _emit(args, lines, list(row), [list(row.values())], "price.csv")
    return code


def cmd_greeks(args) -> int:
    cfg = load_config(args.config)
    if cfg.method == "montecarlo":
        print("greeks are a transform-only feature; set method: transform",
              file=sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    quad = cfg.quad
    if quad.rel_tol > 1e-8:  # finite differences need tighter quadrature
        quad = QuadConfig(1e-8, 1e-11, quad.max_halfwidth, quad.initial_panels,
                          quad.max_refinements, quad.initial_span)
    m, r, c, s = cfg.model, cfg.rates, cfg.contract, cfg.market
    contour = cfg.contour or choose_contour(c, m, c.maturity - s.time)
    d_res = delta(m, r, c, s, contour, quad)
    g_res = gamma(m, r, c, s, contour, quad)

    def px(spot):
        st = MarketState(spot, s.inst_variance, s.accrued_qv, s.time)
        return price(m, r, c, st, contour, quad).value

    h = 1e-4 * s.spot
    fd_delta = (px(s.spot + h) - px(s.spot - h)) / (2 * h)
    hg = 1e-3 * s.spot
    fd_gamma = (px(s.spot + hg) - 2 * px(s.spot) + px(s.spot - hg)) / hg ** 2
    dv = variance_sensitivity(m, r, c, s, contour, quad)
    rel = lambda a, b: abs(a - b) / max(abs(b), 1e-12)
    d_gap, g_gap = rel(d_res.value, fd_delta), rel(g_res.value, fd_gamma)
    flagged = d_gap > 1e-3 or g_gap > 1e-2
    lines = [
        f"delta: {d_res.value:.8f}   finite difference {fd_delta:.8f}   "
        f"rel gap {d_gap:.2e}",
        f"gamma: {g_res.value:.8f}   finite difference {fd_gamma:.8f}   "
        f"rel gap {g_gap:.2e}",
        f"dV/dv (finite difference): {dv:.8f}",
        f"runtime: {time.perf_counter() - t0:.2f}s",
    ]
    if flagged:
        lines.append("** FLAGGED: contour and finite-difference greeks disagree **")
    header = ["delta", "fd_delta", "gamma", "fd_gamma", "dv_dvariance",
              "flagged"]
    rows = [[f"{d_res.value:.10g}", f"{fd_delta:.10g}", f"{g_res.value:.10g}",
             f"{fd_gamma:.10g}", f"{dv:.10g}", flagged]]
    _emit(args, lines, header, rows, "greeks.csv")
    return EXIT_NUMERICAL if flagged else EXIT_OK


# ---------------------------------------------------------------------------
# Reference tables
# ---------------------------------------------------------------------------

_TABLE_TOL = {1: 0.01, 2: 0.05, 3: 0.005, 4: 0.05, 5: 0.05}


def _table_setup(table: int, row_value: float):
    """(model, rates, market, contract) for one row of a reference grid."""
    if table == 1:
        return (Heston(0.5, 0.2, 0.3, 0.0), RatesSpec(0.0, 0.0),
                MarketState(100.0, 0.2, 0.0, 0.0),
                TvoCall(0.1, row_value, 3.0))
    if table == 2:
        return (Heston(0.5, 0.2, 0.3, row_value), RatesSpec(0.08, 0.0),
                MarketState(100.0, 0.2, 0.46, 2.5),
                TvoCall(0.1, 85.0, 5.0))
    if table == 3:
        return (Heston(0.5, 0.2, 0.3, 0.2), RatesSpec(0.10, 0.01),
                MarketState(120.0, 0.2, row_value, 1.0),
                DoubleDigitalCall(100.0, 0.24, 2.5))
    if table == 4:
        return (Heston(0.5, 0.2, 0.3, -0.3), RatesSpec(0.07, 0.0),
                MarketState(110.0, 0.2, 0.0, 0.0),
                VolCappedCall(100.0, 0.2, row_value, 2.0))
    if table == 5:
        return (Heston(0.5, 0.2, 0.3, -0.5), RatesSpec(0.05, 0.02),
                MarketState(50.0, 0.2, 0.18, 1.0),
                VolStruckCall(150.0, row_value))
    raise SchemaError(f"no reference table {table}; choose 1..5")


def reference_rows(table: int):
    with resources.files("qvpricer.data").joinpath(
            "reference_tables.csv").open() as fh:
        rows = [r for r in csv.DictReader(
            line for line in fh if not line.startswith("#"))
            if int(r["table"]) == table]
    if not rows:
        raise SchemaError(f"no reference table {table}; choose 1..5")
    return rows


def run_table(table: int, mc_paths: int, seed: int, workers: int = 4):
    """Price one reference grid; returns (csv_rows, worst_abs_dev, tol)."""
    rows = reference_rows(table)
    tol = _TABLE_TOL[table]

    def one(row):
        value = float(row["value"])
        model, rates, market, contract = _table_setup(table, value)
        res = price(model, rates, contract, market)
        tau = contract.maturity - market.time
        mc_cfg = montecarlo.McConfig(
            mc_paths, max(1, int(math.ceil(250 * tau))), seed)
        spots, accrued = montecarlo.simulate_terminals(
            model, rates, market, contract.maturity, mc_cfg)
        est = montecarlo.mc_price(contract, spots, accrued, rates, tau)
        ref = float(row["reference"])
        return [row["param"], f"{value:g}", f"{ref:.4f}",
                f"{res.value:.6f}", f"{est.mean:.6f}", f"{est.std_error:.6f}",
                f"{abs(res.value - ref):.6f}",
                f"{abs(res.value - ref) / ref:.3e}",
                abs(res.value - ref) <= tol]

    with ThreadPoolExecutor(max_workers=min(workers, len(rows))) as pool:
        out = list(pool.map(one, rows))
    worst = max(float(r[6]) for r in out)
    return out, worst, tol


def cmd_table(args) -> int:
    table = args.table
    if table not in _TABLE_TOL:
        print(f"no reference table {table}; choose 1..5", file=sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    rows, worst, tol = run_table(table, args.mc_paths, args.seed)
    header = ["param", "value", "reference", "transform", "mc", "mc_se",
              "abs_dev", "rel_dev", "within_tol"]
    lines = [f"table {table}: {len(rows)} rows, tolerance {tol}"]
    for r in rows:
        lines.append(
            f"  {r[0]}={r[1]:>5}: ref {r[2]:>8}  transform {r[3]:>10}  "
            f"mc {r[4]} +- {r[5]}  dev {r[6]} {'OK' if r[8] else 'BREACH'}")
    lines.append(f"worst deviation {worst:.6f} (tol {tol}); "
                 f"runtime {time.perf_counter() - t0:.1f}s")
    _emit(args, lines, header, rows, f"table{table}.csv")
    return EXIT_OK if worst <= tol else EXIT_TOLERANCE


def build_parser():
    p = argparse.ArgumentParser(
        prog="qvpricer",
        description="Price joint claims on an asset and its realized "
                    "variance under stochastic volatility.")
    p.add_argument("--quiet", action="store_true",
                   help="suppress human-readable output")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in (("price", cmd_price), ("greeks", cmd_greeks),
                     ("validate", cmd_validate)):
        sp = sub.add_parser(name)
        sp.add_argument("config", help="YAML run configuration")
        sp.add_argument("--output", help="write the CSV report here")
        sp.set_defaults(func=fn)
    st = sub.add_parser("table")
    st.add_argument("table", type=int, help="reference table id, 1..5")
    st.add_argument("--mc-paths", type=int, default=200_000, dest="mc_paths")
    st.add_argument("--seed", type=int, default=20110101)
    st.add_argument("--output", help="write the CSV report here")
    st.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QvPricerError as exc:
        kind = EXIT_NUMERICAL if isinstance(exc, ArithmeticError) else EXIT_CONFIG
        print(f"error: {exc}", file=sys.stderr)
        return kind


if __name__ == "__main__":
    sys.exit(main())
