"""Batch runner: one subcommand per experiment, JSON reports, exit code 1 on a failed check.

Usage::

    insider-arb run first-passage --x 1 --paths 1000000 --seed 7
    insider-arb run tree-fuzz --count 100 --seed 3 --out fuzz.json
    insider-arb run converge --config converge.json
    insider-arb report --format csv --input fuzz.json

Values come from the built-in defaults, then the flags, then the JSON
config file (which wins).  Unknown config keys are rejected, a seed is
required, and the effective configuration is echoed into the report.
Thread count (``--threads`` or ``INSIDER_ARB_THREADS``) never changes the
numbers, so it is not part of the echoed configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .errors import DomainError
from .reporting import Check, ExperimentReport, dumps, serialize

E = math.e


def clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


# ---------------------------------------------------------------- experiments

def run_first_passage(cfg, threads):
    from .poisson_market.passage import first_passage, recursion_residual, simulate_passage
    levels = [int(x) for x in cfg["x"]]
    ens = simulate_passage(cfg["paths"], cfg["seed"], max(levels) + 1, cfg["horizon"], threads=threads)
    rep = ExperimentReport("first-passage")
    rows = []
    for x in levels:
        st = first_passage(ens, x)
        se = st.estimate.se
        rep.add(Check(f"first_passage[x={x}]", st.estimate.mean, se, math.exp(-x), max(3 * se, 5e-3), note=st.note))
        rows.append({"x": x, "estimate": st.estimate.mean, "se": se, "target": math.exp(-x),
                     "truncation_bias_bound": st.truncation_bias_bound, "mean_hit_time": st.mean_hit_time})
    for x in levels:
        if x >= 1:
            r = recursion_residual(ens, x)
            rep.add(Check(f"recursion_residual[x={x}]", r.mean, r.se, 0.0, 3 * r.se))
    rep.tables["levels"] = rows
    return rep


def run_superhedge(cfg, threads):
    from .arbitrage import mc_emm_probe, superhedge_indicator_public, superhedge_insider_combine
    rep = ExperimentReport("superhedge")
    rows = []
    for x in cfg["x"]:
        x = int(x)
        pr = mc_emm_probe(x, n_paths=cfg["paths"], seed=cfg["seed"] + 1000 * x, horizon=cfg["horizon"],
                          threads=threads, high=cfg["high"], low=cfg["low"])
        est, se, price = pr.estimate.mean, pr.estimate.se, pr.price
        if x <= 0:
            rep.add(Check(f"emm_probe[x={x}]", est, se, 0.95, 0.0, rule="ge", note="public price 1"))
        else:
            rep.add(Check(f"emm_probe[x={x}]", est, se, price, 0.02, rule="ge", note="within 0.02 below e^-x"))
        rep.add(Check(f"weak_duality[x={x}]", est, se, price, 3 * se, rule="le"))
        rows.append({"x": x, "probe": est, "se": se, "price": superhedge_indicator_public(x),
                     "high": cfg["high"], "low": cfg["low"]})
    rep.tables["probes"] = rows
    rep.tables["insider_prices"] = superhedge_insider_combine(horizon=cfg["horizon"]).records()
    return rep


def run_arbitrage_verdict(cfg, threads):
    from .arbitrage import Verdict, classify_arbitrage, replicate_buy_and_hold, replicate_ensemble, \
        superhedge_insider_combine
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import simulate_ensemble
    from .tree_oracle import binomial, insider_price_map, tree_arbitrage_verdict
    ens = simulate_ensemble(MarketParams(cfg["horizon"]), cfg["paths"], cfg["seed"], threads=threads)
    n = ens.n_terminal
    cost, wealth = replicate_ensemble(n)
    exact = np.array([math.exp(-int(k)) for k in n])
    rep = ExperimentReport("arbitrage-verdict")
    err = float(np.max(np.abs(wealth - 1.0)))
    rep.add(Check("buy_and_hold_wealth_error", err, None, 0.0, 1e-12, rule="le"))
    rep.add(Check.flag("initial_cost_is_exp_minus_NT", bool(np.array_equal(cost, exact))))
    sample = [replicate_buy_and_hold(ens.path(i)) for i in range(min(len(ens), cfg["path_checks"]))]
    rep.add(Check.flag("pathwise_replication", all(abs(r.terminal_wealth - 1.0) <= 1e-12 and r.min_wealth > 0
                                                   for r in sample)))
    pm = superhedge_insider_combine(horizon=cfg["horizon"])
    v = classify_arbitrage(pm)
    rep.add(Check.flag("verdict_optimal_not_strong", v.verdict == Verdict.OPTIMAL, note=v.verdict.value))
    rep.add(Check.flag("no_discount_for_x_le_0", all(p == 1.0 for g, p in pm.prices.items() if g <= 0)))
    tv = tree_arbitrage_verdict(binomial())
    rep.add(Check.flag("complete_binomial_strong", tv.verdict == Verdict.STRONG, note=tv.verdict.value))
    rep.tables["verdicts"] = [{"market": "poisson", **v.record()},
                              {"market": "binomial", **tv.record(),
                               "prices": [insider_price_map(binomial())[g] for g in (0, 1)]}]
    rep.tables["cost_by_bucket"] = [{"x": int(x), "cost": math.exp(-x), "paths": int(np.sum(n == x))}
                                    for x in range(int(n.min()), int(n.max()) + 1)]
    return rep


def run_log_utility(cfg, threads):
    from .insider_utility import insider_log_utility_report
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import simulate_ensemble
    rep = ExperimentReport("log-utility")
    rows = []
    for k, T in enumerate(cfg["horizons"]):
        ens = simulate_ensemble(MarketParams(float(T)), cfg["paths"], cfg["seed"] + k, threads=threads)
        r = insider_log_utility_report(ens, cfg["epsilon"], cfg["sweep"], cfg["coarse"], threads=threads)
        for c in r.checks():
            c.name = f"T={T:g}:{c.name}"
            rep.add(c)
        rep.add(Check.flag(f"T={T:g}:finite_value", math.isfinite(r.value), note=f"value {r.value:.6f}"))
        for row in r.rows:
            rows.append({"horizon": T, "epsilon": row.epsilon, "kind": row.kind, "log_utility": row.log_utility.mean,
                         "log_utility_se": row.log_utility.se, "target": row.target, "gap": row.gap,
                         "se_gap": row.se_gap, "entropy": r.entropy, "dual": r.dual.mean, "dual_se": r.dual.se})
    rep.tables["rows"] = rows
    return rep


def run_entropy_identity(cfg, threads):
    from .insider_utility import bucket_partition_residual, entropy_identity_check, path_functionals
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import simulate_ensemble
    ens = simulate_ensemble(MarketParams(cfg["horizon"]), cfg["paths"], cfg["seed"], threads=threads)
    f = path_functionals(ens, epsilons=(0.0,), threads=threads)
    ident = entropy_identity_check(f, cfg["buckets"])
    rep = ExperimentReport("entropy-identity", checks=ident.checks())
    for x in cfg["buckets"]:
        rep.add(Check(f"bucket_paths[x={x}]", int(np.sum(f.n_terminal == x)), None, cfg["min_bucket"], 0.0,
                      rule="ge"))
    rep.add(Check("bucket_partition_residual", bucket_partition_residual(f, cfg["buckets"]), None, 0.0, 1e-12,
                  rule="le"))
    rep.tables["buckets"] = [{"x": r.x, "estimate": r.estimate.mean, "se": r.estimate.se, "n": r.estimate.n,
                              "target": r.target} for r in ident.rows]
    return rep


def run_power_dual(cfg, threads):
    from .insider_utility import ConstantIntensities, concavity_certificate, power_dual_inf
    from .kernels.distributions import skellam_pmf
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import TiltControls, simulate_ensemble
    g = cfg["gamma"]
    ens = simulate_ensemble(MarketParams(cfg["horizon"]), cfg["paths"], cfg["seed"], threads=threads)
    cands = [TiltControls.constant(float(a)) for a in cfg["alphas"]] + [ConstantIntensities(1.0, 1.0)]
    rep = ExperimentReport("power-dual")
    rows = []
    for x in cfg["buckets"]:
        best, results = power_dual_inf(g, cands, int(x), ens, threads)
        p = skellam_pmf(int(x), cfg["horizon"], cfg["horizon"])
        rep.add(Check(f"dual_above_trivial_primal[x={x}]", best.value, best.se, p, 3 * best.se, rule="ge",
                      note="V = 1 gives E[V^gamma; N_T = x] = P[N_T = x]"))
        rep.add(Check.flag(f"infeasible_flagged[x={x}]", not results[-1].feasible, note=results[-1].label))
        rep.add(Check.flag(f"running_inf[x={x}]", all(best.value <= r.value for r in results if r.feasible)))
        for r in results:
            rows.append({"bucket": int(x), "label": r.label, "feasible": r.feasible, "value": r.value, "se": r.se,
                         "best": r is best})
    rng = np.random.default_rng(cfg["seed"])
    triples = [(float(a), float(b), float(l1), float(l2)) for a, b, l1, l2 in
               zip(rng.uniform(0.01, 5, cfg["triples"]), rng.uniform(0.01, 5, cfg["triples"]),
                   rng.uniform(0, 10, cfg["triples"]), rng.uniform(0, 10, cfg["triples"]))]
    bad, slack = concavity_certificate(triples)
    rep.add(Check("concavity_violations", bad, None, 0.0, 0.0, note=f"min slack {slack:.3e}"))
    rep.tables["candidates"] = rows
    return rep


def run_tree_fuzz(cfg, threads):
    from .tree_oracle import binomial, log_utility_primal, superhedge_tree, tree_fuzz
    from .tree_oracle.fuzz import LOG_TOL, SUPERHEDGE_TOL
    rows = tree_fuzz(cfg["count"], cfg["seed"])
    rep = ExperimentReport("tree-fuzz")
    rep.add(Check("max_superhedge_gap", max(r.superhedge_gap for r in rows), None, 0.0, SUPERHEDGE_TOL, rule="le"))
    rep.add(Check("max_log_utility_gap", max(r.log_gap for r in rows), None, 0.0, LOG_TOL, rule="le"))
    rep.add(Check("rows_passed", sum(r.passed for r in rows), None, len(rows), 0.0))
    b = binomial()
    rep.add(Check("binomial_superhedge_up", superhedge_tree(b, {1: 1.0}).price, None, 1 / 3, 1e-10))
    rep.add(Check("binomial_log_utility", log_utility_primal(b).value, None, 0.0588915, 1e-7,
                  note="closed form 0.5 log(9/8)"))
    rep.add(Check("binomial_log_utility_closed_form", log_utility_primal(b).value, None, 0.5 * math.log(9 / 8), 1e-10))
    rep.tables["trees"] = [{"index": r.index, "nodes": r.nodes, "superhedge": r.superhedge, "emm": r.emm,
                            "primal": r.primal, "dual": r.dual, "pass": r.passed} for r in rows]
    return rep


def run_tree_nupbr(cfg, threads):
    from .insider_utility import insider_log_utility_report
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import simulate_ensemble
    from .tree_oracle import binomial, label_mass, nupbr_witness, witness_tail_probability
    tree = binomial()
    w = nupbr_witness(tree)
    rep = ExperimentReport("tree-nupbr")
    rep.add(Check.flag("witness_found", w is not None))
    rows = []
    pg = label_mass(tree, w.g)[0]
    for n in cfg["n"]:
        for frac in cfg["fractions"]:
            c = frac * n * w.gain
            p = witness_tail_probability(tree, w, n, c)
            rep.add(Check(f"tail[n={n:g},c={frac:g}*n*gain]", p, None, pg, 0.0, rule="ge"))
            rows.append({"n": n, "c": c, "tail": p, "p_label": pg, "threshold": w.threshold(n)})
    rep.tables["binomial_witness"] = rows
    ens = simulate_ensemble(MarketParams(cfg["horizon"]), cfg["paths"], cfg["seed"], threads=threads)
    r = insider_log_utility_report(ens, sweep=(), coarse=None, threads=threads)
    rep.add(Check.flag("poisson_utility_finite", math.isfinite(r.value) and r.admissible,
                       note=f"H + D = {r.value:.6f}"))
    rep.add(r.rows[0].check())
    rep.tables["poisson"] = [{"horizon": r.horizon, "value": r.value, "entropy": r.entropy, "dual": r.dual.mean,
                              "log_utility": r.rows[0].log_utility.mean, "min_factor": r.min_factor}]
    return rep


def run_prop41_decay(cfg, threads):
    from .tree_oracle import complete_binary, first_kind_cost_decay
    tree = complete_binary(cfg["depth"])
    rep = ExperimentReport("prop41-decay")
    rows = []
    for n in cfg["ns"]:
        d = first_kind_cost_decay(tree, int(n), verify_cells=cfg["verify_cells"])
        rep.add(Check(f"max_cell_cost[n={n}]", d.max_cost, None, 1.0 / n, 0.0,
                      note="finite analogue of a non-atomic signal"))
        rows.append({"n": int(n), "max_cost": d.max_cost, "min_cost": min(d.cell_costs), "target": 1.0 / n})
    rep.tables["decay"] = rows
    return rep


def run_converge(cfg, threads):
    from .continuous_g import BrownianMarket, bs_insider_experiment
    m = BrownianMarket(cfg["horizon"], cfg["sigma"])
    rep = ExperimentReport("converge")
    main = bs_insider_experiment(m, int(cfg["n"]), cfg["paths"], cfg["steps"], cfg["seed"], cfg["delta"],
                                 cfg["grid"], threads)
    row = main.rows[0]
    rep.add(Check(f"insider_value[n={row.n}]", row.value.mean, row.value.se, row.entropy,
                  3 * row.value.se + row.allowance,
                  note=f"allowance {row.allowance:.4g} = truncation {row.truncation:.3g} + grid {row.grid_error:.3g}"))
    for t, est in main.density_checks:
        rep.add(Check(f"density_martingale[t={t:.4f}]", est.mean, est.se, 1.0, 3 * est.se))
    sweep = bs_insider_experiment(m, [int(n) for n in cfg["slope_ns"]], cfg["slope_paths"], cfg["steps"],
                                  cfg["seed"] + 1, cfg["delta"], cfg["grid"], threads)
    ge4 = [i for i, r in enumerate(sweep.rows) if r.n >= 4]
    x = np.log([sweep.rows[i].n for i in ge4])
    y = np.array([sweep.rows[i].value.mean for i in ge4])
    slope = float(np.polyfit(x, y, 1)[0])
    rep.add(Check("value_vs_log_n_slope", slope, None, 1.0, 0.1))
    for i in range(len(sweep.rows) - 1):
        a, b = sweep.rows[i], sweep.rows[i + 1]
        if b.n > 16:
            break
        inc = sweep.paired_increment(i, i + 1)
        rep.add(Check(f"increment[n={a.n}->{b.n}]", inc.mean, inc.se, 3 * inc.se, 0.0, rule="ge",
                      note="paired on shared paths; must exceed 3 SE"))
    rep.tables["main"] = [row.record()]
    rep.tables["sweep"] = [r.record() for r in sweep.rows]
    rep.meta["delta"] = main.delta
    return rep


def run_entropy_split(cfg, threads):
    from scipy.stats import norm, uniform
    from .continuous_g import chain_rule_check, entropy_decomposition_check, make_partition
    rep = ExperimentReport("entropy-split")
    dist = norm()
    rows = []
    for n in cfg["ns"]:
        s = entropy_decomposition_check(dist, make_partition(dist, int(n), "equal_width", (cfg["lo"], cfg["hi"])))
        rows.append({"n": int(n), "entropy": s.entropy, "differential": s.differential, "width_term": s.width_term,
                     "residual": s.residual})
    last = rows[-1]
    rep.add(Check(f"residual[n={last['n']}]", last["residual"], None, 0.0, cfg["tolerance"]))
    rep.add(Check("differential_entropy", rows[0]["differential"], None, 0.5 * math.log(2 * math.pi * E), 1e-9))
    res = [abs(r["residual"]) for r in rows]
    rep.add(Check.flag("residual_decreasing", all(b < a for a, b in zip(res, res[1:]))))
    u = uniform()
    rep.add(Check.flag("uniform_residual_exactly_zero", all(
        entropy_decomposition_check(u, make_partition(u, int(n), "equal_width", (0.0, 1.0))).residual == 0.0
        for n in cfg["ns"])))
    chain = [chain_rule_check(make_partition(dist, 2 * int(n), "equal_mass")) for n in cfg["ns"]]
    rep.add(Check.flag("chain_rule", all(ok for _, _, ok in chain)))
    rep.tables["split"] = rows
    rep.tables["chain_rule"] = [{"n": int(n), "h_n": a, "h_2n": b} for n, (a, b, _) in zip(cfg["ns"], chain)]
    return rep


def run_ui_bound(cfg, threads):
    from .continuous_g import PiecewiseControl, ThetaMarket, log_density, random_controls, ui_bound_check
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import simulate_ensemble
    m = ThetaMarket(cfg["theta"], cfg["horizon"])
    fixed = [PiecewiseControl.constant(1.0, m.horizon), PiecewiseControl.constant(1.0 / m.theta, m.horizon)]
    ctrls = fixed + random_controls(m, cfg["controls"], np.random.default_rng(cfg["seed"]))
    r = ui_bound_check(m, ctrls, cfg["paths"], cfg["seed"], threads)
    rep = ExperimentReport("ui-bound")
    rep.add(Check("violations", r.violations, None, 0.0, 0.0))
    rep.add(Check("max_ratio", r.max_ratio, None, 1.0, 0.0, rule="le"))
    try:
        log_density(m, PiecewiseControl.constant(1.0 / m.theta + 0.1, m.horizon),
                    simulate_ensemble(MarketParams(m.horizon), 2, cfg["seed"]))
        rejected = False
    except DomainError:
        rejected = True
    rep.add(Check.flag("infeasible_control_rejected", rejected))
    rep.tables["controls"] = [{"knots": list(c.knots), "values": list(c.values), "mean_density": md}
                              for c, md in zip(ctrls, r.mean_density)]
    return rep


def run_nupbr_probe(cfg, threads):
    from scipy.stats import norm
    from .continuous_g import EXPLORATORY, interval_grid, nupbr_criterion_probe
    from .insider_utility import density_log, path_functionals
    from .kernels.distributions import skellam_pmf
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import TiltControls, simulate_ensemble
    T = cfg["horizon"]
    ens = simulate_ensemble(MarketParams(T), cfg["paths"], cfg["seed"], threads=threads)
    f = path_functionals(ens, epsilons=(0.0,), threads=threads)
    fam = {f"constant alpha1={a:g}": density_log(ens, TiltControls.constant(float(a)), threads)
           for a in cfg["alphas"]}
    fam["bucket-optimal"] = f.log_z

    def skellam_mass(a, b):
        return math.fsum(skellam_pmf(k, T, T) for k in range(math.floor(a) + 1, math.floor(b) + 1))

    grid = interval_grid(cfg["buckets"], cfg["widths"]) + [(0.25, 0.25)]
    pois = nupbr_criterion_probe(ens.n_terminal, fam, grid, cfg["constant"], skellam_mass)
    law = norm(scale=math.sqrt(T))
    bm = nupbr_criterion_probe(np.zeros(1), {"Z=1 (complete market)": 0.0}, interval_grid([0.0], cfg["widths"]),
                               cfg["constant"], lambda a, b: law.cdf(b) - law.cdf(a))
    rep = ExperimentReport("nupbr-probe")
    rep.meta["note"] = EXPLORATORY
    rep.add(Check.flag("zero_probability_row_skipped", pois.rows[-1].skipped))
    by_width = {}
    for r in pois.active:
        by_width.setdefault(r.eps, []).append(r.implied_c)
    cs = [max(v) for _, v in sorted(by_width.items())]
    rep.add(Check("poisson_implied_c_spread", max(cs) - min(cs), None, 0.0, 1e-9, rule="le",
                  note="atoms: the implied constant does not grow as the interval shrinks"))
    bc = [r.implied_c for r in bm.rows]
    rep.add(Check.flag("brownian_implied_c_grows", all(b > a for a, b in zip(bc, bc[1:])),
                       note="Z = 1 only: implied C = log(1/P) diverges"))
    rep.tables["poisson"] = [r.record() for r in pois.rows]
    rep.tables["brownian"] = [r.record() for r in bm.rows]
    rep.tables["summary"] = [{"market": "poisson", "constant": pois.constant, "holds": pois.holds,
                              "implied_constant": pois.implied_constant, "note": EXPLORATORY},
                             {"market": "brownian", "constant": bm.constant, "holds": bm.holds,
                              "implied_constant": bm.implied_constant, "note": EXPLORATORY}]
    return rep


def run_bessel_check(cfg, threads):
    from scipy import special
    from .kernels.bessel import bessel_ratio, log_bessel_i
    from .poisson_market.density import insider_intensities
    rep = ExperimentReport("bessel-check")
    xs = np.geomspace(cfg["x_min"], cfg["x_max"], cfg["n_x"])
    worst_log = worst_ratio = 0.0
    for n in range(cfg["max_order"] + 1):
        for x in xs:
            ref = math.log(special.ive(n, x)) + x
            got = log_bessel_i(n, float(x))
            worst_log = max(worst_log, abs(got - ref) / max(1.0, abs(ref)))
            if n >= 1:
                r_ref = special.ive(n - 1, x) / special.ive(n, x)
                worst_ratio = max(worst_ratio, abs(bessel_ratio(n - 1, n, float(x)) / r_ref - 1.0))
    rep.add(Check("log_bessel_rel_error", worst_log, None, 0.0, cfg["tolerance"], rule="le"))
    rep.add(Check("ratio_rel_error", worst_ratio, None, 0.0, cfg["tolerance"], rule="le"))
    worst_l = 0.0
    taus = np.geomspace(1e-6, 5.0, 40)
    for y in range(-cfg["max_y"], cfg["max_y"] + 1):
        for tau in taus:
            pair = insider_intensities(0.0, 0, y, float(tau))
            z = 2.0 * tau
            if special.ive(abs(y), z) > 1e-280:
                l1 = special.ive(abs(y - 1), z) / special.ive(abs(y), z)
                l2 = special.ive(abs(y + 1), z) / special.ive(abs(y), z)
                worst_l = max(worst_l, abs(pair.lambda1 / l1 - 1.0), abs(pair.lambda2 / l2 - 1.0))
    rep.add(Check("intensity_rel_error", worst_l, None, 0.0, cfg["tolerance"], rule="le"))
    return rep


def run_appendix_check(cfg, threads):
    from .arbitrage import first_jump_race
    from .insider_utility import compensator_check
    from .kernels.distributions import ratio_exp_cdf
    from .kernels.stats import ks_statistic
    from .poisson_market.paths import MarketParams
    from .poisson_market.simulate import simulate_ensemble
    rep = ExperimentReport("appendix-check")
    race = first_jump_race(cfg["paths"], cfg["seed"], threads=threads)
    p = race.first_n1
    rep.add(Check("tau1_before_tau2", p.mean, p.se, 1.0 / (1.0 + E), 3 * p.se))
    ks = ks_statistic(race.ratios, np.vectorize(ratio_exp_cdf))
    crit = 1.3581 / math.sqrt(race.ratios.size)
    rep.add(Check("ratio_ks_statistic", ks, None, 0.0, crit, rule="le", note="95% critical value"))
    ens = simulate_ensemble(MarketParams(cfg["horizon"]), cfg["comp_paths"], cfg["seed"] + 1, threads=threads)
    rows = compensator_check(ens, cfg["t1"], cfg["t2"], cfg["buckets"], threads=threads)
    for r in rows:
        tag = "all" if r.bucket is None else f"x={r.bucket}"
        rep.add(Check(f"compensated_increment[N{r.driver},{tag}]", r.increment.mean, r.increment.se, 0.0,
                      3 * r.increment.se))
    rep.tables["race"] = [{"p": p.mean, "se": p.se, "censored": race.censored, "ks": ks, "critical": crit}]
    return rep


# ---------------------------------------------------------------- registry

@dataclass(frozen=True)
class Experiment:
    run: Callable
    defaults: dict[str, Any]
    help: str


EXPERIMENTS: dict[str, Experiment] = {
    "first-passage": Experiment(run_first_passage, {"x": (1, 2, 3), "paths": 1_000_000, "horizon": 50.0},
                                "first passage of N above x under the rates (1, e)"),
    "superhedge": Experiment(run_superhedge, {"x": (-1, 0, 1, 2), "paths": 1_000_000, "high": 100.0, "low": 0.01,
                                              "horizon": 1.0},
                             "martingale-measure probes of the public price of 1{N_T = x}"),
    "arbitrage-verdict": Experiment(run_arbitrage_verdict, {"paths": 100_000, "horizon": 1.0, "path_checks": 1000},
                                    "buy-and-hold replication and the optimal-arbitrage verdict"),
    "log-utility": Experiment(run_log_utility, {"paths": 100_000, "horizons": (0.5, 1.0), "epsilon": 1e-3,
                                                "sweep": (1e-2, 1e-3, 1e-4), "coarse": 0.2},
                              "insider log utility against entropy plus dual term"),
    "entropy-identity": Experiment(run_entropy_identity, {"paths": 150_000, "horizon": 1.0,
                                                          "buckets": (-2, -1, 0, 1, 2), "min_bucket": 10_000},
                                   "per-bucket entropy integral against -log P[N_T = x]"),
    "power-dual": Experiment(run_power_dual, {"paths": 100_000, "gamma": 0.5, "horizon": 1.0,
                                              "buckets": (-2, -1, 0, 1, 2), "alphas": (0.1, 0.2, 0.3, 0.5, 1.0),
                                              "triples": 1000},
                             "power-utility dual values over constant densities"),
    "tree-fuzz": Experiment(run_tree_fuzz, {"count": 100}, "duality fuzzing on random no-arbitrage trees"),
    "tree-nupbr": Experiment(run_tree_nupbr, {"n": (1.0, 10.0, 100.0), "fractions": (0.5, 0.99),
                                              "paths": 20_000, "horizon": 1.0},
                             "unbounded-profit witness on a tree against the finite Poisson value"),
    "prop41-decay": Experiment(run_prop41_decay, {"depth": 12, "ns": (2, 8, 64, 512), "verify_cells": 2},
                               "cost of equal-mass cells in a complete binary tree"),
    "converge": Experiment(run_converge, {"n": 8, "paths": 100_000, "steps": 2048, "delta": None, "grid": "graded",
                                          "horizon": 1.0, "sigma": 1.0, "slope_ns": (2, 4, 8, 16, 32, 64),
                                          "slope_paths": 10_000},
                           "Brownian insider value against the partition entropy"),
    "entropy-split": Experiment(run_entropy_split, {"ns": (8, 32, 128, 512), "lo": -5.0, "hi": 5.0,
                                                    "tolerance": 1e-3},
                                "partition entropy against differential entropy plus width term"),
    "ui-bound": Experiment(run_ui_bound, {"theta": 0.3, "horizon": 1.0, "paths": 10_000, "controls": 20},
                           "pathwise bound on martingale densities of the theta market"),
    "nupbr-probe": Experiment(run_nupbr_probe, {"paths": 20_000, "horizon": 1.0, "constant": 3.0,
                                                "buckets": (-2, -1, 0, 1, 2), "widths": (0.5, 0.1, 0.01, 0.001),
                                                "alphas": (0.1, 0.2, 0.3, 0.5)},
                              "exploratory interval criterion probe"),
    "bessel-check": Experiment(run_bessel_check, {"max_order": 40, "x_min": 1e-6, "x_max": 200.0, "n_x": 60,
                                                  "max_y": 12, "tolerance": 1e-12},
                               "Bessel values, ratios and insider intensities against scipy"),
    "appendix-check": Experiment(run_appendix_check, {"paths": 100_000, "comp_paths": 20_000, "horizon": 1.0,
                                                      "t1": 0.25, "t2": 0.9, "buckets": (-1, 0, 1)},
                                 "exponential ratio law and compensated increments"),
}


class ConfigError(ValueError):
    pass


def _coerce(name: str, default, value):
    """Convert ``value`` (flag string or JSON value) to the type of ``default``."""
    if value is None:
        if default is None:
            return None
        raise ConfigError(f"{name} may not be null")
    try:
        if isinstance(default, tuple):
            items = value.split(",") if isinstance(value, str) else list(value)
            kind = type(default[0]) if default else float
            return tuple(kind(float(v)) if kind is int and float(v).is_integer() else kind(v) for v in items)
        if isinstance(default, bool):
            return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
        if isinstance(default, int):
            f = float(value)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if isinstance(default, float) or default is None:
            if isinstance(value, str) and value.lower() in ("none", "null"):
                return None
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name}: {value!r}") from None


def effective_config(name: str, flags: dict[str, Any], config: dict[str, Any] | None) -> dict[str, Any]:
    """Defaults, then flags, then config file; seed required."""
    exp = EXPERIMENTS[name]
    cfg = dict(exp.defaults)
    cfg["seed"] = None
    for k, v in flags.items():
        if v is not None and k in cfg:
            cfg[k] = _coerce(k, exp.defaults.get(k, 0), v)
    if config:
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(config) - set(cfg) - {"experiment"})
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        if config.get("experiment", name) != name:
            raise ConfigError(f"config is for {config['experiment']!r}, not {name!r}")
        for k, v in config.items():
            if k != "experiment":
                cfg[k] = _coerce(k, exp.defaults.get(k, 0), v)
    if cfg["seed"] is None:
        raise ConfigError("a seed is required (--seed or config)")
    return cfg


def run_experiment(name: str, cfg: dict[str, Any], threads: int | None = None,
                   timing: bool = False) -> ExperimentReport:
    t0 = time.perf_counter()
    rep = EXPERIMENTS[name].run(cfg, threads)
    rep.config = clean(dict(sorted(cfg.items())))
    rep.meta = clean({**rep.meta, "seed": cfg["seed"], "version": __version__, "command": name})
    rep.tables = clean(rep.tables)
    if timing:
        rep.meta["runtime"] = round(time.perf_counter() - t0, 3)
    return rep


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="insider-arb", description="Insider arbitrage verification experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment and write its report")
    exps = run.add_subparsers(dest="experiment", required=True)
    for name, exp in EXPERIMENTS.items():
        ep = exps.add_parser(name, help=exp.help, description=exp.help)
        for k, d in exp.defaults.items():
            shown = ",".join(str(v) for v in d) if isinstance(d, tuple) else d
            ep.add_argument(_flag(k), dest=k, default=None, help=f"default: {shown}")
        ep.add_argument("--seed", type=int, default=None, help="random seed (required unless in the config)")
        ep.add_argument("--config", type=Path, default=None, help="JSON config; its values override flags")
        ep.add_argument("--out", type=Path, default=None, help="report path (default: <experiment>.json)")
        ep.add_argument("--threads", type=int, default=None, help="worker threads (env INSIDER_ARB_THREADS)")
        ep.add_argument("--timing", action="store_true", help="record the runtime in the report metadata")
    rp = sub.add_parser("report", help="convert a report to JSON or CSV")
    rp.add_argument("--format", required=True, help="json or csv")
    rp.add_argument("--input", type=Path, required=True)
    rp.add_argument("--out", type=Path, default=None)
    return p


def convert_report(text: str, fmt: str) -> str:
    data = json.loads(text)
    if isinstance(data, list):
        return serialize([Check.from_dict(c) for c in data], fmt)
    if isinstance(data, dict):
        rep = ExperimentReport.from_dict(data)
        if fmt == "json":
            return rep.to_json()
        return serialize(rep, fmt)
    raise DomainError("a report is a JSON object or an array of checks")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "report":
        if args.format not in ("json", "csv"):
            parser.error(f"unknown format {args.format!r}")
        try:
            out = convert_report(args.input.read_text(), args.format)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            parser.error(f"cannot read report: {exc}")
        if args.out is None:
            sys.stdout.write(out)
        else:
            args.out.write_text(out)
        return 0
    name = args.experiment
    flags = {k: getattr(args, k) for k in EXPERIMENTS[name].defaults}
    flags["seed"] = args.seed
    try:
        config = json.loads(args.config.read_text()) if args.config else None
        cfg = effective_config(name, flags, config)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        parser.error(str(exc))
    try:
        rep = run_experiment(name, cfg, args.threads, args.timing)
    except DomainError as exc:
        parser.error(f"invalid configuration: {exc}")
    out = args.out or Path(f"{name}.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rep.to_json())
    failed = [c.name for c in rep.checks if not c.passed]
    status = "PASS" if not failed else "FAIL (" + ", ".join(failed) + ")"
    print(f"{name}: {len(rep.checks)} checks, {status} -> {out}")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
