"""Acceptance criteria 1 to 11, each at its stated scale and tolerance.

Every test prints one PASS/FAIL line (collected again in the terminal
summary) before asserting.
"""

import math
import time

import numpy as np
from scipy import special

import lcorder as L
from lcorder import inequalities as I
from lcorder.cli import main
from lcorder.suites import (GAMMA_CONFIGS, RunConfig, TRIANGLE_MODES, instance_rng, run_suite,
                            summarize, triangle_instance)

SEED = 0
EPS = 1e-12


def config(**kw):
    return RunConfig(seed=SEED, eps_trunc=EPS, **kw)


def records(name, **kw):
    return list(run_suite(name, config(**kw)))


def statuses(recs):
    return summarize(recs)


def test_criterion_01_triangle(report):
    t0 = time.perf_counter()
    recs = records("triangle")
    elapsed = time.perf_counter() - t0
    counts = statuses(recs)
    gaps = []
    for rec in recs:
        ctx = rec["verdict"]["context"]
        gaps += [ctx[k]["identity_gap"] for k in ctx.get("checked", []) if "identity_gap" in ctx[k]]
    worst_gap = max(gaps)
    ok = (len(recs) == 500 and counts[I.VIOLATED] == 0 and counts[I.INCONCLUSIVE] == 0
          and worst_gap <= 1e-10 and elapsed < 30.0)
    report(1, ok, f"triangle: {counts}, identity gap {worst_gap:.2e} over {len(gaps)} directions, "
                  f"{elapsed:.1f}s")
    assert ok


def test_criterion_02_quadrangle(report):
    recs = records("quadrangle")
    counts = statuses(recs)
    # g = g2 against the triangle margins on the criterion-1 chains
    worst = 0.0
    for i in range(500):
        inst = triangle_instance(instance_rng(SEED, "triangle", i), TRIANGLE_MODES[i % 3], EPS)
        f, g, h = inst["f"], inst["g"], inst["h"]
        t, q = L.check_triangle(f, g, h), L.check_quadrangle(f, g, g, h)
        for tk, qk in (("eq1", "eq5"), ("eq2", "eq6")):
            if tk in t.context["checked"]:
                worst = max(worst, abs(t.context[tk]["margin"] - q.context[qk]["margin"]))
    ok = len(recs) == 500 and counts[I.VIOLATED] == 0 and worst <= 1e-12
    report(2, ok, f"quadrangle: {counts}, g=g2 specialization gap {worst:.2e}")
    assert ok


def test_criterion_03_maxent(report):
    recs = records("maxent", draws=200)
    counts = statuses(recs)
    draws = sum(r["verdict"]["context"]["samples"] for r in recs)
    ties = sum(r["verdict"]["context"]["ties"] for r in recs)
    targets = sorted({r["g"].split("(")[0] for r in recs})
    ok = counts[I.VIOLATED] == 0 and counts[I.INCONCLUSIVE] == 0 and draws == 200 * len(recs)
    report(3, ok, f"maxent: {len(recs)} targets {targets}, {draws} draws, {counts}, "
                  f"{ties} ties all with TV <= 1e-6")
    assert ok


def test_criterion_04_best_binomial(report):
    recs = records("approx")
    counts = statuses(recs)
    argmin = all(r["argmin_m"] == len(r["ps"]) for r in recs)
    poisson_worst = all(r["poisson"] > max(r["column"]) for r in recs)
    # strict monotone limit over every integer m in (lambda, 4n]
    strict = 0
    for r in recs:
        n, lam = len(r["ps"]), sum(r["ps"])
        grid = list(range(math.floor(lam) + 1, 4 * n + 1))
        vs = L.check_monotone_limit("binomial", lam, grid, EPS)
        strict += sum(v.status != I.HOLDS for v in vs)
    ok = (len(recs) == 50 and counts[I.VIOLATED] == 0 and counts[I.INCONCLUSIVE] == 0
          and argmin and poisson_worst and strict == 0)
    report(4, ok, f"best binomial: {counts}, argmin m=n {argmin}, Poisson largest {poisson_worst}, "
                  f"monotone-limit failures {strict}")
    assert ok


def test_criterion_05_negbinomial(report):
    recs = records("negbinomial")
    counts = statuses(recs)
    sizes = max(len(r["rs"]) for r in recs)
    ok = len(recs) == 50 and sizes <= 6 and counts[I.VIOLATED] == 0 and counts[I.INCONCLUSIVE] == 0
    report(5, ok, f"negative binomial: {counts} (entropy, order, monotone column, strict limit), "
                  f"n <= {sizes}")
    assert ok


def test_criterion_06_closure(report):
    recs = records("closure")
    by_kind = {}
    for r in recs:
        by_kind.setdefault(r["kind"], []).append(r["status"])
    failures = sum(s != I.HOLDS for v in by_kind.values() for s in v)
    # equality cases against closed forms
    worst = 0.0
    for k, m, p in ((3, 4, 0.4), (1, 11, 0.07), (6, 6, 0.9)):
        got = L.convolve(L.binomial(k, p), L.binomial(m, p))
        worst = max(worst, float(np.max(np.abs(got.weights - L.binomial(k + m, p).weights))))
    for k, m, r in ((1.5, 2.0, 0.4), (0.5, 3.0, 0.7), (2.0, 2.0, 0.25)):
        got = L.convolve(L.negbinomial(k, r), L.negbinomial(m, r))
        ref = L.negbinomial(k + m, r)
        hi = min(got.reliable_hi, ref.hi)
        worst = max(worst, float(np.max(np.abs(got.dense(0, hi) - ref.dense(0, hi)))))
    ok = all(len(v) == 500 for v in by_kind.values()) and len(by_kind) == 4 and failures == 0 \
        and worst <= 1e-10
    report(6, ok, f"closure: {', '.join(f'{k} {len(v)}' for k, v in sorted(by_kind.items()))}, "
                  f"{failures} failures, equality cases max error {worst:.1e}")
    assert ok


def test_criterion_07_karlin(report):
    recs = records("karlin")
    counts = statuses(recs)
    clause = all(all(r["report"]["clauses"].values()) for r in recs)
    instances = len({r["instance"] for r in recs})
    ok = instances == 500 and counts[I.VIOLATED] == 0 and counts[I.INCONCLUSIVE] == 0 and clause
    report(7, ok, f"sign-change lemma: {len(recs)} difference sequences from {instances} chains, "
                  f"{counts}, all clauses {clause}")
    assert ok


def test_criterion_08_concave(report):
    recs = records("concave")
    counts = statuses(recs)
    weights = sorted({r["weight"] for r in recs})
    linear = max(abs(r["verdict"]["margin"]) for r in recs if r["weight"] == "linear")
    ok = (len(recs) == 1000 and len(weights) == 5 and counts[I.VIOLATED] == 0
          and counts[I.INCONCLUSIVE] == 0 and linear <= 1e-10)
    report(8, ok, f"concave dominance: {counts} over {weights}, linear |margin| <= {linear:.1e}")
    assert ok


def test_criterion_09_ehm_choi_xia(report):
    recs = records("ehm")
    plain = [r for r in recs if "choi_xia" not in r]
    counts = statuses(plain)
    cx = L.check_choi_xia([0.5] * 12, 12, EPS)
    errs = max(cx.d_m.error_bound, cx.d_m1.error_bound, cx.v_po.error_bound)
    chain = cx.d_m.value < cx.d_m1.value < cx.v_po.value
    ok = (len(plain) == 500 and counts[I.VIOLATED] == 0 and counts[I.INCONCLUSIVE] == 0
          and cx.condition_met and cx.status == I.HOLDS and chain and errs <= 1e-10)
    report(9, ok, f"Ehm bound: {counts}; equal-p lambda=6: d12={cx.d_m.value:.3e} < "
                  f"d13={cx.d_m1.value:.5f} < V={cx.v_po.value:.5f}, TV error {errs:.1e}")
    assert ok


def _gamma_entropy(a, b):
    return a + math.log(b) + special.gammaln(a) + (1 - a) * special.digamma(a)


def _gamma_kl(a1, b1, a2, b2):
    return ((a1 - a2) * special.digamma(a1) - special.gammaln(a1) + special.gammaln(a2)
            + a2 * (math.log(b2) - math.log(b1)) + a1 * (b1 - b2) / b2)


def test_criterion_10_gamma(report):
    t0 = time.perf_counter()
    oracle = 0.0
    for a, b in ((0.5, 1.0), (1.0, 1.0), (2.0, 3.0), (7.5, 0.4)):
        oracle = max(oracle, abs(L.differential_entropy(L.pdf_gamma(a, b)).value - _gamma_entropy(a, b)))
    for p, q in (((2.0, 1.0), (2.0, 2.0)), ((3.0, 1.0), (5.0, 0.5)), ((1.0, 2.0), (2.5, 1.0))):
        oracle = max(oracle, abs(L.kl_continuous(L.pdf_gamma(*p), L.pdf_gamma(*q)).value - _gamma_kl(*p, *q)))

    eligible = [c for c in GAMMA_CONFIGS if min(c[0]) >= 1.0 and len(c[0]) <= 3]
    minent = [L.check_gamma_minentropy(a, b, n_perturbations=50, rng_seed=SEED) for a, b in eligible]
    minent_bad = sum(v.context["counts"][I.VIOLATED] for v in minent)
    minent_inc = sum(v.context["counts"][I.INCONCLUSIVE] for v in minent)
    minent_n = sum(v.context["samples"] for v in minent)

    tri = [v for a, b in GAMMA_CONFIGS for v in L.check_gamma_triangle(a, b)]
    tri_bad = sum(v.status != I.HOLDS for v in tri)

    # grid halving: both resolutions agree within the coarse run's claimed error
    halving = []
    for a, b in GAMMA_CONFIGS[:2]:
        fine = L.weighted_gamma_sum(a, b)
        coarse = L.weighted_gamma_sum(a, b, n_nodes=2049, inner_nodes=513)
        g = L.pdf_gamma(sum(a), float(np.dot(a, b)) / sum(a))
        for fn in (L.differential_entropy, lambda d: L.kl_continuous(d, g)):
            x, y = fn(fine), fn(coarse)
            halving.append(abs(x.value - y.value) <= x.error_bound + y.error_bound)
    elapsed = time.perf_counter() - t0
    ok = (oracle <= 1e-4 and minent_bad == 0 and minent_inc == 0 and tri_bad == 0
          and all(halving) and elapsed < 120.0)
    report(10, ok, f"gamma: closed-form error {oracle:.1e}, min-entropy {minent_n} configurations "
                   f"({minent_bad} violated), triangle {len(tri)} verdicts ({tri_bad} not holding), "
                   f"grid halving {sum(halving)}/{len(halving)}, {elapsed:.1f}s")
    assert ok


def test_criterion_11_determinism(report, tmp_path):
    outputs = []
    for run in range(2):
        for fmt in ("json", "csv"):
            path = tmp_path / f"{run}.{fmt}"
            main(["verify", "triangle", "--seed", "17", "--format", fmt, "--out", str(path)])
            outputs.append(path.read_bytes())
    ok = outputs[0] == outputs[2] and outputs[1] == outputs[3] and len(outputs[0]) > 0
    report(11, ok, f"determinism: two verify runs byte-identical in json ({len(outputs[0])} bytes) "
                   f"and csv ({len(outputs[1])} bytes)")
    assert ok
