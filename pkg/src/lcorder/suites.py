"""Seeded instance suites that drive the inequality checks.

Every instance draws from its own generator, keyed by ``(seed, crc32(suite
name), index)``, so any single instance can be replayed without running the
ones before it and results do not depend on evaluation order.
"""

from __future__ import annotations

import math

import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from . import continuous as C
from . import inequalities as I
from . import pmf as P
from .divergence import DivergenceValue, ehm_bound, total_variation
from .lc_order import LC_TOL
from .pmf import Pmf, best_mean


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    eps_trunc: float = P.DEFAULT_EPS_TRUNC
    tolerances: dict = field(default_factory=lambda: {"mean": I.EQUAL_MEAN_TOL, "lc": LC_TOL})
    instances: Optional[int] = None
    draws: int = 200
    strict: bool = False

    def __post_init__(self):
        if not 0.0 < self.eps_trunc <= 1e-6:
            raise P.DomainError("eps_trunc must lie in (0, 1e-6]")
        for k, v in self.tolerances.items():
            if not v > 0.0:
                raise P.DomainError(f"tolerance {k!r} must be positive")
        if self.instances is not None and self.instances < 0:
            raise P.DomainError("instances must be non-negative")

    @property
    def mean_tol(self) -> float:
        return self.tolerances.get("mean", I.EQUAL_MEAN_TOL)

    @property
    def lc_tol(self) -> float:
        return self.tolerances.get("lc", LC_TOL)


def instance_rng(seed: int, suite: str, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(suite.encode()), int(index)])


# ---------------------------------------------------------------------------
# Instance generators
# ---------------------------------------------------------------------------

FINITE_TOPS = ("binomial", "bernoulli_sum", "explicit")
ALL_TOPS = FINITE_TOPS + ("poisson", "geometric", "negbinomial")


def random_top(rng: np.random.Generator, finite: bool = False,
               eps_trunc: float = P.DEFAULT_EPS_TRUNC, max_n: int = 12) -> Pmf:
    """A random pmf with interval support, used as the top of a chain."""
    kind = str(rng.choice(FINITE_TOPS if finite else ALL_TOPS))
    if kind == "binomial":
        return P.binomial(int(rng.integers(1, max_n + 1)), float(rng.uniform(0.05, 0.95)))
    if kind == "bernoulli_sum":
        return P.bernoulli_sum(rng.uniform(0.05, 0.95, int(rng.integers(1, max_n + 1))))
    if kind == "explicit":
        length = int(rng.integers(2, max_n + 2))
        lw = np.cumsum(rng.normal(0.0, 1.0, length))
        w = np.exp(lw - lw.max())
        return P.Pmf(0, w / w.sum(), label="explicit")
    if kind == "poisson":
        return P.poisson(float(rng.uniform(0.2, 6.0)), eps_trunc)
    if kind == "geometric":
        return P.geometric(float(rng.uniform(0.25, 0.85)), eps_trunc)
    return P.negbinomial(float(rng.uniform(0.3, 4.0)), float(rng.uniform(0.3, 0.85)), eps_trunc)


TRIANGLE_MODES = ("eq1", "eq2", "both")
QUADRANGLE_MODES = ("eq5", "eq6", "both")


def triangle_instance(rng, mode: str, eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> dict:
    """A chain ``f <=_lc g <=_lc h``.

    ``eq1`` matches the means of f and g; ``eq2`` those of g and h (with
    full, finite supports so every divergence in the reverse inequality is
    finite); ``both`` does both.
    """
    reverse = mode in ("eq2", "both")
    h = random_top(rng, finite=reverse, eps_trunc=eps_trunc)
    g = P.random_lc_minorant(h, rng=rng, target_mean="match" if reverse else "random",
                             full_support=reverse)
    f = P.random_lc_minorant(g, rng=rng, target_mean="match" if mode != "eq2" else "random",
                             full_support=reverse)
    return {"f": f, "g": g, "h": h, "mode": mode}


def quadrangle_instance(rng, mode: str, eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> dict:
    """A chain ``f <=_lc g <=_lc g2 <=_lc h`` with ``E(f)=E(g)`` (eq5) and/or ``E(g2)=E(h)`` (eq6)."""
    reverse = mode in ("eq6", "both")
    h = random_top(rng, finite=reverse, eps_trunc=eps_trunc)
    g2 = P.random_lc_minorant(h, rng=rng, target_mean="match" if reverse else "random",
                              full_support=reverse)
    g = P.random_lc_minorant(g2, rng=rng, target_mean="random", full_support=reverse)
    f = P.random_lc_minorant(g, rng=rng, target_mean="match" if mode != "eq6" else "random",
                             full_support=reverse)
    return {"f": f, "g": g, "g2": g2, "h": h, "mode": mode}


def equal_mean_pairs(inst: dict) -> list:
    """``(smaller, larger)`` pairs of a triangle instance sharing their mean."""
    out = []
    if inst["mode"] in ("eq1", "both"):
        out.append(("f-g", inst["f"], inst["g"]))
    if inst["mode"] in ("eq2", "both"):
        out.append(("g-h", inst["g"], inst["h"]))
    return out


def difference(f: Pmf, g: Pmf) -> np.ndarray:
    lo, hi = min(f.lo, g.lo), max(f.hi, g.hi)
    return f.dense(lo, hi) - g.dense(lo, hi)


def concave_tables(rng, length: int, center: float) -> dict:
    """The five concave weight tables of the dominance suite on ``0..length-1``."""
    i = np.arange(length, dtype=float)
    a, b = rng.normal(0.0, 1.0, 2)
    cap = float(rng.uniform(0.0, max(length - 1, 1)))
    slopes = np.sort(rng.normal(0.0, 1.0, max(length - 1, 0)))[::-1]
    a2, b2 = rng.normal(0.0, 1.0, 2)
    return {
        "linear": a * i + b,
        "neg_quadratic": -(i - center) ** 2,
        "capped_linear": np.minimum(i, cap),
        "concave_spline": np.concatenate(([0.0], np.cumsum(slopes))),
        "min": np.minimum(a * i + b, a2 * i + b2),
    }


def random_ps(rng, max_n: int) -> np.ndarray:
    return rng.uniform(0.02, 0.98, int(rng.integers(1, max_n + 1)))


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _record(suite: str, index: int, status: str, **extra) -> dict:
    rec = {"suite": suite, "instance": index, "status": status}
    rec.update(extra)
    return rec


def _verdict_record(suite, index, v: I.Verdict, **extra) -> dict:
    return _record(suite, index, v.status, verdict=v.to_dict(), **extra)


def suite_triangle(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "triangle", index)
    inst = triangle_instance(rng, TRIANGLE_MODES[index % 3], cfg.eps_trunc)
    v = I.check_triangle(inst["f"], inst["g"], inst["h"], cfg.mean_tol, cfg.lc_tol)
    return [_verdict_record("triangle", index, v, mode=inst["mode"], top=inst["h"].label or "explicit")]


def suite_quadrangle(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "quadrangle", index)
    inst = quadrangle_instance(rng, QUADRANGLE_MODES[index % 3], cfg.eps_trunc)
    v = I.check_quadrangle(inst["f"], inst["g"], inst["g2"], inst["h"], cfg.mean_tol, cfg.lc_tol)
    return [_verdict_record("quadrangle", index, v, mode=inst["mode"], top=inst["h"].label or "explicit")]


def maxent_target(index: int, rng, eps_trunc: float) -> Pmf:
    """Index 0..11 gives ``bi(index+1, p)``; later indices give ``po(lambda)``, ``lambda <= 6``."""
    if index < 12:
        return P.binomial(index + 1, float(rng.uniform(0.05, 0.95)))
    return P.poisson(float(rng.uniform(0.1, 6.0)), eps_trunc)


def suite_maxent(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "maxent", index)
    g = maxent_target(index, rng, cfg.eps_trunc)
    v = I.check_maxent(g, cfg.draws, int(rng.integers(2 ** 63)))
    return [_verdict_record("maxent", index, v, g=g.label)]


def suite_iprojection(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "iprojection", index)
    h = random_top(rng, eps_trunc=cfg.eps_trunc)
    g = P.random_lc_minorant(h, rng=rng, target_mean="random")
    v = I.check_iprojection(g, h, cfg.draws, int(rng.integers(2 ** 63)))
    return [_verdict_record("iprojection", index, v, h=h.label or "explicit")]


def suite_approx(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "approx", index)
    ps = random_ps(rng, 10)
    n, lam = ps.size, float(ps.sum())
    table = I.best_binomial(ps, 4 * n, eps_trunc=cfg.eps_trunc)
    grid = list(range(math.floor(lam) + 1, 4 * n + 1))
    limit = I.check_monotone_limit("binomial", lam, grid, cfg.eps_trunc) if len(grid) > 1 else []
    argmin_ok = table.rows[table.argmin_row].m == n
    status = I.worst_status([table.status] + [v.status for v in limit]
                            + [I.HOLDS if argmin_ok else I.VIOLATED])
    agg = I._aggregate(list(table.verdicts) + limit, {"check": "approx"})
    return [_record("approx", index, status, ps=ps.tolist(), argmin_m=table.rows[table.argmin_row].m,
                    column=[r.kl_value.value for r in table.rows],
                    poisson=table.poisson_row.kl_value.value, verdict=agg.to_dict())]


def suite_negbinomial(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "negbinomial", index)
    rs = rng.uniform(0.15, 0.95, int(rng.integers(1, 7)))
    sc = I.scenario_geometric(rs, eps_trunc=cfg.eps_trunc)
    table = sc["table"]
    verdicts = list(table.verdicts) + sc["monotone_limit"]
    agg = I._aggregate(verdicts, {"check": "negbinomial"})
    return [_record("negbinomial", index, agg.status, rs=rs.tolist(),
                    column=[r.kl_value.value for r in table.rows], verdict=agg.to_dict())]


CLOSURE_SAMPLERS = {
    "liggett": lambda rng: {"k": int(rng.integers(1, 9)), "m": int(rng.integers(1, 9)),
                            "p": float(rng.uniform(0.05, 0.95))},
    "poisson_limit_ulc": lambda rng: {"lam": float(rng.uniform(0.2, 5.0)),
                                      "mu": float(rng.uniform(0.2, 5.0))},
    "davenport_polya": lambda rng: {"k": float(rng.uniform(0.3, 4.0)), "m": float(rng.uniform(0.3, 4.0)),
                                    "r": float(rng.uniform(0.2, 0.9))},
    "poisson_limit_lcx": lambda rng: {"lam": float(rng.uniform(0.2, 5.0)),
                                      "mu": float(rng.uniform(0.2, 5.0))},
}


def suite_closure(cfg: RunConfig, index: int) -> list:
    out = []
    for kind, sampler in CLOSURE_SAMPLERS.items():
        rng = instance_rng(cfg.seed, "closure:" + kind, index)
        params = sampler(rng)
        v = I.check_convolution_closure(kind, params, int(rng.integers(2 ** 63)),
                                        eps_trunc=cfg.eps_trunc)
        out.append(_verdict_record("closure", index, v, kind=kind))
    return out


def suite_karlin(cfg: RunConfig, index: int) -> list:
    # the same chains as the triangle suite
    rng = instance_rng(cfg.seed, "triangle", index)
    inst = triangle_instance(rng, TRIANGLE_MODES[index % 3], cfg.eps_trunc)
    out = []
    for name, a, b in equal_mean_pairs(inst):
        rep = I.karlin_partial_sums(difference(a, b), cfg.mean_tol)
        out.append(_record("karlin", index, rep.status, pair=name, report=rep.to_dict()))
    return out


def suite_concave(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "concave", index)
    # the stored weighted sum of a truncated top misses about slope * (tail
    # first moment); a deeper cut keeps that well below the linear-case margin
    g = random_top(rng, eps_trunc=cfg.eps_trunc * 1e-3)
    f = P.random_lc_minorant(g, rng=rng, target_mean="match")
    out = []
    for name, w in concave_tables(rng, g.hi + 1, best_mean(g)).items():
        v = I.check_concave_dominance(f, g, w, cfg.mean_tol, cfg.lc_tol)
        out.append(_verdict_record("concave", index, v, weight=name))
    return out


def suite_ehm(cfg: RunConfig, index: int) -> list:
    rng = instance_rng(cfg.seed, "ehm", index)
    ps = random_ps(rng, 12)
    fs = P.bernoulli_sum(ps)
    tv = total_variation(fs, P.binomial(ps.size, float(ps.mean())))
    v = I.judge(DivergenceValue(ehm_bound(ps)), tv, {"inequality": "ehm bound >= V(f^S, bi(n,pbar))"})
    out = [_verdict_record("ehm", index, v, ps=ps.tolist())]
    if index == 0:
        rep = I.check_choi_xia([0.5] * 12, 12, cfg.eps_trunc)
        out.append(_record("ehm", index, I.HOLDS if rep.status == I.HOLDS else I.VIOLATED,
                           choi_xia=rep.to_dict()))
    return out


GAMMA_CONFIGS = (([2.0, 3.0], [1.0, 2.0]), ([1.0, 2.0, 1.5], [1.0, 2.0, 0.5]),
                 ([0.5, 1.5], [1.0, 2.0]), ([1.0, 1.0], [0.5, 1.5]))


def suite_gamma(cfg: RunConfig, index: int) -> list:
    alphas, betas = GAMMA_CONFIGS[index % len(GAMMA_CONFIGS)]
    rng = instance_rng(cfg.seed, "gamma", index)
    out = []
    if min(alphas) >= 1.0:
        v = C.check_gamma_minentropy(alphas, betas, 5, int(rng.integers(2 ** 63)))
        out.append(_verdict_record("gamma", index, v, check="minentropy"))
    vs = C.check_gamma_triangle(alphas, betas)
    agg = I._aggregate(vs, {"check": "gamma_triangle", "alphas": alphas, "betas": betas})
    out.append(_verdict_record("gamma", index, agg, check="triangle"))
    return out


def suite_fuzz(cfg: RunConfig, index: int) -> list:
    mode = ("unconstrained", "liggett", "reflexive")[index % 3]
    found = I.fuzz_open_problem(20, [cfg.seed, zlib.crc32(b"fuzz"), index], mode)
    return [_record("open-problem-fuzz", index, I.HOLDS, mode=mode, counterexamples=len(found),
                    found=found)]


@dataclass(frozen=True)
class Suite:
    run: Callable[[RunConfig, int], list]
    default_instances: int


SUITES = {
    "triangle": Suite(suite_triangle, 500),
    "quadrangle": Suite(suite_quadrangle, 500),
    "maxent": Suite(suite_maxent, 18),
    "iprojection": Suite(suite_iprojection, 10),
    "approx": Suite(suite_approx, 50),
    "negbinomial": Suite(suite_negbinomial, 50),
    "closure": Suite(suite_closure, 500),
    "karlin": Suite(suite_karlin, 500),
    "concave": Suite(suite_concave, 200),
    "ehm": Suite(suite_ehm, 500),
    "gamma": Suite(suite_gamma, 4),
    "open-problem-fuzz": Suite(suite_fuzz, 30),
}


def run_suite(name: str, cfg: RunConfig, only: Optional[int] = None) -> Iterator[dict]:
    """Yield records of suite ``name`` in instance order."""
    suite = SUITES[name]
    count = suite.default_instances if cfg.instances is None else cfg.instances
    indices = [only] if only is not None else range(count)
    for i in indices:
        yield from suite.run(cfg, i)


def summarize(records) -> dict:
    counts = {I.HOLDS: 0, I.VIOLATED: 0, I.INCONCLUSIVE: 0}
    for r in records:
        counts[r["status"]] += 1
    return counts


def passed(counts: dict, strict: bool = False) -> bool:
    return counts[I.VIOLATED] == 0 and (not strict or counts[I.INCONCLUSIVE] == 0)
