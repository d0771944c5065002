"""Executable checks of the entropy inequalities implied by ``<=_lc``.

Every check returns a three-state :class:`Verdict`. An inequality is only
reported as violated when it fails by more than the accumulated error
bounds of its two sides; failed hypotheses and non-finite divergences give
``inconclusive``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import pmf as P
from ._numeric import EPS, fsum, second_differences
from .divergence import DivergenceValue, cross_term, ehm_bound, entropy, kl, total_variation
from .lc_order import LC_TOL, ZERO_TOL, LcReport, is_log_concave, is_ulc_order_k, lc_le, sign_profile
from .pmf import DomainError, Pmf, best_mean

HOLDS = "holds"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
_RANK = {HOLDS: 0, INCONCLUSIVE: 1, VIOLATED: 2}

EQUAL_MEAN_TOL = 1e-10
EQUALITY_TV_TOL = 1e-6
ENTROPY_TIE = 1e-13


@dataclass(frozen=True)
class Verdict:
    status: str
    lhs: DivergenceValue
    rhs: DivergenceValue
    margin: float
    context: dict = field(default_factory=dict)

    @property
    def error(self) -> float:
        return self.lhs.error_bound + self.rhs.error_bound

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "margin": self.margin if math.isfinite(self.margin) else None,
            "context": self.context,
        }


def judge(lhs: DivergenceValue, rhs: DivergenceValue, context: Optional[dict] = None,
          strict: bool = False) -> Verdict:
    """Verdict on ``lhs >= rhs`` (``lhs > rhs`` beyond error when ``strict``)."""
    ctx = dict(context or {})
    if not (lhs.finite and rhs.finite):
        ctx["reason"] = "non-finite divergence"
        return Verdict(INCONCLUSIVE, lhs, rhs, math.nan, ctx)
    margin = lhs.value - rhs.value
    err = lhs.error_bound + rhs.error_bound
    if strict:
        if margin > err:
            status = HOLDS
        elif margin < -err:
            status = VIOLATED
        else:
            status = INCONCLUSIVE
            ctx["reason"] = "strict gap not resolved beyond error"
    else:
        status = HOLDS if margin >= -err else VIOLATED
    return Verdict(status, lhs, rhs, margin, ctx)


def _inconclusive(reason: str, context: Optional[dict] = None) -> Verdict:
    ctx = dict(context or {})
    ctx["reason"] = reason
    zero = DivergenceValue(0.0)
    return Verdict(INCONCLUSIVE, zero, zero, math.nan, ctx)


def worst_status(statuses: Iterable[str]) -> str:
    return max(statuses, key=_RANK.__getitem__, default=HOLDS)


def _aggregate(verdicts: Sequence[Verdict], context: dict) -> Verdict:
    """One verdict standing for many: status is the worst, sides from the tightest."""
    if not verdicts:
        return _inconclusive("no samples", context)
    status = worst_status(v.status for v in verdicts)

    def slack(v):
        return v.margin + v.error if math.isfinite(v.margin) else math.inf

    idx = min(range(len(verdicts)), key=lambda k: (-_RANK[verdicts[k].status], slack(verdicts[k])))
    v = verdicts[idx]
    counts = {s: sum(1 for x in verdicts if x.status == s) for s in (HOLDS, VIOLATED, INCONCLUSIVE)}
    ctx = dict(context)
    ctx.update(samples=len(verdicts), counts=counts, worst_sample=idx, worst_context=v.context)
    return Verdict(status, v.lhs, v.rhs, v.margin, ctx)


def _lc_failures(pairs, tol: float = LC_TOL) -> Optional[str]:
    for name, (a, b) in pairs:
        rep = lc_le(a, b, tol)
        if not rep.verdict:
            return f"hypothesis {name} failed ({rep.failure_kind} at {rep.witness_index})"
    return None


def _same_mean(a: Pmf, b: Pmf, tol: float) -> bool:
    return abs(best_mean(a) - best_mean(b)) <= tol


# ---------------------------------------------------------------------------
# Triangle and quadrangle inequalities
# ---------------------------------------------------------------------------


def _direction(lhs, rhs, identity, name) -> Verdict:
    v = judge(lhs, rhs, {"inequality": name})
    if math.isfinite(v.margin):
        v.context["identity"] = identity
        v.context["identity_gap"] = abs(v.margin - identity)
    return v


def _combine(parts: dict, context: dict) -> Verdict:
    # a direction whose divergences are infinite cannot be evaluated; when
    # another direction was, it alone decides and the first is listed as skipped
    evaluated = [k for k in parts if math.isfinite(parts[k].margin)]
    keys = evaluated or list(parts)
    status = worst_status(parts[k].status for k in keys)

    def rank(k):
        v = parts[k]
        return (-_RANK[v.status], v.margin + v.error if math.isfinite(v.margin) else math.inf)

    main = parts[min(keys, key=rank)]
    ctx = dict(context)
    ctx["checked"] = keys
    skipped = [k for k in parts if k not in keys]
    if skipped:
        ctx["skipped"] = skipped
    for k in parts:
        ctx[k] = {"status": parts[k].status, "margin": parts[k].margin
                  if math.isfinite(parts[k].margin) else None, **parts[k].context}
    return Verdict(status, main.lhs, main.rhs, main.margin, ctx)


def check_triangle(f: Pmf, g: Pmf, h: Pmf, mean_tol: float = EQUAL_MEAN_TOL,
                   lc_tol: float = LC_TOL) -> Verdict:
    """``D(f|h) >= D(f|g) + D(g|h)`` and/or ``D(h|f) >= D(h|g) + D(g|f)``.

    Requires ``f <=_lc g <=_lc h``. The first form is checked when f and g
    share their mean, the second when g and h do.
    """
    bad = _lc_failures([("f<=lc g", (f, g)), ("g<=lc h", (g, h))], lc_tol)
    if bad:
        return _inconclusive(bad)
    parts = {}
    if _same_mean(f, g, mean_tol):
        parts["eq1"] = _direction(kl(f, h), kl(f, g) + kl(g, h), cross_term(f, g, g, h),
                                  "D(f|h) >= D(f|g) + D(g|h)")
    if _same_mean(g, h, mean_tol):
        parts["eq2"] = _direction(kl(h, f), kl(h, g) + kl(g, f), cross_term(h, g, g, f),
                                  "D(h|f) >= D(h|g) + D(g|f)")
    if not parts:
        return _inconclusive("neither E(f)=E(g) nor E(g)=E(h)",
                             {"means": [best_mean(f), best_mean(g), best_mean(h)]})
    return _combine(parts, {})


def check_quadrangle(f: Pmf, g: Pmf, g2: Pmf, h: Pmf, mean_tol: float = EQUAL_MEAN_TOL,
                     lc_tol: float = LC_TOL) -> Verdict:
    """``D(f|h) + D(g|g2) >= D(f|g2) + D(g|h)`` when E(f)=E(g), and
    ``D(h|f) + D(g2|g) >= D(g2|f) + D(h|g)`` when E(g2)=E(h),
    for a chain ``f <=_lc g <=_lc g2 <=_lc h``."""
    bad = _lc_failures([("f<=lc g", (f, g)), ("g<=lc g2", (g, g2)), ("g2<=lc h", (g2, h))], lc_tol)
    if bad:
        return _inconclusive(bad)
    parts = {}
    if _same_mean(f, g, mean_tol):
        parts["eq5"] = _direction(kl(f, h) + kl(g, g2), kl(f, g2) + kl(g, h),
                                  cross_term(f, g, g2, h), "D(f|h)+D(g|g2) >= D(f|g2)+D(g|h)")
    if _same_mean(g2, h, mean_tol):
        parts["eq6"] = _direction(kl(h, f) + kl(g2, g), kl(g2, f) + kl(h, g),
                                  cross_term(h, g2, g, f), "D(h|f)+D(g2|g) >= D(g2|f)+D(h|g)")
    if not parts:
        return _inconclusive("neither E(f)=E(g) nor E(g2)=E(h)")
    return _combine(parts, {})


# ---------------------------------------------------------------------------
# Concave functions and the sign-change lemma
# ---------------------------------------------------------------------------


def _weighted_sum(f: Pmf, w: np.ndarray) -> DivergenceValue:
    if f.hi >= w.size:
        raise DomainError(f"weight table covers 0..{w.size - 1}, pmf reaches {f.hi}")
    terms = f.weights * w[f.lo:f.hi + 1]
    err = 64 * EPS * (fsum(np.abs(terms)) + 1.0)
    if f.truncated:
        last = float(w[f.hi])
        slope = float(w[f.hi] - w[f.hi - 1]) if f.hi > 0 else 0.0
        err += f.tail_bound * (abs(last) + abs(slope) * (f.hi + 2.0))
    return DivergenceValue(fsum(terms), err)


def check_concave_dominance(f: Pmf, g: Pmf, w: Sequence[float],
                            mean_tol: float = EQUAL_MEAN_TOL, lc_tol: float = LC_TOL) -> Verdict:
    """``sum f_i w(i) >= sum g_i w(i)`` for concave ``w`` given as a table on 0, 1, ...

    Requires ``f <=_lc g`` and equal means.
    """
    w = np.asarray(w, dtype=float)
    d2 = second_differences(w)
    if np.any(d2 > 1e-12 * (1.0 + np.abs(w[1:-1]))):
        raise DomainError("weight table is not concave")
    bad = _lc_failures([("f<=lc g", (f, g))], lc_tol)
    if bad:
        return _inconclusive(bad)
    if not _same_mean(f, g, mean_tol):
        return _inconclusive("E(f) != E(g)")
    return judge(_weighted_sum(f, w), _weighted_sum(g, w), {"inequality": "sum f w >= sum g w"})


@dataclass(frozen=True)
class KarlinReport:
    status: str
    signs: tuple
    partial_signs: tuple
    max_double_partial: float
    clauses: dict
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {"status": self.status, "signs": list(self.signs),
                "partial_signs": list(self.partial_signs),
                "max_double_partial": self.max_double_partial,
                "clauses": self.clauses, "reason": self.reason}


def karlin_partial_sums(a: Sequence[float], tol: float = EQUAL_MEAN_TOL,
                        zero_tol: float = ZERO_TOL) -> KarlinReport:
    """Sign structure behind the concave-function lemma.

    For ``sum a = sum i a_i = 0`` with ``{a > 0}`` an interval: ``a`` has sign
    pattern (-, +, -) or vanishes, the partial sums ``A_j`` change sign once
    (-, +), and every double partial sum is ``<= 0``.
    """
    a = np.asarray(a, dtype=float)
    i = np.arange(a.size)
    s0, s1 = fsum(a), fsum(i * a)
    pos = np.flatnonzero(a > zero_tol)
    interval = pos.size == 0 or pos[-1] - pos[0] + 1 == pos.size
    empty = {"sign_pattern": None, "partial_sums": None, "double_partial": None}
    if abs(s0) > tol or abs(s1) > tol * max(1.0, a.size):
        return KarlinReport(INCONCLUSIVE, (), (), math.nan, empty,
                            f"moment conditions fail: sum={s0:.3g}, first moment={s1:.3g}")
    if not interval:
        return KarlinReport(INCONCLUSIVE, (), (), math.nan, empty, "{i: a_i > 0} is not an interval")
    # a residual tilt or scale of size |s0| + |s1| (from matching the moments
    # only to tolerance) shifts entries by about that much, so smaller
    # entries carry no sign information
    z = zero_tol + 10.0 * (abs(s0) + abs(s1))
    prof = sign_profile(a, z)
    A = np.cumsum(a)
    # a partial sum of k noise-level terms is itself noise up to k * z
    pprof = sign_profile(A, z * a.size)
    AA = np.cumsum(A)
    top = float(np.max(AA)) if AA.size else 0.0
    if prof.signs == ():
        c1 = c2 = True
    else:
        c1 = prof.signs == ("-", "+", "-")
        c2 = pprof.signs == ("-", "+")
    c3 = top <= tol
    clauses = {"sign_pattern": c1, "partial_sums": c2, "double_partial": c3}
    status = HOLDS if (c1 and c2 and c3) else VIOLATED
    return KarlinReport(status, prof.signs, pprof.signs, top, clauses)


# ---------------------------------------------------------------------------
# Entropy extremes and I-projection
# ---------------------------------------------------------------------------


def _children(rng_seed, n: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(rng_seed).spawn(n)]


def check_maxent(g: Pmf, n_samples: int = 200, rng_seed=0) -> Verdict:
    """``H(f) <= H(g)`` for random ``f <=_lc g`` with ``E(f) = E(g)``, ``g`` log-concave.

    A draw whose entropy ties with ``g`` must coincide with it (total
    variation below ``EQUALITY_TV_TOL``).
    """
    rep = is_log_concave(g)
    if not rep.verdict:
        return _inconclusive(f"g is not log-concave ({rep.failure_kind})")
    hg = entropy(g)
    out = []
    ties = 0
    for rng in _children(rng_seed, n_samples):
        f = P.random_lc_minorant(g, rng=rng, full_support=bool(rng.integers(2)))
        hf = entropy(f)
        v = judge(hg, hf, {"inequality": "H(g) >= H(f)", "support": [f.lo, f.hi]})
        if abs(hg.value - hf.value) <= ENTROPY_TIE:
            ties += 1
            tv = total_variation(f, g).value
            v.context["tie_tv"] = tv
            if tv > EQUALITY_TV_TOL:
                v = Verdict(VIOLATED, v.lhs, v.rhs, v.margin, {**v.context, "reason": "tie without equality"})
        out.append(v)
    return _aggregate(out, {"check": "maxent", "g": g.label, "ties": ties})


def check_iprojection(g: Pmf, h: Pmf, n_samples: int = 200, rng_seed=0) -> Verdict:
    """``D(f|h) >= D(g|h)`` over random ``f`` in ``{f <=_lc g, E(f) = E(g)}``.

    The gap is also checked against ``D(f|g)``, the lower bound the
    triangle inequality gives for it.
    """
    bad = _lc_failures([("g<=lc h", (g, h))])
    if bad:
        return _inconclusive(bad)
    dgh = kl(g, h)
    out = []
    for rng in _children(rng_seed, n_samples):
        f = P.random_lc_minorant(g, rng=rng, full_support=bool(rng.integers(2)))
        dfh = kl(f, h)
        v = judge(dfh, dgh, {"inequality": "D(f|h) >= D(g|h)"})
        refined = judge(dfh, dgh + kl(f, g), {})
        v.context["gap_minus_dfg"] = refined.margin
        if refined.status == VIOLATED:
            v = Verdict(VIOLATED, v.lhs, v.rhs, v.margin, {**v.context, "reason": "gap below D(f|g)"})
        out.append(v)
    return _aggregate(out, {"check": "iprojection", "g": g.label, "h": h.label})


# ---------------------------------------------------------------------------
# Best binomial / negative binomial approximation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApproxRow:
    m: Optional[float]
    p: float
    kl_value: DivergenceValue
    family: str = "binomial"

    def to_dict(self) -> dict:
        return {"family": self.family, "m": self.m, "p": self.p, **self.kl_value.to_dict()}


@dataclass(frozen=True)
class ApproximationTable:
    rows: tuple
    argmin_row: int
    poisson_row: Optional[ApproxRow]
    verdicts: tuple = ()

    @property
    def status(self) -> str:
        return worst_status(v.status for v in self.verdicts)

    def column(self) -> np.ndarray:
        return np.array([r.kl_value.value for r in self.rows])

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "argmin_row": self.argmin_row,
            "poisson_row": None if self.poisson_row is None else self.poisson_row.to_dict(),
            "status": self.status,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }

    def to_csv(self) -> str:
        lines = ["# lcorder approximation table, schema v1",
                 "family,m,param,kl,error_bound,finite"]
        rows = list(self.rows) + ([self.poisson_row] if self.poisson_row else [])
        for r in rows:
            kv = r.kl_value
            m = "" if r.m is None else repr(float(r.m))
            val = repr(kv.value) if kv.finite else "inf"
            lines.append(f"{r.family},{m},{r.p!r},{val},{kv.error_bound!r},{str(kv.finite).lower()}")
        return "\n".join(lines) + "\n"


def _argmin(rows) -> int:
    vals = [r.kl_value.value if r.kl_value.finite else math.inf for r in rows]
    return int(np.argmin(vals))


def _monotone(rows, label) -> list:
    out = []
    for a, b in zip(rows[:-1], rows[1:]):
        out.append(judge(b.kl_value, a.kl_value,
                         {"inequality": f"{label} non-decreasing", "m": [a.m, b.m]}))
    return out


def best_binomial(ps: Sequence[float], m_max: Optional[int] = None,
                  p_grid: Sequence[float] = (0.1, 0.3, 0.5, 0.7, 0.9),
                  eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> ApproximationTable:
    """Relative entropy from a Bernoulli sum to ``bi(m, lambda/m)`` for ``m = n..m_max``.

    The verdicts cover: the column is non-decreasing and minimized at
    ``m = n``; the Poisson row exceeds every binomial row; the three-term
    inequality against ``bi(m', p')`` for sampled ``m' >= m``; and the
    Poisson gap ``D(f|po) - D(f|bi(n, pbar)) >= D(bi(n, pbar)|po)``.
    """
    n = len(ps)
    m_max = 4 * n if m_max is None else int(m_max)
    if m_max < n:
        raise DomainError("m_max must be at least len(ps)")
    fs = P.bernoulli_sum(ps)
    lam = fsum(ps)
    bins = {m: P.binomial(m, lam / m) for m in range(n, m_max + 1)}
    rows = tuple(ApproxRow(float(m), lam / m, kl(fs, b)) for m, b in bins.items())
    po = P.poisson(lam, eps_trunc)
    prow = ApproxRow(None, lam, kl(fs, po), "poisson")

    verdicts = _monotone(rows, "D(f^S|b_m)")
    amin = _argmin(rows)
    # a later row may tie the first only within error
    verdicts.append(judge(rows[amin].kl_value, rows[0].kl_value, {"inequality": "argmin at m=n",
                                                                  "argmin_m": rows[amin].m}))
    top = max(rows, key=lambda r: r.kl_value.value)
    verdicts.append(judge(prow.kl_value, top.kl_value,
                          {"inequality": "D(f^S|po) > max_m D(f^S|b_m)"}, strict=True))
    bn = bins[n]
    verdicts.append(judge(prow.kl_value, rows[0].kl_value + kl(bn, po),
                          {"inequality": "D(f^S|po) >= D(f^S|b_n) + D(b_n|po)"}))
    ms = sorted(bins)
    for m in ms:
        for m2 in sorted({m, min(m + 1, m_max), m_max}):
            for p2 in p_grid:
                h = P.binomial(m2, p2)
                verdicts.append(judge(kl(fs, h), kl(fs, bins[m]) + kl(bins[m], h),
                                      {"inequality": "D(f^S|bi(m',p')) >= D(f^S|b_m) + D(b_m|bi(m',p'))",
                                       "m": m, "m_prime": m2, "p_prime": p2}))
    return ApproximationTable(rows, amin, prow, tuple(verdicts))


def _nb_m(m: float, mu: float, eps: float) -> Pmf:
    return P.negbinomial(m, m / (m + mu), eps)


def best_negbinomial(rs: Sequence[float], m_max: Optional[float] = None,
                     grid: Optional[Sequence[float]] = None,
                     r_grid: Sequence[float] = (0.2, 0.5, 0.8),
                     eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> ApproximationTable:
    """Relative entropy from a sum of geometrics to ``nb_m = nb(m, m/(m+mu))``.

    ``m`` runs over a real grid from ``n``. Side verdicts: ``nb_n <=_lc f^T``,
    ``H(T) >= H(nb_n)``, the Poisson gap, the three-term inequality against
    ``nb(m', r')`` and that the Poisson row exceeds every row.
    """
    n = len(rs)
    if grid is None:
        m_max = 4.0 * n if m_max is None else float(m_max)
        grid = np.arange(n, m_max + 0.25, 0.5)
    grid = [float(m) for m in grid]
    if min(grid) < n:
        raise DomainError("grid must start at m >= len(rs)")
    ft = P.geometric_sum(rs, eps_trunc)
    mu = ft.exact_mean
    nbs = {m: _nb_m(m, mu, eps_trunc) for m in grid}
    rows = tuple(ApproxRow(m, m / (m + mu), kl(ft, nbs[m]), "negbinomial") for m in grid)
    po = P.poisson(mu, eps_trunc)
    prow = ApproxRow(None, mu, kl(ft, po), "poisson")

    verdicts = _monotone(rows, "D(f^T|nb_m)")
    nb_n = nbs[grid[0]] if grid[0] == n else _nb_m(float(n), mu, eps_trunc)
    rep = lc_le(nb_n, ft)
    lcv = DivergenceValue(0.0)
    verdicts.append(Verdict(HOLDS if rep.verdict else VIOLATED, lcv, DivergenceValue(rep.margin),
                            -rep.margin, {"inequality": "nb_n <=_lc f^T", "report": rep.to_dict()}))
    verdicts.append(judge(entropy(ft), entropy(nb_n), {"inequality": "H(T) >= H(nb_n)"}))
    d_n = kl(ft, nb_n)
    verdicts.append(judge(prow.kl_value, d_n + kl(nb_n, po),
                          {"inequality": "D(f^T|po) >= D(f^T|nb_n) + D(nb_n|po)"}))
    top = max(rows, key=lambda r: r.kl_value.value)
    verdicts.append(judge(prow.kl_value, top.kl_value,
                          {"inequality": "D(f^T|po) > max_m D(f^T|nb_m)"}, strict=True))
    for m in grid:
        for m2 in sorted({m, grid[-1]}):
            for r2 in r_grid:
                h = P.negbinomial(m2, r2, eps_trunc)
                verdicts.append(judge(kl(ft, h), kl(ft, nbs[m]) + kl(nbs[m], h),
                                      {"inequality": "D(f^T|nb(m',r')) >= D(f^T|nb_m) + D(nb_m|nb(m',r'))",
                                       "m": m, "m_prime": m2, "r_prime": r2}))
    return ApproximationTable(rows, _argmin(rows), prow, tuple(verdicts))


def check_monotone_limit(kind: str, mean: float, m_grid: Sequence[float],
                         eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> list:
    """Strict decrease of ``D(b_m|po)`` along ``m_grid`` plus the triangle step.

    ``b_m`` is ``bi(m, mean/m)`` (integers ``m > mean``) or
    ``nb(m, m/(m+mean))`` (positive reals).
    """
    grid = [float(m) for m in m_grid]
    if any(b <= a for a, b in zip(grid[:-1], grid[1:])):
        raise DomainError("m_grid must be increasing")
    if kind == "binomial":
        if any(m <= mean or m != int(m) for m in grid):
            raise DomainError("binomial m_grid needs integers above the mean")
        dists = [P.binomial(int(m), mean / m) for m in grid]
    elif kind == "negbinomial":
        if any(m <= 0 for m in grid):
            raise DomainError("negbinomial m_grid needs positive reals")
        dists = [_nb_m(m, mean, eps_trunc) for m in grid]
    else:
        raise DomainError(f"unknown kind {kind!r}")
    po = P.poisson(mean, eps_trunc)
    d = [kl(b, po) for b in dists]
    out = []
    for k in range(len(grid) - 1):
        out.append(judge(d[k], d[k + 1], {"inequality": "D(b_m|po) > D(b_m'|po)",
                                          "m": grid[k], "m_prime": grid[k + 1]}, strict=True))
        out.append(judge(d[k], kl(dists[k], dists[k + 1]) + d[k + 1],
                         {"inequality": "D(b_m|po) >= D(b_m|b_m') + D(b_m'|po)",
                          "m": grid[k], "m_prime": grid[k + 1]}))
    return out


# ---------------------------------------------------------------------------
# Convolution closure
# ---------------------------------------------------------------------------

CLOSURE_KINDS = ("liggett", "davenport_polya", "poisson_limit_ulc", "poisson_limit_lcx")


def _lc_verdict(rep: LcReport, context: dict) -> Verdict:
    ctx = dict(context)
    ctx["report"] = rep.to_dict()
    return Verdict(HOLDS if rep.verdict else VIOLATED, DivergenceValue(0.0),
                   DivergenceValue(rep.margin), -rep.margin, ctx)


def check_convolution_closure(kind: str, params: dict, rng_seed=None, *,
                              f: Optional[Pmf] = None, g: Optional[Pmf] = None,
                              eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> Verdict:
    """Closure of ``<=_lc`` bounds under convolution.

    ``liggett``: ``f <=_lc bi(k,p)``, ``g <=_lc bi(m,p)`` give ``f*g <=_lc bi(k+m,p)``.
    ``davenport_polya``: ``nb(k,r) <=_lc f``, ``nb(m,r) <=_lc g`` give
    ``nb(k+m,r) <=_lc f*g``. ``poisson_limit_ulc`` / ``poisson_limit_lcx`` are
    the Poisson versions with parameters ``lam``, ``mu``. ``f`` and ``g`` are
    drawn from ``rng_seed`` unless supplied.
    """
    rng = np.random.default_rng(rng_seed)
    deep = eps_trunc * 1e-8
    if kind == "liggett":
        k, m, p = int(params["k"]), int(params["m"]), float(params["p"])
        bf, bg, target = P.binomial(k, p), P.binomial(m, p), P.binomial(k + m, p)
        f = f or P.random_lc_minorant(bf, rng=rng, target_mean="random")
        g = g or P.random_lc_minorant(bg, rng=rng, target_mean="random")
        hyp = [("f<=lc bi(k,p)", (f, bf)), ("g<=lc bi(m,p)", (g, bg))]
        below = True
    elif kind == "poisson_limit_ulc":
        lam, mu = float(params["lam"]), float(params["mu"])
        bf, bg = P.poisson(lam, eps_trunc), P.poisson(mu, eps_trunc)
        target = P.poisson(lam + mu, eps_trunc)
        f = f or P.random_lc_minorant(bf, rng=rng, target_mean="random")
        g = g or P.random_lc_minorant(bg, rng=rng, target_mean="random")
        hyp = [("f<=lc po(lam)", (f, bf)), ("g<=lc po(mu)", (g, bg))]
        below = True
    elif kind == "davenport_polya":
        k, m, r = float(params["k"]), float(params["m"]), float(params["r"])
        sf, sg = P.negbinomial_spec(k, r), P.negbinomial_spec(m, r)
        f = f or P.random_lc_majorant(sf, rng=rng, eps_trunc=deep)
        g = g or P.random_lc_majorant(sg, rng=rng, eps_trunc=deep)
        target = P.negbinomial(k + m, r, eps_trunc)
        hyp = [("nb(k,r)<=lc f", (P.realize(sf, eps_trunc), f)),
               ("nb(m,r)<=lc g", (P.realize(sg, eps_trunc), g))]
        below = False
    elif kind == "poisson_limit_lcx":
        lam, mu = float(params["lam"]), float(params["mu"])
        sf, sg = P.poisson_spec(lam), P.poisson_spec(mu)
        f = f or P.random_lc_majorant(sf, rng=rng, eps_trunc=deep)
        g = g or P.random_lc_majorant(sg, rng=rng, eps_trunc=deep)
        target = P.poisson(lam + mu, eps_trunc)
        hyp = [("po(lam)<=lc f", (P.realize(sf, eps_trunc), f)),
               ("po(mu)<=lc g", (P.realize(sg, eps_trunc), g))]
        below = False
    else:
        raise DomainError(f"unknown closure kind {kind!r}")
    ctx = {"check": "convolution_closure", "kind": kind, "params": dict(params)}
    bad = _lc_failures(hyp)
    if bad:
        return _inconclusive(bad, ctx)
    fg = P.convolve(f, g)
    rep = lc_le(fg, target) if below else lc_le(target, fg)
    return _lc_verdict(rep, ctx)


# ---------------------------------------------------------------------------
# Total variation: Ehm and Choi-Xia
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChoiXiaReport:
    lam: float
    r: int
    delta: float
    m: int
    m_min: Optional[float]
    condition_met: bool
    d_m: DivergenceValue
    d_m1: DivergenceValue
    v_po: DivergenceValue
    status: str

    def to_dict(self) -> dict:
        return {"lam": self.lam, "r": self.r, "delta": self.delta, "m": self.m,
                "m_min": self.m_min, "condition_met": self.condition_met,
                "d_m": self.d_m.to_dict(), "d_m1": self.d_m1.to_dict(),
                "v_po": self.v_po.to_dict(), "status": self.status}


def check_choi_xia(ps: Sequence[float], m: int,
                   eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> ChoiXiaReport:
    """``d_m < d_{m+1} < V(f^S, po(lambda))`` with ``d_m = V(f^S, bi(m, lambda/m))``.

    Asserted only inside the hypothesis region ``r > 1 + (1+delta)^2``,
    ``m >= max(n, lambda^2 / (r - 1 - (1+delta)^2))``; outside it the
    quantities are reported with status ``condition_not_met``.
    """
    n = len(ps)
    m = int(m)
    if m < n:
        raise DomainError("m must be at least len(ps)")
    lam = fsum(ps)
    r = math.floor(lam)
    delta = lam - r
    gap = r - 1 - (1 + delta) ** 2
    fs = P.bernoulli_sum(ps)
    d_m = total_variation(fs, P.binomial(m, lam / m))
    d_m1 = total_variation(fs, P.binomial(m + 1, lam / (m + 1)))
    v_po = total_variation(fs, P.poisson(lam, eps_trunc))
    m_min = max(n, lam * lam / gap) if gap > 0 else None
    met = gap > 0 and m >= m_min
    if not met:
        status = "condition_not_met"
    else:
        a = judge(d_m1, d_m, strict=True)
        b = judge(v_po, d_m1, strict=True)
        status = worst_status([a.status, b.status])
    return ChoiXiaReport(lam, r, delta, m, m_min, met, d_m, d_m1, v_po, status)


# ---------------------------------------------------------------------------
# Open problem: when does f <= f', g <= g' give f*g <= f'*g'?
# ---------------------------------------------------------------------------


def _random_log_concave(rng, max_len: int = 10) -> Pmf:
    pick = rng.integers(3)
    if pick == 0:
        return P.binomial(int(rng.integers(1, max_len)), rng.uniform(0.05, 0.95))
    if pick == 1:
        return P.bernoulli_sum(rng.uniform(0.05, 0.95, int(rng.integers(1, max_len))))
    length = int(rng.integers(2, max_len + 1))
    slopes = np.sort(rng.normal(0.0, rng.uniform(0.2, 2.0), length - 1))[::-1]
    lw = np.concatenate(([0.0], np.cumsum(slopes)))
    w = np.exp(lw - lw.max())
    return P.Pmf(int(rng.integers(0, 3)), w / fsum(w), label="random_lc")


def fuzz_open_problem(budget: int, rng_seed=0, mode: str = "unconstrained") -> list:
    """Search for instances where ``f <=_lc f'``, ``g <=_lc g'`` but not ``f*g <=_lc f'*g'``.

    ``mode`` is ``unconstrained`` (random log-concave ``f'``, ``g'``),
    ``liggett`` (``f' = bi(k,p)``, ``g' = bi(m,p)``) or ``reflexive``
    (``f = f'``, ``g = g'``). Each hit is returned as a replayable JSON-able
    dict; nothing is asserted.
    """
    found = []
    for t, rng in enumerate(_children(rng_seed, budget)):
        if mode == "liggett":
            p = rng.uniform(0.05, 0.95)
            fp = P.binomial(int(rng.integers(1, 8)), p)
            gp = P.binomial(int(rng.integers(1, 8)), p)
        else:
            fp, gp = _random_log_concave(rng), _random_log_concave(rng)
        if mode == "reflexive":
            f, g = fp, gp
        else:
            f = P.random_lc_minorant(fp, rng=rng, target_mean="random")
            g = P.random_lc_minorant(gp, rng=rng, target_mean="random")
        if not (lc_le(f, fp).verdict and lc_le(g, gp).verdict):
            continue
        rep = lc_le(P.convolve(f, g), P.convolve(fp, gp))
        if not rep.verdict:
            found.append({"trial": t, "mode": mode, "f": f.to_dict(), "f_prime": fp.to_dict(),
                          "g": g.to_dict(), "g_prime": gp.to_dict(), "report": rep.to_dict()})
    return found


# ---------------------------------------------------------------------------
# Bundled scenarios
# ---------------------------------------------------------------------------


def scenario_bernoulli(ps: Sequence[float], m_max: Optional[int] = None,
                       eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> dict:
    """All Bernoulli-sum statements for one ``ps``: order facts, the
    approximation table, the binomial-to-Poisson limit and the TV bounds."""
    ps = [float(p) for p in ps]
    n = len(ps)
    m_max = 4 * n if m_max is None else int(m_max)
    fs = P.bernoulli_sum(ps)
    lam = fsum(ps)
    pbar = lam / n
    table = best_binomial(ps, m_max, eps_trunc=eps_trunc)
    grid = [m for m in range(n, m_max + 1) if m > lam]
    limit = check_monotone_limit("binomial", lam, grid, eps_trunc) if len(grid) > 1 else []
    tv = total_variation(fs, P.binomial(n, pbar))
    ehm = ehm_bound(ps)
    return {
        "ulc_order_n": is_ulc_order_k(fs, n).verdict,
        "newton": lc_le(fs, P.binomial(n, pbar)).verdict,
        "table": table,
        "monotone_limit": limit,
        "ehm": judge(DivergenceValue(ehm), tv, {"inequality": "ehm bound >= V(f^S, bi(n,pbar))"}),
        "choi_xia": check_choi_xia(ps, n, eps_trunc),
    }


def scenario_geometric(rs: Sequence[float], m_max: Optional[float] = None,
                       eps_trunc: float = P.DEFAULT_EPS_TRUNC) -> dict:
    """Geometric-sum statements for one ``rs``: the negative binomial table
    with its side checks and the negative binomial to Poisson limit."""
    n = len(rs)
    table = best_negbinomial(rs, m_max, eps_trunc=eps_trunc)
    mu = fsum((1.0 - np.asarray(rs, dtype=float)) / np.asarray(rs, dtype=float))
    grid = [float(r.m) for r in table.rows]
    return {
        "n": n,
        "mean": mu,
        "table": table,
        "monotone_limit": check_monotone_limit("negbinomial", mu, grid, eps_trunc),
    }
