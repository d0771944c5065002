"""Densities on (0, inf) sampled on a grid, and the gamma analogues.

A :class:`GridPdf` stores log-density values at log-spaced nodes. Integrals
use composite Simpson in ``u = log x``; the same rule on every other node
gives a second estimate and the difference of the two is reported as the
quadrature error (Simpson's error shrinks ~16x per halving, so this is a
generous bound for smooth integrands).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gammainc, gammaincc, gammainccinv, gammaincinv, gammaln

from ._numeric import EPS, fsum
from .divergence import INFINITE, DivergenceValue
from .inequalities import Verdict, _aggregate, _inconclusive, judge
from .lc_order import (CONCAVITY, F_NOT_INTERVAL, LC_TOL, NONE, NOT_CONTAINED, LcReport)
from .pmf import DomainError

DEFAULT_NODES = 4097
DEFAULT_INNER = 1025
DEFAULT_WINDOW = 1e-8
_TINY = 1e-300


def _simpson_coeffs(n: int) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number of nodes >= 3")
    c = np.ones(n)
    c[1:-1:2] = 4.0
    c[2:-1:2] = 2.0
    return c / 3.0


def _check_nodes(n: int) -> int:
    n = int(n)
    if n < 9 or (n - 1) % 4:
        raise DomainError("node count must be 4k + 1 (k >= 2) so the halved rule is Simpson too")
    return n


@dataclass(frozen=True, eq=False)
class GridPdf:
    """A density sampled on a grid.

    ``quadrature`` is ``"simpson-log"`` (nodes geometric, weights include the
    Jacobian ``x``) or ``"simpson"`` (uniform nodes). ``support`` is the true
    support, which can be wider than the window ``[lo, hi]``;
    ``tail_bound`` is the mass outside the window. When ``log_pdf`` is given
    it evaluates the exact log-density anywhere on the support.
    """

    nodes: np.ndarray
    log_density: np.ndarray
    tail_bound: float = 0.0
    quadrature: str = "simpson-log"
    density_rel_error: float = 0.0
    label: str = ""
    support: tuple = (0.0, math.inf)
    log_pdf: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        ld = np.asarray(self.log_density, dtype=float)
        if x.shape != ld.shape or x.ndim != 1:
            raise DomainError("nodes and log_density must be 1-d of equal length")
        _check_nodes(x.size)
        if np.any(np.diff(x) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if np.any(np.isnan(ld)) or np.any(ld == math.inf):
            raise DomainError("log-density must be finite or -inf")
        if self.quadrature not in ("simpson-log", "simpson"):
            raise DomainError(f"unknown quadrature {self.quadrature!r}")
        if self.quadrature == "simpson-log" and x[0] <= 0:
            raise DomainError("log-spaced grids need positive nodes")
        for a in (x, ld):
            a.setflags(write=False)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "log_density", ld)

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    @property
    def density(self) -> np.ndarray:
        return np.exp(self.log_density)

    @cached_property
    def weights(self) -> np.ndarray:
        x = self.nodes
        n = x.size
        if self.quadrature == "simpson-log":
            h = (math.log(x[-1]) - math.log(x[0])) / (n - 1)
            return _simpson_coeffs(n) * h * x
        return _simpson_coeffs(n) * (x[-1] - x[0]) / (n - 1)

    @cached_property
    def coarse_weights(self) -> np.ndarray:
        """Simpson weights of the rule on every other node, zero elsewhere."""
        x = self.nodes
        m = (x.size - 1) // 2 + 1
        w = np.zeros(x.size)
        if self.quadrature == "simpson-log":
            h = (math.log(x[-1]) - math.log(x[0])) / (m - 1)
            w[::2] = _simpson_coeffs(m) * h * x[::2]
        else:
            w[::2] = _simpson_coeffs(m) * (x[-1] - x[0]) / (m - 1)
        return w

    def integrate(self, values: np.ndarray) -> tuple[float, float]:
        """``(fine, coarse)`` quadrature estimates of ``int values dx``."""
        v = np.asarray(values, dtype=float)
        return fsum(self.weights * v), fsum(self.coarse_weights * v)

    def mass(self) -> float:
        return self.integrate(self.density)[0]

    def mean(self) -> float:
        return self.integrate(self.nodes * self.density)[0]

    @cached_property
    def _spline(self) -> CubicSpline:
        u = np.log(self.nodes) if self.quadrature == "simpson-log" else self.nodes
        return CubicSpline(u, self.log_density, extrapolate=False)

    def log_density_at(self, x) -> np.ndarray:
        """Log-density at ``x``; exact when ``log_pdf`` is known, otherwise a
        cubic spline inside the window with linear continuation (a power law
        on log grids) outside it."""
        x = np.asarray(x, dtype=float)
        if self.log_pdf is not None:
            return self.log_pdf(x)
        log_grid = self.quadrature == "simpson-log"
        with np.errstate(divide="ignore"):
            u = np.log(x) if log_grid else x
        ua, ub = (math.log(self.lo), math.log(self.hi)) if log_grid else (self.lo, self.hi)
        s = self._spline
        out = np.asarray(s(np.clip(u, ua, ub)), dtype=float)
        below, above = u < ua, u > ub
        if np.any(below):
            out = np.where(below, s(ua) + s(ua, 1) * (u - ua), out)
        if np.any(above):
            out = np.where(above, s(ub) + s(ub, 1) * (u - ub), out)
        return out

    def header(self) -> dict:
        return {"quadrature": self.quadrature, "tail_bound": self.tail_bound,
                "density_rel_error": self.density_rel_error, "label": self.label,
                "support": [self.support[0], None if math.isinf(self.support[1]) else self.support[1]],
                "nodes": int(self.nodes.size)}

    def to_csv(self) -> str:
        lines = ["# " + json.dumps(self.header(), sort_keys=True), "node,density"]
        lines += [f"{x!r},{d!r}" for x, d in zip(self.nodes.tolist(), self.density.tolist())]
        return "\n".join(lines) + "\n"


def log_gamma_pdf(x, alpha: float, beta: float) -> np.ndarray:
    """``log gam(x; alpha, beta)``, with ``gam = beta^-alpha x^(alpha-1) e^(-x/beta) / Gamma(alpha)``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return (-alpha * math.log(beta) + (alpha - 1.0) * np.log(x) - x / beta
                - float(gammaln(alpha)))


def _gamma_window(alpha: float, beta_lo: float, beta_hi: float, eps: float) -> tuple[float, float]:
    lo = float(gammaincinv(alpha, eps)) * beta_lo
    hi = float(gammainccinv(alpha, eps)) * beta_hi
    return max(lo, _TINY), hi


def _positive(name, x) -> float:
    x = float(x)
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"{name} must be positive, got {x}")
    return x


def _log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.exp(np.linspace(math.log(lo), math.log(hi), n))


def pdf_gamma(alpha: float, beta: float, window: float = DEFAULT_WINDOW,
              n_nodes: int = DEFAULT_NODES) -> GridPdf:
    """``gam(alpha, beta)`` on ``[window-quantile, (1-window)-quantile]``."""
    alpha, beta = _positive("alpha", alpha), _positive("beta", beta)
    if not 0.0 < window < 0.5:
        raise DomainError("window must lie in (0, 0.5)")
    n_nodes = _check_nodes(n_nodes)
    lo, hi = _gamma_window(alpha, beta, beta, window)
    x = _log_grid(lo, hi, n_nodes)
    tail = float(gammainc(alpha, lo / beta) + gammaincc(alpha, hi / beta))

    def lp(t, a=alpha, b=beta):
        return log_gamma_pdf(t, a, b)

    return GridPdf(x, lp(x), tail, label=f"gamma({alpha:g},{beta:g})", log_pdf=lp)


def uniform_pdf(a: float = 0.0, b: float = 1.0, n_nodes: int = DEFAULT_NODES) -> GridPdf:
    if not b > a:
        raise DomainError("need b > a")
    x = np.linspace(a, b, _check_nodes(n_nodes))
    c = -math.log(b - a)

    def lp(t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= a) & (t <= b), c, -np.inf)

    return GridPdf(x, np.full(x.size, c), 0.0, "simpson", label=f"uniform({a:g},{b:g})",
                   support=(a, b), log_pdf=lp)


def _half_integral(x, lnear, anear, lfar, inner):
    """``int_0^{x/2} near(y) far(x - y) dy`` in log form, fine and coarse rules.

    Substitutes ``y = (x/2) e^v``. ``near`` behaves like ``y^(anear-1)`` at
    zero, so ``v`` runs down to where ``y^anear`` is negligible. The
    evaluators take ``(t, log t)``; both logs are known in closed form here.
    """
    vmin = -(40.0 / anear + 12.0)
    vmin = max(vmin, math.log(_TINY) - float(np.log(x).min()) + 1.0)
    v = np.linspace(vmin, 0.0, inner)
    h = -vmin / (inner - 1)
    cf = _simpson_coeffs(inner) * h
    cc = _simpson_coeffs((inner - 1) // 2 + 1) * 2 * h
    lx = np.log(x)[:, None]
    ly = lx + (v - math.log(2.0))[None, :]
    lz = lx + np.log1p(-0.5 * np.exp(v))[None, :]
    L = lnear(np.exp(ly), ly) + lfar(np.exp(lz), lz) + ly
    top = np.max(L, axis=1)
    top = np.where(np.isfinite(top), top, 0.0)
    E = np.exp(L - top[:, None])
    fine = E @ cf
    coarse = E[:, ::2] @ cc
    with np.errstate(divide="ignore"):
        return top + np.log(fine), top + np.log(coarse)


def _convolve_logpdf(x, lp, ap, lq, aq, inner, chunk=16):
    fine = np.empty(x.size)
    coarse = np.empty(x.size)
    for s in range(0, x.size, chunk):
        xs = x[s:s + chunk]
        f1, c1 = _half_integral(xs, lp, ap, lq, inner)
        f2, c2 = _half_integral(xs, lq, aq, lp, inner)
        fine[s:s + chunk] = np.logaddexp(f1, f2)
        coarse[s:s + chunk] = np.logaddexp(c1, c2)
    return fine, coarse


def _gamma_evaluator(alpha: float, beta: float):
    c = -alpha * math.log(beta) - float(gammaln(alpha))

    def lp(t, logt):
        return c + (alpha - 1.0) * logt - t / beta

    return lp


def _grid_evaluator(p: GridPdf, alpha: float):
    """Log-density of ``p`` from its spline in ``u = log x``, continued below
    the window as ``y^(alpha-1)``, the exact small-``y`` order of a density
    built from gammas with shape sum ``alpha``."""
    s = p._spline
    ulo, uhi = math.log(p.lo), math.log(p.hi)
    l0 = float(p.log_density[0])

    def lp(t, logt):
        inside = s(np.clip(logt, ulo, uhi))
        return np.where(logt < ulo, l0 + (alpha - 1.0) * (logt - ulo), inside)

    return lp


def weighted_gamma_sum(alphas: Sequence[float], betas: Sequence[float],
                       window: float = DEFAULT_WINDOW, n_nodes: int = DEFAULT_NODES,
                       inner_nodes: int = DEFAULT_INNER) -> GridPdf:
    """Density of ``sum beta_i X_i`` with independent ``X_i ~ gam(alpha_i, 1)``.

    Built by repeated quadrature of the convolution integral. The sum is a
    scale mixture of ``gam(alpha_+, b)`` over ``b`` between the smallest and
    largest beta, which fixes a window holding all but ``2 window`` of the mass.
    ``density_rel_error`` accumulates the fine/coarse inner-rule differences.
    """
    alphas = [_positive("alpha", a) for a in alphas]
    betas = [_positive("beta", b) for b in betas]
    if len(alphas) != len(betas) or not alphas:
        raise DomainError("alphas and betas must be non-empty and of equal length")
    n_nodes = _check_nodes(n_nodes)
    inner_nodes = _check_nodes(inner_nodes)
    if len(alphas) == 1:
        return pdf_gamma(alphas[0], betas[0], window, n_nodes)
    a_plus = fsum(alphas)
    _, top = _gamma_window(a_plus, min(betas), max(betas), window)
    label = "gamma_sum(" + ",".join(f"{a:g}*{b:g}" for a, b in zip(alphas, betas)) + ")"

    cur = None
    near = _gamma_evaluator(alphas[0], betas[0])
    acc_a, rel = alphas[0], 0.0
    for k in range(1, len(alphas)):
        a, b = alphas[k], betas[k]
        acc_a += a
        last = k == len(alphas) - 1
        # partial sums get a much deeper lower window, since the next
        # convolution samples them far below the final window
        lo, _ = _gamma_window(acc_a, min(betas[:k + 1]), max(betas[:k + 1]),
                              window if last else window * 1e-12)
        x = _log_grid(lo, top, n_nodes)

        if cur is not None:
            near = _grid_evaluator(cur, acc_a - a)
        fine, coarse = _convolve_logpdf(x, near, acc_a - a, _gamma_evaluator(a, b), a,
                                        inner_nodes)
        ok = np.isfinite(fine)
        step = float(np.max(np.abs(fine[ok] - coarse[ok]))) if ok.any() else 0.0
        rel += step + 64 * EPS
        cur = GridPdf(x, fine, 2.0 * window, density_rel_error=rel, label=label)
    return cur


def _tail_term(t: float, end_logs: Sequence[float], span: float) -> float:
    if t <= 0.0:
        return 0.0
    return t * (1.0 + abs(math.log(t)) + max(abs(v) for v in end_logs) + math.log(2.0 + span))


def differential_entropy(f: GridPdf) -> DivergenceValue:
    """``-int f log f`` with quadrature, density-error and tail contributions."""
    ld = f.log_density
    d = np.exp(ld)
    terms = np.where(d > 0.0, -d * ld, 0.0)
    fine, coarse = f.integrate(terms)
    absint = f.integrate(np.abs(terms) + d)[0]
    err = abs(fine - coarse) + f.density_rel_error * absint + 64 * EPS * absint
    err += _tail_term(f.tail_bound, [ld[0], ld[-1]], f.hi / max(f.lo, _TINY))
    return DivergenceValue(fine, err)


def _support_within(f: GridPdf, g: GridPdf) -> bool:
    return f.support[0] >= g.support[0] and f.support[1] <= g.support[1]


def _overlap(f: GridPdf, g: GridPdf) -> np.ndarray:
    if g.log_pdf is not None:
        return np.ones(f.nodes.size, dtype=bool)
    return (f.nodes >= g.lo) & (f.nodes <= g.hi)


def kl_continuous(f: GridPdf, g: GridPdf) -> DivergenceValue:
    """``D(f|g) = int f log(f/g)``, evaluated on the nodes of ``f``.

    Not finite when the support of ``f`` leaves that of ``g``. When ``g`` is
    only known on its grid, the part of ``f``'s window outside it is dropped
    and its mass charged to the error.
    """
    if not _support_within(f, g):
        return INFINITE
    keep = _overlap(f, g)
    lf = f.log_density
    lg = np.full(lf.size, np.nan)
    lg[keep] = g.log_density_at(f.nodes[keep])
    d = np.exp(lf)
    if np.any(np.isneginf(lg[keep]) & (d[keep] > 0.0)):
        return INFINITE
    r = np.where(keep & (d > 0.0), lf - np.where(keep, lg, 0.0), 0.0)
    terms = np.where(keep, d * r, 0.0)
    fine, coarse = f.integrate(terms)
    absint = f.integrate(np.abs(terms) + d)[0]
    err = (abs(fine - coarse) + (f.density_rel_error + g.density_rel_error) * absint
           + 64 * EPS * absint)
    ends = [r[keep][0], r[keep][-1]] if keep.any() else [0.0]
    err += _tail_term(f.tail_bound, ends, f.hi / max(f.lo, _TINY))
    if not keep.all():
        err += f.integrate(np.where(keep, 0.0, d * (1.0 + np.abs(lf))))[0]
    return DivergenceValue(fine, err)


def lc_le_continuous(f: GridPdf, g: GridPdf, tol: float = LC_TOL) -> LcReport:
    """Decide ``f <=_lc g``: ``log(f/g)`` concave on ``supp(f)``.

    Uses divided second differences on ``f``'s nodes. Each one is rescaled to
    a plain second difference and compared with ``tol * (1 + local scale)``
    plus the noise the density errors can induce; witnesses are node indices.
    """
    if not _support_within(f, g):
        return LcReport(False, NOT_CONTAINED, 0 if f.support[0] < g.support[0] else f.nodes.size - 1)
    bad = np.flatnonzero(~np.isfinite(f.log_density))
    if bad.size:
        return LcReport(False, F_NOT_INTERVAL, int(bad[0]))
    keep = _overlap(f, g)
    idx = np.flatnonzero(keep)
    x = f.nodes[keep]
    lf = f.log_density[keep]
    lg = g.log_density_at(x)
    if not np.all(np.isfinite(lg)):
        return LcReport(False, NOT_CONTAINED, int(idx[np.flatnonzero(~np.isfinite(lg))[0]]))
    exact = bool(keep.all())
    if x.size < 3:
        return LcReport(True, NONE, None, 0.0, exact)
    r = lf - lg
    hl = x[1:-1] - x[:-2]
    hr = x[2:] - x[1:-1]
    d2 = 2.0 * ((r[2:] - r[1:-1]) / hr - (r[1:-1] - r[:-2]) / hl) / (hl + hr)
    scale = np.abs(lf) + np.abs(lg)
    e = f.density_rel_error + g.density_rel_error + 64 * EPS * (1.0 + scale)
    trip = np.maximum(np.maximum(scale[:-2], scale[1:-1]), scale[2:])
    etrip = np.maximum(np.maximum(e[:-2], e[1:-1]), e[2:])
    plain = d2 * hl * hr
    excess = plain - (tol * (1.0 + trip) + 4.0 * etrip * (1.0 + np.maximum(hl, hr) / np.minimum(hl, hr)))
    margin = float(np.max(d2))
    worst = int(np.argmax(excess))
    if excess[worst] > 0.0:
        return LcReport(False, CONCAVITY, int(idx[worst + 1]), margin, exact)
    return LcReport(True, NONE, None, margin, exact)


def check_gamma_minentropy(alphas: Sequence[float], betas: Sequence[float],
                           n_perturbations: int = 50, rng_seed=0, spread: float = 0.5,
                           window: float = DEFAULT_WINDOW, n_nodes: int = DEFAULT_NODES,
                           inner_nodes: int = DEFAULT_INNER) -> Verdict:
    """Equal scales minimize the entropy of ``sum beta_i X_i`` at fixed mean.

    Compares ``H(gam(alpha_+, b))`` with ``b = sum alpha_i beta_i / alpha_+``
    against ``betas`` and ``n_perturbations`` random mean-preserving
    rescalings of it. Needs every ``alpha_i >= 1``.
    """
    alphas = np.asarray([_positive("alpha", a) for a in alphas])
    betas = np.asarray([_positive("beta", b) for b in betas])
    if alphas.size != betas.size or alphas.size == 0:
        raise DomainError("alphas and betas must be non-empty and of equal length")
    ctx = {"check": "gamma_minentropy", "alphas": alphas.tolist(), "betas": betas.tolist()}
    if np.any(alphas < 1.0):
        return _inconclusive("some alpha_i < 1", ctx)
    a_plus = fsum(alphas)
    total = fsum(alphas * betas)
    h_ref = differential_entropy(pdf_gamma(a_plus, total / a_plus, window, n_nodes))
    rng = np.random.default_rng(rng_seed)
    configs = [betas]
    for _ in range(n_perturbations if alphas.size > 1 else 0):
        bp = betas * np.exp(spread * rng.standard_normal(betas.size))
        configs.append(bp * total / fsum(alphas * bp))
    out = []
    for bp in configs:
        s = weighted_gamma_sum(alphas, bp, window, n_nodes, inner_nodes)
        v = judge(differential_entropy(s), h_ref,
                  {"inequality": "H(sum beta_i X_i) >= H(equal betas)", "betas": bp.tolist()})
        out.append(v)
    return _aggregate(out, ctx)


def check_gamma_triangle(alphas: Sequence[float], betas: Sequence[float],
                         a_grid: Optional[Sequence[float]] = None,
                         b_grid: Optional[Sequence[float]] = None,
                         window: float = DEFAULT_WINDOW, n_nodes: int = DEFAULT_NODES,
                         inner_nodes: int = DEFAULT_INNER) -> list:
    """Gamma approximation of ``f^S``, the density of ``sum beta_i X_i``.

    With ``g_a = gam(a, sum beta_i alpha_i / a)`` and ``a' >= a >= alpha_+``:
    ``D(f^S|gam(a',b)) >= D(f^S|g_a) + D(g_a|gam(a',b))``, plus the chain
    ``D(f^S|g_a') >= D(f^S|g_a) >= D(f^S|g_{alpha_+})``. ``b_grid`` defaults to
    0.7, 1 and 1.5 times the mean-matching scale of each ``a'``.
    """
    alphas = [_positive("alpha", a) for a in alphas]
    betas = [_positive("beta", b) for b in betas]
    a_plus = fsum(alphas)
    total = fsum(np.asarray(alphas) * np.asarray(betas))
    if a_grid is None:
        a_grid = (a_plus, a_plus + 1.0, 2.0 * a_plus)
    a_grid = sorted(float(a) for a in a_grid)
    if a_grid[0] < a_plus * (1.0 - 1e-12):
        raise DomainError("every a must be at least alpha_+")
    fs = weighted_gamma_sum(alphas, betas, window, n_nodes, inner_nodes)
    ga = {a: pdf_gamma(a, total / a, window, n_nodes) for a in a_grid}
    d_fg = {a: kl_continuous(fs, ga[a]) for a in a_grid}
    out = []
    for i, a in enumerate(a_grid):
        for a2 in a_grid[i:]:
            bs = b_grid if b_grid is not None else [c * total / a2 for c in (0.7, 1.0, 1.5)]
            for b in bs:
                h = pdf_gamma(a2, float(b), window, n_nodes)
                out.append(judge(kl_continuous(fs, h), d_fg[a] + kl_continuous(ga[a], h),
                                 {"inequality": "D(f^S|gam(a',b)) >= D(f^S|g_a) + D(g_a|gam(a',b))",
                                  "a": a, "a_prime": a2, "b": float(b)}))
    for a, a2 in zip(a_grid[:-1], a_grid[1:]):
        out.append(judge(d_fg[a2], d_fg[a], {"inequality": "D(f^S|g_a) non-decreasing in a",
                                             "a": a, "a_prime": a2}))
    return out


def gamma_chain_report(alphas: Sequence[float], betas: Sequence[float], a: float,
                       fs: Optional[GridPdf] = None, **grid) -> dict:
    """``<=_lc`` checks of ``gam(a) <=_lc gam(alpha_+) <=_lc f^S`` (scales mean-matched)."""
    a_plus = fsum(alphas)
    total = fsum(np.asarray(alphas, dtype=float) * np.asarray(betas, dtype=float))
    fs = fs or weighted_gamma_sum(alphas, betas, **grid)
    g_plus = pdf_gamma(a_plus, total / a_plus)
    g_a = pdf_gamma(a, total / a)
    return {"g_a<=lc g_alpha+": lc_le_continuous(g_a, g_plus).verdict,
            "g_alpha+<=lc f^S": lc_le_continuous(g_plus, fs).verdict}

