"""Probability mass functions on the non-negative integers.

A :class:`Pmf` stores a trimmed block of weights starting at ``offset``
together with a certified bound on the probability mass that was cut off
above the stored block. Standard families are evaluated in the log domain
with ratio recursions; infinite families are cut at the first index whose
upper tail is provably below the truncation budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._numeric import compensated_convolve, fsum, logsumexp

DEFAULT_EPS_TRUNC = 1e-12
MEAN_TOL = 1e-10
NORM_TOL = 1e-12


class DomainError(ValueError):
    """Parameters outside the domain of an operation."""


# ---------------------------------------------------------------------------
# Family descriptions
# ---------------------------------------------------------------------------

KINDS = ("bernoulli", "binomial", "poisson", "geometric", "negbinomial")


def _prob(name, x):
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {x!r}")
    return x


def _positive(name, x):
    x = float(x)
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"{name} must be a positive real, got {x!r}")
    return x


@dataclass(frozen=True)
class FamilySpec:
    """Symbolic description of a standard family instance.

    ``n`` is the number of trials (binomial, positive integer) or the shape
    (negative binomial, any positive real); ``p`` is a success probability,
    ``lam`` a Poisson mean and ``r`` the negative binomial success
    probability, so that ``nb(n, r)_i = C(n+i-1, i) r^n (1-r)^i``.
    """

    kind: str
    n: Optional[float] = None
    p: Optional[float] = None
    lam: Optional[float] = None
    r: Optional[float] = None

    def __post_init__(self):
        k = self.kind
        if k not in KINDS:
            raise DomainError(f"unknown family kind {k!r}")
        if k in ("bernoulli", "geometric"):
            object.__setattr__(self, "p", _prob("p", self.p))
        elif k == "binomial":
            n = self.n
            if n is None or float(n) != int(n) or int(n) < 1:
                raise DomainError(f"binomial n must be a positive integer, got {n!r}")
            object.__setattr__(self, "n", int(n))
            object.__setattr__(self, "p", _prob("p", self.p))
        elif k == "poisson":
            object.__setattr__(self, "lam", _positive("lambda", self.lam))
        elif k == "negbinomial":
            object.__setattr__(self, "n", _positive("n", self.n))
            object.__setattr__(self, "r", _prob("r", self.r))

    @property
    def finite(self) -> bool:
        return self.kind in ("bernoulli", "binomial")

    @property
    def mean(self) -> float:
        k = self.kind
        if k == "bernoulli":
            return self.p
        if k == "binomial":
            return self.n * self.p
        if k == "poisson":
            return self.lam
        if k == "geometric":
            return (1.0 - self.p) / self.p
        return self.n * (1.0 - self.r) / self.r

    def to_dict(self) -> dict:
        k = self.kind
        if k in ("bernoulli", "geometric"):
            return {"kind": k, "p": self.p}
        if k == "binomial":
            return {"kind": k, "n": self.n, "p": self.p}
        if k == "poisson":
            return {"kind": k, "lambda": self.lam}
        return {"kind": k, "n": self.n, "r": self.r}

    def __str__(self):
        d = self.to_dict()
        args = ",".join(f"{v:g}" for key, v in d.items() if key != "kind")
        return f"{self.kind}({args})"

    # log w_0, log(w_{i+1}/w_i), and the limit of the ratio as i -> inf
    def _log_w0(self) -> float:
        k = self.kind
        if k in ("bernoulli", "binomial"):
            n = 1 if k == "bernoulli" else self.n
            return n * math.log1p(-self.p)
        if k == "poisson":
            return -self.lam
        if k == "geometric":
            return math.log(self.p)
        return self.n * math.log(self.r)

    def _log_ratio(self, i: np.ndarray) -> np.ndarray:
        i = np.asarray(i, dtype=float)
        k = self.kind
        if k in ("bernoulli", "binomial"):
            n = 1 if k == "bernoulli" else self.n
            return np.log(n - i) - np.log(i + 1.0) + (math.log(self.p) - math.log1p(-self.p))
        if k == "poisson":
            return math.log(self.lam) - np.log(i + 1.0)
        if k == "geometric":
            return np.full(i.shape, math.log1p(-self.p))
        return np.log(self.n + i) - np.log(i + 1.0) + math.log1p(-self.r)

    def _ratio_limit(self) -> float:
        if self.kind == "poisson":
            return 0.0
        if self.kind == "geometric":
            return 1.0 - self.p
        return 1.0 - self.r

    def log_weights(self, count: int) -> np.ndarray:
        """Log weights at indices ``0..count-1`` by ratio recursion."""
        if self.finite:
            top = 1 if self.kind == "bernoulli" else self.n
            count = min(count, top + 1)
        if count <= 0:
            return np.zeros(0)
        steps = self._log_ratio(np.arange(count - 1))
        return self._log_w0() + np.concatenate(([0.0], np.cumsum(steps)))


def bernoulli_spec(p) -> FamilySpec:
    return FamilySpec("bernoulli", p=p)


def binomial_spec(n, p) -> FamilySpec:
    return FamilySpec("binomial", n=n, p=p)


def poisson_spec(lam) -> FamilySpec:
    return FamilySpec("poisson", lam=lam)


def geometric_spec(p) -> FamilySpec:
    return FamilySpec("geometric", p=p)


def negbinomial_spec(n, r) -> FamilySpec:
    return FamilySpec("negbinomial", n=n, r=r)


# ---------------------------------------------------------------------------
# The Pmf value type
# ---------------------------------------------------------------------------


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Pmf:
    """A (possibly truncated) pmf on Z+.

    ``weights[i]`` is the probability of ``offset + i``. ``tail_bound`` bounds
    the mass above the stored block that was discarded. ``exact_hi`` is the
    largest absolute index whose stored weight is a true point value; above
    it (only after convolving truncated operands) weights are lower bounds.
    """

    offset: int
    weights: np.ndarray
    tail_bound: float = 0.0
    label: Optional[str] = None
    log_weights: Optional[np.ndarray] = None
    family: Optional[FamilySpec] = None
    exact_mean: Optional[float] = None
    exact_hi: Optional[int] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise DomainError("weights must be a non-empty sequence of finite reals")
        if np.any(w < 0.0):
            raise DomainError("weights must be non-negative")
        nz = np.flatnonzero(w > 0.0)
        if nz.size == 0:
            raise DomainError("weights must contain a positive entry")
        a, b = int(nz[0]), int(nz[-1])
        lw = self.log_weights
        if lw is None:
            with np.errstate(divide="ignore"):
                lw = np.log(w)
        else:
            lw = np.asarray(lw, dtype=float).ravel()
            if lw.shape != w.shape:
                raise DomainError("log_weights must match weights")
        offset = int(self.offset)
        if offset < 0:
            raise DomainError("offset must be non-negative")
        tb = float(self.tail_bound)
        if not tb >= 0.0:
            raise DomainError("tail_bound must be non-negative")
        total = fsum(w)
        if not (1.0 - tb - NORM_TOL <= total <= 1.0 + NORM_TOL):
            raise DomainError(f"weights sum to {total!r}, outside [1 - tail_bound, 1]")
        object.__setattr__(self, "offset", offset + a)
        object.__setattr__(self, "weights", _readonly(w[a:b + 1]))
        object.__setattr__(self, "log_weights", _readonly(lw[a:b + 1]))
        object.__setattr__(self, "tail_bound", tb)
        if self.exact_hi is not None:
            top = offset + b
            object.__setattr__(self, "exact_hi", None if self.exact_hi >= top else int(self.exact_hi))

    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + self.weights.size - 1

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def truncated(self) -> bool:
        return self.tail_bound > 0.0

    @property
    def reliable_hi(self) -> int:
        return self.hi if self.exact_hi is None else self.exact_hi

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def at(self, i: int) -> float:
        j = i - self.offset
        return float(self.weights[j]) if 0 <= j < self.size else 0.0

    def dense(self, lo: int, hi: int) -> np.ndarray:
        """Stored weights on the absolute range ``lo..hi`` (zeros outside)."""
        out = np.zeros(hi - lo + 1)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.weights[a - self.lo:b - self.lo + 1]
        return out

    def to_dict(self) -> dict:
        d = {
            "kind": "explicit",
            "offset": self.offset,
            "weights": [float(x) for x in self.weights],
            "tail_bound": self.tail_bound,
        }
        if self.label is not None:
            d["label"] = self.label
        return d

    def __repr__(self):
        name = self.label or "Pmf"
        return f"<{name} support {self.lo}..{self.hi} tail<={self.tail_bound:.3g}>"


def log_weights_on(f: Pmf, lo: int, hi: int) -> np.ndarray:
    """Log weights of ``f`` on ``lo..hi``.

    Indices beyond the stored block are filled from the family when ``f``
    was realized from one (so truncated Poisson/negative binomial tails can
    be evaluated without underflow); otherwise they are ``-inf``.
    """
    out = np.full(hi - lo + 1, -np.inf)
    a, b = max(lo, f.lo), min(hi, f.hi)
    if a <= b:
        out[a - lo:b - lo + 1] = f.log_weights[a - f.lo:b - f.lo + 1]
    if f.family is not None and f.truncated and hi > f.hi:
        ext = f.family.log_weights(hi + 1)
        start = max(lo, f.hi + 1)
        out[start - lo:] = ext[start:hi + 1]
    return out


def extendable(f: Pmf) -> bool:
    return f.family is not None and f.truncated


def isclose(f: Pmf, g: Pmf, atol: float = 1e-12) -> bool:
    """Equality up to trimming and ``atol`` pointwise."""
    lo, hi = min(f.lo, g.lo), max(f.hi, g.hi)
    return bool(np.all(np.abs(f.dense(lo, hi) - g.dense(lo, hi)) <= atol))


def point_mass(k: int) -> Pmf:
    return Pmf(k, [1.0], label=f"delta({k})", exact_mean=float(k))


def explicit(weights: Sequence[float], offset: int = 0, tail_bound: float = 0.0,
             label: Optional[str] = None) -> Pmf:
    return Pmf(offset, np.asarray(weights, dtype=float), tail_bound=tail_bound, label=label)


# ---------------------------------------------------------------------------
# Realizing families
# ---------------------------------------------------------------------------


def _grow_series(log_w0: float, log_ratio: Callable[[np.ndarray], np.ndarray],
                 ratio_limit: float, log_eps: float, min_len: int = 1,
                 relative: bool = False, guess: int = 64):
    """Extend a ratio-recursive log sequence until its tail is certified small.

    The ratio ``w_{i+1}/w_i`` must be monotone for ``i >= min_len - 1``, so
    the supremum over the tail is the larger of the next ratio and its
    limit, and the tail beyond ``i`` is at most ``w_{i+1} / (1 - sup)``.
    Returns the log weights up to the first qualifying index and the log of
    the tail bound there. With ``relative`` the bound is compared against
    the running total rather than 1.
    """
    n = max(guess, min_len + 2)
    log_lim = math.log(ratio_limit) if ratio_limit > 0 else -math.inf
    while True:
        steps = log_ratio(np.arange(n))
        lw = log_w0 + np.concatenate(([0.0], np.cumsum(steps)))
        # tail bound beyond index i, for i = 0..n-1
        nxt = lw[1:]
        log_sup = np.maximum(np.concatenate((steps[1:], [steps[-1]])), log_lim)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_tail = np.where(log_sup < 0.0, nxt - np.log(-np.expm1(log_sup)), np.inf)
        if relative:
            log_tail = log_tail - np.logaddexp.accumulate(lw[:-1])
        ok = np.flatnonzero((log_tail <= log_eps) & (np.arange(n) >= min_len - 1))
        if ok.size:
            i = int(ok[0])
            return lw[:i + 1], float(log_tail[i])
        if n > 50_000_000:
            raise DomainError("series tail does not decay fast enough to truncate")
        n *= 2


def realize(spec: FamilySpec, eps_trunc: float = DEFAULT_EPS_TRUNC) -> Pmf:
    """Materialize a family instance as a :class:`Pmf`.

    Finite families are exact (``tail_bound`` 0, up to float underflow at
    the extremes). Infinite ones stop at the smallest index whose certified
    upper tail is at most ``eps_trunc``.
    """
    eps_trunc = float(eps_trunc)
    if not 0.0 < eps_trunc <= 1e-6:
        raise DomainError("eps_trunc must lie in (0, 1e-6]")
    eps_trunc = max(eps_trunc, 1e-300)
    label = str(spec)
    if spec.finite:
        top = 1 if spec.kind == "bernoulli" else spec.n
        lw = spec.log_weights(top + 1)
        w = np.exp(lw)
        under = w == 0.0
        tail = 0.0
        if under.any():
            # mass lost to underflow at either end
            tail = float(np.exp(logsumexp(lw[under])))
        return Pmf(0, w, tail_bound=tail, label=label, log_weights=lw, family=spec,
                   exact_mean=spec.mean)
    mu = spec.mean
    sd = math.sqrt(mu + mu * mu)  # initial window only; growth is certified
    lw, log_tb = _grow_series(spec._log_w0(), spec._log_ratio, spec._ratio_limit(),
                              math.log(eps_trunc), min_len=2,
                              guess=int(mu + 12 * sd + 16))
    return Pmf(0, np.exp(lw), tail_bound=math.exp(log_tb), label=label, log_weights=lw,
               family=spec, exact_mean=mu)


def binomial(n, p) -> Pmf:
    return realize(binomial_spec(n, p))


def bernoulli(p) -> Pmf:
    return realize(bernoulli_spec(p))


def poisson(lam, eps_trunc: float = DEFAULT_EPS_TRUNC) -> Pmf:
    return realize(poisson_spec(lam), eps_trunc)


def geometric(p, eps_trunc: float = DEFAULT_EPS_TRUNC) -> Pmf:
    return realize(geometric_spec(p), eps_trunc)


def negbinomial(n, r, eps_trunc: float = DEFAULT_EPS_TRUNC) -> Pmf:
    return realize(negbinomial_spec(n, r), eps_trunc)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def mean(f: Pmf) -> float:
    return fsum(f.indices * f.weights)


def mean_interval(f: Pmf) -> tuple[float, float]:
    """Stored mean and the half-width of an interval holding the true mean.

    The truncated tail is assumed to sit within ``hi + 1 .. 2*hi + 2``;
    this is a heuristic tail-length bound, exact when ``tail_bound`` is 0.
    """
    m = mean(f)
    return m, f.tail_bound * (2.0 * f.hi + 2.0)


def best_mean(f: Pmf) -> float:
    """Closed-form mean when one is attached, else the stored mean."""
    return f.exact_mean if f.exact_mean is not None else mean(f)


def variance(f: Pmf) -> float:
    m = mean(f)
    return fsum((f.indices - m) ** 2 * f.weights)


# ---------------------------------------------------------------------------
# Sums of independent variables
# ---------------------------------------------------------------------------


def _known_mean(f: Pmf) -> Optional[float]:
    if f.exact_mean is not None:
        return f.exact_mean
    return None if f.truncated else mean(f)


def convolve(f: Pmf, g: Pmf) -> Pmf:
    """Distribution of the sum of independent ``f`` and ``g``."""
    w = compensated_convolve(f.weights, g.weights)
    exact_hi = None
    if f.truncated or g.truncated:
        cap = f.hi + g.hi
        if f.truncated:
            cap = min(cap, f.reliable_hi + g.lo)
        if g.truncated:
            cap = min(cap, g.reliable_hi + f.lo)
        # past the cap an entry may miss terms, at most this much in total;
        # keep entries for which that is below working precision
        missing = f.tail_bound * float(np.max(g.weights)) + g.tail_bound * float(np.max(f.weights))
        lo = f.lo + g.lo
        bad = np.flatnonzero(missing > 1e-16 * w[cap - lo + 1:])
        exact_hi = cap + (int(bad[0]) if bad.size else w.size - (cap - lo) - 1)
    elif f.exact_hi is not None or g.exact_hi is not None:
        exact_hi = min(f.reliable_hi + g.hi, g.reliable_hi + f.hi)
    mf, mg = _known_mean(f), _known_mean(g)
    total = fsum(w)
    tail = f.tail_bound + g.tail_bound
    # rounding can push an exact sum a hair past 1
    if total > 1.0:
        w = w / total
    return Pmf(f.lo + g.lo, w, tail_bound=tail,
               label=f"({f.label or 'f'})*({g.label or 'g'})",
               exact_mean=None if mf is None or mg is None else mf + mg,
               exact_hi=exact_hi)


def retruncate(f: Pmf, eps_trunc: float) -> Pmf:
    """Drop the upper stored block whose mass plus ``tail_bound`` fits in ``eps_trunc``."""
    if f.tail_bound > eps_trunc:
        return f
    rev = np.cumsum(f.weights[::-1])[::-1]
    beyond = np.concatenate((rev[1:], [0.0])) + f.tail_bound
    ok = np.flatnonzero(beyond <= eps_trunc)
    cut = int(ok[0])
    return Pmf(f.lo, f.weights[:cut + 1], tail_bound=float(beyond[cut]), label=f.label,
               log_weights=f.log_weights[:cut + 1], family=f.family,
               exact_mean=f.exact_mean, exact_hi=f.exact_hi)


def bernoulli_sum(ps: Sequence[float]) -> Pmf:
    """Poisson-binomial pmf of a sum of independent Bernoulli(p_i)."""
    ps = [_prob("p_i", p) for p in ps]
    if not ps:
        raise DomainError("bernoulli_sum needs at least one probability")
    w = np.array([1.0])
    for p in ps:
        w = compensated_convolve(w, np.array([1.0 - p, p]))
    return Pmf(0, w / fsum(w), label=f"bernoulli_sum(n={len(ps)})", exact_mean=fsum(ps))


def geometric_sum(rs: Sequence[float], eps_trunc: float = DEFAULT_EPS_TRUNC) -> Pmf:
    """Pmf of a sum of independent Ge(r_i), ``Ge(r) = {r (1-r)^i}``.

    Components are realized far below the budget so the stored block of the
    sum is accurate before it is cut back to ``eps_trunc``.
    """
    rs = [_prob("r_i", r) for r in rs]
    if not rs:
        raise DomainError("geometric_sum needs at least one probability")
    if len(rs) == 1:
        return realize(geometric_spec(rs[0]), eps_trunc)
    deep = eps_trunc * 1e-12 / len(rs)
    while True:
        acc = realize(geometric_spec(rs[0]), deep)
        for r in rs[1:]:
            acc = convolve(acc, realize(geometric_spec(r), deep))
        out = retruncate(acc, eps_trunc)
        if out.exact_hi is None or deep < 1e-280:
            break
        deep *= 1e-20
    mu = fsum([(1.0 - r) / r for r in rs])
    return Pmf(out.lo, out.weights, tail_bound=out.tail_bound,
               label=f"geometric_sum(n={len(rs)})", exact_mean=mu, exact_hi=out.exact_hi)


# ---------------------------------------------------------------------------
# Exponential tilting and random instance generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TiltSolve:
    theta: float
    iterations: int
    residual: float


def _tilted(lw: np.ndarray, j: np.ndarray, theta: float):
    x = lw + theta * j
    x = x - np.max(x)
    p = np.exp(x)
    z = fsum(p)
    p = p / z
    m = fsum(j * p)
    v = fsum((j - m) ** 2 * p)
    return p, x - math.log(z), m, v


def tilt_to_mean(f: Pmf, mu: float, tol: float = MEAN_TOL) -> tuple[Pmf, TiltSolve]:
    """Reweight ``f_i`` by ``exp(theta i)`` so the mean becomes ``mu``.

    Safeguarded Newton on the tilted mean, which is strictly increasing in
    theta (its derivative is the tilted variance). The bracket is expanded
    by doubling until it straddles ``mu``.
    """
    mu = float(mu)
    if not f.lo < mu < f.hi:
        raise DomainError(f"target mean {mu} outside the open support hull ({f.lo}, {f.hi})")
    j = np.arange(f.size, dtype=float)
    target = mu - f.lo
    lw = f.log_weights
    goal = 1e-14 * max(1.0, target)

    theta, it = 0.0, 0
    p, lp, m, v = _tilted(lw, j, theta)
    lo_t, hi_t = -math.inf, math.inf
    prev = math.inf
    while abs(m - target) > goal and it < 500:
        it += 1
        if m < target:
            lo_t = theta
        else:
            hi_t = theta
        cand = theta + (target - m) / v if v > 0 else math.nan
        stalled = abs(m - target) > 0.5 * prev
        prev = abs(m - target)
        if stalled and math.isfinite(lo_t) and math.isfinite(hi_t):
            cand = 0.5 * (lo_t + hi_t)
        elif not lo_t < cand < hi_t:
            if math.isinf(hi_t):
                cand = max(2.0 * abs(theta), 1.0) if theta <= 0 else 2.0 * theta + 1.0
                cand = max(cand, lo_t + 1.0)
            elif math.isinf(lo_t):
                cand = min(-2.0 * abs(theta), -1.0) if theta >= 0 else 2.0 * theta - 1.0
                cand = min(cand, hi_t - 1.0)
            else:
                cand = 0.5 * (lo_t + hi_t)
        if cand == theta:
            break
        theta = cand
        p, lp, m, v = _tilted(lw, j, theta)
    out = Pmf(f.lo, p, label=f.label if theta == 0.0 else f"tilt({f.label or 'f'})",
              log_weights=lp)
    residual = mean(out) - mu
    if abs(residual) > tol:
        raise DomainError(f"tilt did not reach mean {mu}: residual {residual:.3g}")
    return out, TiltSolve(theta, it, residual)


def apply_log_perturbation(g: Pmf, c: Sequence[float], start: Optional[int] = None,
                           target_mean: Optional[float] = None) -> Pmf:
    """``f_i ∝ g_i exp(c_i)`` on ``start .. start+len(c)-1``, optionally tilted.

    With ``c`` concave the result satisfies ``f <=_lc g``; a tilt only adds
    a linear term to ``log(f/g)`` and keeps that true.
    """
    c = np.asarray(c, dtype=float)
    start = g.lo if start is None else int(start)
    if start < g.lo or start + c.size - 1 > g.hi:
        raise DomainError("perturbation range outside the stored support")
    lw = g.log_weights[start - g.lo:start - g.lo + c.size] + c
    lw = lw - np.max(lw)
    w = np.exp(lw)
    z = fsum(w)
    f = Pmf(start, w / z, log_weights=lw - math.log(z), label=f"minorant({g.label or 'g'})")
    if target_mean is None or f.size == 1:
        return f
    out, _ = tilt_to_mean(f, target_mean)
    return Pmf(out.lo, out.weights, log_weights=out.log_weights, label=f.label)


def _random_concave(rng: np.random.Generator, length: int) -> np.ndarray:
    if length <= 1:
        return np.zeros(length)
    mode = rng.choice(3, p=[0.1, 0.1, 0.8])
    if mode == 0:
        return np.zeros(length)
    if mode == 1:
        return np.arange(length) * rng.normal(0.0, 0.5)
    scale = rng.uniform(0.05, 1.5)
    slopes = np.sort(rng.normal(0.0, scale, length - 1))[::-1]
    if rng.random() < 0.3:
        # a few kinks instead of a fully curved sequence
        k = int(rng.integers(1, min(3, length - 1) + 1))
        knots = np.sort(rng.choice(length - 1, size=k, replace=False))
        levels = np.sort(rng.normal(0.0, scale, k + 1))[::-1]
        slopes = levels[np.searchsorted(knots, np.arange(length - 1), side="right")]
    return np.concatenate(([0.0], np.cumsum(slopes)))


def _pick_window(rng, lo: int, hi: int, mu: Optional[float]) -> tuple[int, int]:
    if mu is None:
        a = int(rng.integers(lo, hi))
        b = int(rng.integers(a + 1, hi + 1))
        return a, b
    below = math.ceil(mu) - 1      # largest integer < mu
    above = math.floor(mu) + 1     # smallest integer > mu
    if below < lo or above > hi:
        raise DomainError(f"mean {mu} is not interior to {lo}..{hi}")
    return int(rng.integers(lo, below + 1)), int(rng.integers(above, hi + 1))


def random_lc_minorant(g: Pmf, rng_seed=None, *, target_mean="match",
                       full_support: bool = False,
                       rng: Optional[np.random.Generator] = None) -> Pmf:
    """Random ``f <=_lc g``.

    A random concave sequence on a random subinterval of ``supp(g)`` (the
    whole stored support with ``full_support``) is added to ``log g`` and
    the result is tilted to ``target_mean``: by default the mean of ``g``,
    ``None`` for no tilt, ``"random"`` for a random interior mean, or a
    number. Deterministic given the seed.
    """
    rng = np.random.default_rng(rng_seed) if rng is None else rng
    if g.size < 2:
        return g
    hi = g.reliable_hi
    if target_mean == "match":
        mu = best_mean(g)
    elif target_mean == "random":
        mu = None
    else:
        mu = target_mean
    if full_support:
        a, b = g.lo, hi
        if mu is not None and not a < mu < b:
            raise DomainError(f"mean {mu} is not interior to {a}..{b}")
    else:
        a, b = _pick_window(rng, g.lo, hi, mu)
    if mu is None and target_mean == "random":
        span = b - a
        mu = rng.uniform(a + 0.05 * span, b - 0.05 * span)
    c = _random_concave(rng, b - a + 1)
    return apply_log_perturbation(g, c, a, mu)


def random_lc_majorant(base: FamilySpec, rng_seed=None, eps_trunc: float = DEFAULT_EPS_TRUNC,
                       *, rng: Optional[np.random.Generator] = None) -> Pmf:
    """Random ``f`` with ``base <=_lc f`` for an infinite family ``base``.

    ``log f = log base + c`` with ``c`` convex and piecewise linear; the last
    slope is capped so the tail still decays geometrically. The series is
    summed far past the budget before normalizing, then cut at
    ``eps_trunc``.
    """
    if base.finite:
        raise DomainError("majorants are generated for infinite families")
    rng = np.random.default_rng(rng_seed) if rng is None else rng
    mu = base.mean
    span = int(mu + 3.0 * math.sqrt(mu + mu * mu)) + 2
    k = int(rng.integers(1, 5))
    knots = np.sort(rng.choice(np.arange(1, span + 1), size=min(k, span), replace=False))
    cap = 1.5 if base.kind == "poisson" else 0.8 * -math.log(base._ratio_limit())
    slopes = np.minimum(np.sort(rng.normal(0.0, rng.uniform(0.05, 0.8), knots.size + 1)), cap)
    if rng.random() < 0.1:
        slopes[:] = slopes[-1]

    def log_ratio(i):
        seg = np.searchsorted(knots, i, side="right")
        return base._log_ratio(i) + slopes[seg]

    lim = base._ratio_limit() * math.exp(slopes[-1])
    deep = eps_trunc * 1e-6
    lw, log_tb = _grow_series(base._log_w0(), log_ratio, lim, math.log(deep),
                              min_len=int(knots[-1]) + 2, relative=True)
    lz = logsumexp(lw)
    lw = lw - lz
    w = np.exp(lw)
    f = Pmf(0, w / fsum(w), tail_bound=math.exp(log_tb), log_weights=lw,
            label=f"majorant({base})")
    return retruncate(f, eps_trunc)


# ---------------------------------------------------------------------------
# JSON distribution specs
# ---------------------------------------------------------------------------


def from_json(obj: dict, eps_trunc: float = DEFAULT_EPS_TRUNC) -> Pmf:
    """Build a Pmf from a JSON distribution spec."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError("distribution spec must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "explicit":
            return Pmf(int(obj.get("offset", 0)), np.asarray(obj["weights"], dtype=float),
                       tail_bound=float(obj.get("tail_bound", 0.0)), label=obj.get("label"))
        if kind == "bernoulli_sum":
            return bernoulli_sum(obj["ps"])
        if kind == "geometric_sum":
            return geometric_sum(obj["rs"], eps_trunc)
        if kind == "point":
            return point_mass(int(obj["k"]))
        if kind == "poisson":
            lam = obj["lambda"] if "lambda" in obj else obj["lam"]
            return realize(poisson_spec(lam), eps_trunc)
        if kind in KINDS:
            params = {k: obj[k] for k in ("n", "p", "r") if k in obj}
            return realize(FamilySpec(kind, **params), eps_trunc)
    except KeyError as exc:
        raise DomainError(f"missing field {exc} for kind {kind!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(str(exc)) from None
    raise DomainError(f"unknown distribution kind {kind!r}")
