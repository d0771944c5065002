"""Entropy, relative entropy and total variation with error bounds.

Each result carries an ``error_bound`` made of a floating-point part (a
loose multiple of machine epsilon times the absolute sum of the terms) and,
when an argument was truncated, a tail part. The tail part assumes the
discarded mass lives within about ``hi`` further indices and that the log
weights keep their last slope; it is a modelling bound, not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._numeric import EPS, fsum
from .pmf import Pmf, extendable, log_weights_on

_ROUND = 128 * EPS


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    error_bound: float = 0.0
    finite: bool = True

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error_bound", float(self.error_bound))
        object.__setattr__(self, "finite", bool(self.finite))

    def __add__(self, other: "DivergenceValue") -> "DivergenceValue":
        if not (self.finite and other.finite):
            return INFINITE
        return DivergenceValue(self.value + other.value, self.error_bound + other.error_bound)

    def to_dict(self) -> dict:
        return {
            "value": self.value if self.finite else None,
            "error_bound": self.error_bound,
            "finite": self.finite,
        }


INFINITE = DivergenceValue(math.inf, 0.0, False)
ZERO = DivergenceValue(0.0, 0.0, True)


def _tail_entropy_bound(t: float, hi: int) -> float:
    # t * (entropy of the normalized tail + |log t|), the tail entropy
    # capped by that of a law on ~hi points
    if t <= 0.0:
        return 0.0
    return t * (1.0 + abs(math.log(t)) + math.log(2.0 + hi))


def entropy(f: Pmf) -> DivergenceValue:
    """Shannon entropy ``-sum f_i log f_i`` (``0 log 0 = 0``)."""
    w, lw = f.weights, f.log_weights
    pos = w > 0.0
    terms = -w[pos] * lw[pos]
    value = fsum(terms)
    err = _ROUND * (fsum(np.abs(terms)) + 1.0) + _tail_entropy_bound(f.tail_bound, f.hi)
    return DivergenceValue(value, err)


def kl(f: Pmf, g: Pmf) -> DivergenceValue:
    """Relative entropy ``D(f|g)``; not finite unless ``supp(f)`` lies in ``supp(g)``."""
    if f.lo < g.lo:
        return INFINITE
    if f.truncated and not g.truncated:
        return INFINITE
    if f.hi > g.hi and not extendable(g):
        return INFINITE
    lg = log_weights_on(g, f.lo, f.hi)
    w, lf = f.weights, f.log_weights
    pos = w > 0.0
    if not np.all(np.isfinite(lg[pos])):
        return INFINITE
    diff = lf[pos] - lg[pos]
    terms = w[pos] * diff
    value = fsum(terms)
    err = _ROUND * (fsum(w[pos] * (np.abs(lf[pos]) + np.abs(lg[pos]) + 1.0)) + 1.0)
    if f.truncated:
        t = f.tail_bound
        last = float(lg[-1])
        slope = float(lg[-1] - lg[-2]) if lg.size > 1 else 0.0
        err += _tail_entropy_bound(t, f.hi) + t * (abs(last) + abs(slope) * (f.hi + 2.0))
    return DivergenceValue(value, err)


def cross_term(a: Pmf, b: Pmf, num: Pmf, den: Pmf) -> float:
    """``sum_i (a_i - b_i) log(num_i / den_i)`` over the union of the supports of a and b."""
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    d = a.dense(lo, hi) - b.dense(lo, hi)
    ln = log_weights_on(num, lo, hi)
    ld = log_weights_on(den, lo, hi)
    keep = d != 0.0
    with np.errstate(invalid="ignore"):
        terms = d[keep] * (ln[keep] - ld[keep])
    if not np.all(np.isfinite(terms)):
        # off-support: inf or nan, as plain float arithmetic gives it
        with np.errstate(invalid="ignore"):
            return float(np.sum(terms))
    return fsum(terms)


def total_variation(f: Pmf, g: Pmf) -> DivergenceValue:
    """``V(f, g) = 1/2 sum |f_i - g_i|`` over the union of stored ranges."""
    lo, hi = min(f.lo, g.lo), max(f.hi, g.hi)
    d = np.abs(f.dense(lo, hi) - g.dense(lo, hi))
    value = 0.5 * fsum(d)
    err = 0.5 * (f.tail_bound + g.tail_bound) + _ROUND * (1.0 + value)
    return DivergenceValue(value, err)


def ehm_bound(ps: Sequence[float]) -> float:
    """Stein-Chen bound on ``V(f^S, bi(n, pbar))`` for a Bernoulli sum."""
    ps = np.asarray(ps, dtype=float)
    if ps.size == 0 or np.any((ps <= 0.0) | (ps >= 1.0)):
        raise ValueError("probabilities must lie in (0, 1)")
    n = ps.size
    pbar = fsum(ps) / n
    qbar = 1.0 - pbar
    spread = fsum((ps - pbar) ** 2)
    return (1.0 - pbar ** (n + 1) - qbar ** (n + 1)) / ((n + 1) * pbar * qbar) * spread
