"""The relative log-concavity pre-order and the ultra log-concave hierarchy.

``f <=_lc g`` holds when both supports are intervals, ``supp(f)`` lies in
``supp(g)`` and ``log(f_i/g_i)`` is concave on ``supp(f)``. Failures are
returned as verdicts with a witness, never raised.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from ._numeric import second_differences
from .pmf import Pmf, extendable, log_weights_on

LC_TOL = 1e-9
ZERO_TOL = 1e-14

NONE = "none"
F_NOT_INTERVAL = "f_support_not_interval"
G_NOT_INTERVAL = "g_support_not_interval"
NOT_CONTAINED = "support_not_contained"
CONCAVITY = "concavity_violated"


@dataclass(frozen=True)
class LcReport:
    """Outcome of an order check.

    ``margin`` is the largest second difference of the log-ratio seen on
    the checked range; ``exact`` is False when truncation limited what
    could be compared.
    """

    verdict: bool
    failure_kind: str = NONE
    witness_index: Optional[int] = None
    margin: float = 0.0
    exact: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SignProfile:
    signs: tuple
    change_count: int


def _hole(w: np.ndarray, zero_tol: float) -> Optional[int]:
    # an interior weight is a hole when it sits zero_tol below the mass on
    # both sides; a smoothly decaying tail never qualifies
    if w.size < 3:
        return None
    left = np.maximum.accumulate(w)[:-2]
    right = np.maximum.accumulate(w[::-1])[::-1][2:]
    inner = w[1:-1]
    bad = np.flatnonzero(inner <= zero_tol * np.minimum(left, right))
    return int(bad[0]) + 1 if bad.size else None


def is_interval_support(f: Pmf, zero_tol: float = ZERO_TOL) -> bool:
    return _hole(f.weights, zero_tol) is None


def _concavity(r: np.ndarray, scale: np.ndarray, lo: int, tol: float):
    """Check ``r`` concave with per-index slack ``tol * scale``."""
    d = second_differences(r)
    if d.size == 0:
        return True, None, 0.0
    s = np.maximum(np.maximum(scale[:-2], scale[1:-1]), scale[2:])
    slack = tol * (1.0 + s)
    excess = d - slack
    worst = int(np.argmax(excess))
    margin = float(np.max(d))
    if excess[worst] > 0.0:
        return False, lo + 1 + worst, margin
    return True, None, margin


def lc_le(f: Pmf, g: Pmf, tol: float = LC_TOL, zero_tol: float = ZERO_TOL) -> LcReport:
    """Decide ``f <=_lc g``."""
    hole = _hole(f.weights, zero_tol)
    if hole is not None:
        return LcReport(False, F_NOT_INTERVAL, f.lo + hole)
    hole = _hole(g.weights, zero_tol)
    if hole is not None:
        return LcReport(False, G_NOT_INTERVAL, g.lo + hole)
    if f.lo < g.lo:
        return LcReport(False, NOT_CONTAINED, f.lo)
    if f.truncated and not g.truncated:
        return LcReport(False, NOT_CONTAINED, g.hi + 1)

    exact = not (f.truncated or g.truncated)
    top = f.reliable_hi
    if f.hi > g.hi:
        if extendable(g):
            pass
        elif f.truncated and g.truncated:
            top = min(top, g.hi)
        else:
            return LcReport(False, NOT_CONTAINED, g.hi + 1, exact=not g.truncated)
    if not extendable(g):
        top = min(top, g.reliable_hi)
    if top < f.hi:
        exact = False
    if top <= f.lo:
        return LcReport(True, margin=0.0, exact=False if top < f.hi else exact)

    lf = f.log_weights[:top - f.lo + 1]
    lg = log_weights_on(g, f.lo, top)
    if not np.all(np.isfinite(lg)):
        bad = int(np.flatnonzero(~np.isfinite(lg))[0])
        return LcReport(False, NOT_CONTAINED, f.lo + bad, exact=exact)
    ok, witness, margin = _concavity(lf - lg, np.abs(lf) + np.abs(lg), f.lo, tol)
    if not ok:
        return LcReport(False, CONCAVITY, witness, margin, exact)
    return LcReport(True, NONE, None, margin, exact)


def is_log_concave(f: Pmf, tol: float = LC_TOL, zero_tol: float = ZERO_TOL) -> LcReport:
    hole = _hole(f.weights, zero_tol)
    if hole is not None:
        return LcReport(False, F_NOT_INTERVAL, f.lo + hole)
    top = f.reliable_hi
    lf = f.log_weights[:top - f.lo + 1]
    ok, witness, margin = _concavity(lf, np.abs(lf), f.lo, tol)
    exact = not f.truncated
    if not ok:
        return LcReport(False, CONCAVITY, witness, margin, exact)
    return LcReport(True, NONE, None, margin, exact)


def _log_binom(k: int, i: np.ndarray) -> np.ndarray:
    return gammaln(k + 1.0) - gammaln(i + 1.0) - gammaln(k - i + 1.0)


def is_ulc_order_k(f: Pmf, k: int, tol: float = LC_TOL, zero_tol: float = ZERO_TOL) -> LcReport:
    """``f_i / C(k, i)`` log-concave; equivalent to ``f <=_lc bi(k, p)`` for any p."""
    k = int(k)
    if f.hi > k or f.truncated:
        return LcReport(False, NOT_CONTAINED, k + 1)
    hole = _hole(f.weights, zero_tol)
    if hole is not None:
        return LcReport(False, F_NOT_INTERVAL, f.lo + hole)
    i = f.indices.astype(float)
    lb = _log_binom(k, i)
    ok, witness, margin = _concavity(f.log_weights - lb, np.abs(f.log_weights) + np.abs(lb),
                                     f.lo, tol)
    if not ok:
        return LcReport(False, CONCAVITY, witness, margin)
    return LcReport(True, NONE, None, margin)


def is_ulc(f: Pmf, tol: float = LC_TOL, zero_tol: float = ZERO_TOL) -> LcReport:
    """``i! f_i`` log-concave; equivalent to ``f <=_lc po(lambda)`` for any lambda."""
    hole = _hole(f.weights, zero_tol)
    if hole is not None:
        return LcReport(False, F_NOT_INTERVAL, f.lo + hole)
    top = f.reliable_hi
    lf = f.log_weights[:top - f.lo + 1]
    lfact = gammaln(np.arange(f.lo, top + 1) + 1.0)
    ok, witness, margin = _concavity(lf + lfact, np.abs(lf) + lfact, f.lo, tol)
    exact = not f.truncated
    if not ok:
        return LcReport(False, CONCAVITY, witness, margin, exact)
    return LcReport(True, NONE, None, margin, exact)


def sign_profile(a: Sequence[float], zero_tol: float = ZERO_TOL) -> SignProfile:
    """Signs of ``a`` with near-zero entries discarded and runs merged."""
    a = np.asarray(a, dtype=float)
    kept = a[np.abs(a) > zero_tol]
    if kept.size == 0:
        return SignProfile((), 0)
    s = np.where(kept > 0, "+", "-")
    runs = [s[0]] + [x for prev, x in zip(s[:-1], s[1:]) if x != prev]
    return SignProfile(tuple(str(x) for x in runs), len(runs) - 1)
