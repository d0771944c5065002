"""Small numerical kernels shared across modules."""

import math

import numpy as np

EPS = np.finfo(float).eps


def fsum(values) -> float:
    """Correctly rounded sum of an array (Shewchuk, via math.fsum)."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def compensated_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full linear convolution with Neumaier-compensated accumulation.

    The loop runs over the shorter operand; each pass adds one shifted,
    scaled copy of the longer operand into a running (sum, compensation)
    pair held per output slot.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < b.size:
        a, b = b, a
    n = a.size + b.size - 1
    s = np.zeros(n)
    comp = np.zeros(n)
    la = a.size
    for k, bk in enumerate(b):
        if bk == 0.0:
            continue
        x = a * bk
        cur = s[k:k + la]
        t = cur + x
        big = np.abs(cur) >= np.abs(x)
        comp[k:k + la] += np.where(big, (cur - t) + x, (x - t) + cur)
        s[k:k + la] = t
    return s + comp


def logsumexp(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return -math.inf
    m = float(np.max(x))
    if not math.isfinite(m):
        return m
    return m + math.log(fsum(np.exp(x - m)))


def second_differences(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        return np.zeros(0)
    return x[2:] - 2.0 * x[1:-1] + x[:-2]
