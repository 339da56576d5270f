"""Counting functions over the norm spectrum.

theta(x) = sum h * log N over primitive norms N <= x
psi(x)   = sum over all powers N^k <= x of h * log N
pi(x)    = number of primitive classes (with multiplicity h) of norm <= x
Pi(x)    = sum_k pi(x^(1/k)) / k
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, DomainError


def _check(spectrum, x):
    if not math.isfinite(x):
        raise DomainError("x must be finite")
    if x > spectrum.x_max:
        raise CoverageError(f"x={x:g} exceeds spectrum coverage {spectrum.x_max:g}")


def _index(spectrum, x):
    # step functions are inclusive at a norm
    return int(np.searchsorted(spectrum.norms, x, side="right"))


def _roots(spectrum, x):
    """x^(1/k) for k = 1, 2, ... while it still reaches the least norm."""
    out = []
    k = 1
    m = spectrum.min_norm
    while True:
        r = x ** (1.0 / k)
        if r < m:
            return out
        out.append(r)
        k += 1


def theta(spectrum, x):
    _check(spectrum, x)
    return float(spectrum.theta_prefix[_index(spectrum, x)])


def psi(spectrum, x):
    _check(spectrum, x)
    pre = spectrum.theta_prefix
    return math.fsum(pre[_index(spectrum, r)] for r in _roots(spectrum, x))


def pi_count(spectrum, x):
    _check(spectrum, x)
    return int(spectrum.count_prefix[_index(spectrum, x)])


def Pi_weighted(spectrum, x):
    _check(spectrum, x)
    pre = spectrum.count_prefix
    return math.fsum(int(pre[_index(spectrum, r)]) / k
                     for k, r in enumerate(_roots(spectrum, x), 1))


def short_interval_ratio(spectrum, x, y):
    """(pi(x+y) - pi(x)) * log x / y."""
    if not y > 0:
        raise DomainError("y must be positive")
    if x <= 1:
        raise DomainError("x must exceed 1")
    _check(spectrum, x + y)
    return (pi_count(spectrum, x + y) - pi_count(spectrum, x)) * math.log(x) / y


@dataclass(frozen=True)
class CountingSnapshot:
    x: float
    theta: float
    psi: float
    pi_prim: int
    Pi_weighted: float
    pgt_error: float


def snapshot(spectrum, x):
    p = psi(spectrum, x)
    return CountingSnapshot(x, theta(spectrum, x), p, pi_count(spectrum, x),
                            Pi_weighted(spectrum, x), p - x)


def pgt_exponent(xs, errors):
    """Least-squares slope of log|error| against log x."""
    xs = np.asarray(xs, dtype=float)
    err = np.abs(np.asarray(errors, dtype=float))
    keep = err > 0
    if keep.sum() < 2:
        raise DomainError("need two nonzero errors to fit an exponent")
    slope, _ = np.polyfit(np.log(xs[keep]), np.log(err[keep]), 1)
    return float(slope)
