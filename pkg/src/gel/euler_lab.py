"""Partial Euler products over the geodesic spectrum and their renormalizers.

zeta_x(s) = prod_{N(p) <= x} (1 - N(p)^-s)^-1, taken over primitive norms
with multiplicity h.  Everything is carried in log space; a renormalized
value is exp(log zeta_x(s) - R(s, x)) for one of the renormalizers below.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import counts
from ._accum import neumaier_prefix
from .errors import CoverageError, DomainError, InsufficientCheckpointsError, RegionError
from .specfun import EULER_GAMMA, li_power

TAGS = ("case1", "case2", "case3", "ultimate", "none")
# Re s = 1/2 is matched with this slack so that parsed decimals qualify
_LINE_TOL = 1e-12


def _log1m(w):
    """log(1 - w) for complex arrays, accurate when |w| is small."""
    re, im = -w.real, -w.imag
    mod = 0.5 * np.log1p(2.0 * re + re * re + im * im)
    return mod + 1j * np.arctan2(im, 1.0 + re)


def _log_terms(spectrum, s):
    # -h log(1 - N^-s) with N^-s = exp(-2 s log eps)
    w = np.exp(-2.0 * complex(s) * spectrum.log_eps)
    return -spectrum.h * _log1m(w)


def _check_s(s):
    s = complex(s)
    if not s.real > 0:
        raise DomainError("partial Euler products need Re s > 0")
    return s


def _check_x(spectrum, x):
    if x > spectrum.x_max:
        raise CoverageError(f"x={x:g} exceeds spectrum coverage {spectrum.x_max:g}")


def partial_log_zeta(spectrum, s, x):
    """-sum_{N <= x} h log(1 - N^-s), compensated, in ascending-norm order."""
    s = _check_s(s)
    _check_x(spectrum, x)
    n = int(np.searchsorted(spectrum.norms, x, side="right"))
    if n == 0:
        return 0j
    return complex(neumaier_prefix(_log_terms(spectrum, s)[:n])[-1])


def _partial_log_zeta_many(spectrum, s, xs):
    s = _check_s(s)
    for x in xs:
        _check_x(spectrum, x)
    pre = neumaier_prefix(_log_terms(spectrum, s)) if len(spectrum) else np.zeros(1, complex)
    idx = np.searchsorted(spectrum.norms, xs, side="right")
    return [complex(pre[i]) for i in idx]


def case1_order(s):
    """n = floor(1 + 1/(2|sigma|)) for the left half of the strip."""
    sigma = complex(s).real
    if sigma == 0:
        raise DomainError("sigma must be nonzero")
    return int(math.floor(1 + 1 / (2 * abs(sigma))))


def renormalizer(spectrum, s, x, tag):
    """Additive log-renormalizer R(s, x) for the given case tag."""
    s = complex(s)
    if tag not in TAGS:
        raise DomainError(f"unknown renormalizer tag {tag!r}")
    _check_x(spectrum, x)
    sigma = s.real
    if tag == "none":
        return 0j
    if tag == "ultimate":
        return li_power(x, 1 - s)
    if tag == "case1" and not 0 < sigma < 0.5:
        raise RegionError("case1 needs 0 < Re s < 1/2")
    if tag == "case2" and abs(sigma - 0.5) > _LINE_TOL:
        raise RegionError("case2 needs Re s = 1/2")
    if tag == "case3" and not sigma > 0.5:
        raise RegionError("case3 needs Re s > 1/2")
    th = counts.theta(spectrum, x)
    if th <= 1:
        raise DomainError("theta(x) must exceed 1 for Li(theta^w)")
    if tag == "case1":
        n = case1_order(s)
        return sum(li_power(th, 1 - nu * s) / nu for nu in range(1, n + 1))
    # the sums over exceptional s_j in (1/2, 1) are empty for the modular group
    return li_power(th, 1 - s)


@dataclass(frozen=True)
class ProductTrace:
    s: complex
    checkpoints: tuple  # of (x, log_raw, renorm)
    renormalizer_tag: str

    @property
    def xs(self):
        return [c[0] for c in self.checkpoints]

    @property
    def renorms(self):
        return [c[2] for c in self.checkpoints]


@dataclass(frozen=True)
class LimitEstimate:
    value: complex
    sign: int
    dispersion: float
    samples: tuple = ()


def renormalized_trace(spectrum, s, checkpoints, tag="ultimate"):
    s = complex(s)
    xs = [float(x) for x in checkpoints]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("checkpoints must be strictly increasing")
    if not xs:
        return ProductTrace(s, (), tag)
    raw = _partial_log_zeta_many(spectrum, s, xs)
    rows = []
    for x, lr in zip(xs, raw):
        r = cmath.exp(lr - renormalizer(spectrum, s, x, tag))
        if not (math.isfinite(r.real) and math.isfinite(r.imag)):
            raise DomainError(f"renormalized value overflowed at x={x:g}")
        rows.append((x, lr, r))
    return ProductTrace(s, tuple(rows), tag)


def _dispersion(vals):
    return max((abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1:]), default=0.0)


def _estimate(vals):
    vals = [complex(v) for v in vals]
    value = sum(vals) / len(vals)
    disp = _dispersion(vals)
    sign = 1
    if abs(value.imag) <= disp and value.real < 0:
        sign = -1
    return LimitEstimate(value, sign, disp, tuple(vals))


def estimate_limit(trace, tail_count=None):
    """Mean, sign and max pairwise spread of the last tail_count renorms."""
    n = len(trace.checkpoints)
    k = n if tail_count is None else int(tail_count)
    if k < 2 or n < k:
        raise InsufficientCheckpointsError(f"need at least {max(k, 2)} checkpoints, have {n}")
    return _estimate(trace.renorms[-k:])


def mertens_geodesic(spectrum, checkpoints):
    """zeta_x(1) / (e^gamma log x) at each checkpoint, summarised."""
    if len(spectrum) == 0:
        raise DomainError("empty spectrum")
    xs = [float(x) for x in checkpoints]
    if not xs:
        raise InsufficientCheckpointsError("no checkpoints")
    raw = _partial_log_zeta_many(spectrum, 1.0, xs)
    vals = [math.exp(r.real) / (math.exp(EULER_GAMMA) * math.log(x)) for x, r in zip(xs, raw)]
    return _estimate(vals)


def z_partial(spectrum, s, x, n_max):
    """prod_{n=0..n_max} zeta_x(s+n)^-1 and a bound on the omitted log tail."""
    s = _check_s(s)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    _check_x(spectrum, x)
    k = int(np.searchsorted(spectrum.norms, x, side="right"))
    logs = [partial_log_zeta(spectrum, s + n, x) for n in range(n_max + 1)]
    val = cmath.exp(-math.fsum(v.real for v in logs) - 1j * math.fsum(v.imag for v in logs))
    N = spectrum.norms[:k]
    h = spectrum.h[:k]
    # |log(1-w)| <= |w|/(1-|w|) with |w| <= 1/N, and the geometric sum over
    # n > n_max of N^-(sigma+n) is N^-(sigma+n_max+1)/(1-1/N)
    tail = math.fsum((h * N ** (-(s.real + n_max + 1)) / (1 - 1 / N) / (1 - 1 / N)).tolist())
    return val, tail


@dataclass(frozen=True)
class ScanRow:
    sigma: float
    slope: float
    beta: float
    spreads: tuple


def equivalence_scan(spectrum, sigma_grid, checkpoints):
    """Fit |renorm(x_{i+1}) - renorm(x_i)| ~ C x_i^(beta - sigma) per sigma."""
    rows = []
    for sigma in sigma_grid:
        sigma = float(sigma)
        if sigma == 1.0:
            # the ultimate renormalizer Li(x^0) is singular at s = 1
            rows.append(ScanRow(sigma, math.nan, math.nan, ()))
            continue
        tr = renormalized_trace(spectrum, sigma, checkpoints, "ultimate")
        xs, rs = tr.xs, tr.renorms
        spreads = tuple(abs(b - a) for a, b in zip(rs, rs[1:]))
        keep = [(x, d) for x, d in zip(xs, spreads) if d > 0]
        if len(keep) < 2:
            rows.append(ScanRow(sigma, math.nan, math.nan, spreads))
            continue
        lx = np.log([k[0] for k in keep])
        ld = np.log([k[1] for k in keep])
        slope = float(np.polyfit(lx, ld, 1)[0])
        rows.append(ScanRow(sigma, slope, slope + sigma, spreads))
    return rows
