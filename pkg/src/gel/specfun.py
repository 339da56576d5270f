"""Exponential integral Ei on the cut plane and Li of complex powers.

Ei(z) = gamma + Log z + sum_{n>=1} z^n / (n n!)

On the real axis the principal value is returned (Ei(-x) = -E1(x) and the
PV integral for x > 0), so the result is real there.  Off the axis the
principal logarithm fixes the branch, and Ei(z) = -E1(-z) + i*pi*sgn(Im z).
"""

import cmath
import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286060651209
SWITCH_RADIUS = 34.0

# |z| - Re z below this keeps the power series free of heavy cancellation
_SERIES_SLACK = 8.0


def _ei_series(z):
    term = z
    total = z
    n = 1
    while True:
        n += 1
        term *= z * (n - 1) / (n * n)
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        if n > 400:
            break
    return total + EULER_GAMMA + cmath.log(z)


def _e1_cf(w):
    """E1(w) by the continued fraction (modified Lentz), |arg w| < pi."""
    tiny = 1e-300
    b = w + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 20000):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if d == 0:
            d = tiny
        c = b + an / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * cmath.exp(-w)


def _ei_near(z):
    """Ei for |z| <= SWITCH_RADIUS (series, or E1 continued fraction)."""
    if abs(z) <= 2.0 or abs(z) - z.real <= _SERIES_SLACK:
        v = _ei_series(z)
        if z.imag == 0:
            v = complex(v.real, 0.0)
        return v
    v = -_e1_cf(-z)
    if z.imag > 0:
        v += 1j * math.pi
    elif z.imag < 0:
        v -= 1j * math.pi
    else:
        v = complex(v.real, 0.0)
    return v


def _ei_asymptotic(z):
    """e^z/z * sum_{k <= floor|z|} k!/z^k, plus the i*pi*sgn(Im z) jump."""
    K = int(math.floor(abs(z)))
    term = 1.0 + 0j
    total = term
    for k in range(1, K + 1):
        term *= k / z
        total += term
    v = cmath.exp(z) / z * total
    if z.imag > 0:
        v += 1j * math.pi
    elif z.imag < 0:
        v -= 1j * math.pi
    else:
        v = complex(v.real, 0.0)
    return v


def ei(z):
    """Exponential integral Ei(z) as a complex number."""
    z = complex(z)
    if z == 0:
        raise DomainError("Ei is singular at 0")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("Ei needs a finite argument")
    if abs(z) > SWITCH_RADIUS:
        return _ei_asymptotic(z)
    return _ei_near(z)


def li(y):
    """Principal-value logarithmic integral of a real y > 0, y != 1."""
    if y <= 0 or y == 1:
        raise DomainError("li needs y > 0, y != 1")
    return ei(math.log(y)).real


def li_power(x, w):
    """Li(x^w) := Ei(w log x)."""
    w = complex(w)
    if not x > 1:
        raise DomainError("li_power needs x > 1")
    if w == 0:
        raise DomainError("li_power needs w != 0")
    return ei(w * math.log(x))


def log2_limit_terms(x, s, theta_x):
    """Li(x^(1/2 - s)) - Li(theta_x^(1 - 2s)) at a single real s."""
    if s == 0.5:
        raise DomainError("s = 1/2 is the limit point itself")
    if not theta_x > 1:
        raise DomainError("theta(x) must exceed 1")
    return (li_power(x, 0.5 - s) - li_power(theta_x, 1 - 2 * s)).real


def log2_limit_check(x, s_seq, theta_x):
    """Limit of Li(x^(1/2-s)) - Li(theta_x^(1-2s)) as s -> 1/2+.

    Evaluates the difference along s_seq and extrapolates polynomially in
    (s - 1/2) to s = 1/2.  A single s returns the value itself.
    """
    s_seq = [float(s) for s in s_seq]
    if not s_seq:
        raise DomainError("empty s sequence")
    vals = [log2_limit_terms(x, s, theta_x) for s in s_seq]
    if len(vals) == 1:
        return vals[0]
    h = np.array(s_seq) - 0.5
    deg = min(len(vals) - 1, 2)
    coef = np.polyfit(h, np.array(vals), deg)
    return float(coef[-1])
