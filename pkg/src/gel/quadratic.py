"""Discriminants, Pell units, class numbers and the geodesic norm spectrum.

The primitive hyperbolic classes of SL(2, Z) are indexed by discriminants d
(d = 0, 1 mod 4, not a square).  Each d contributes h(d) classes of norm
eps_d**2, where eps_d = (t + u*sqrt(d))/2 is the fundamental solution of
t**2 - d*u**2 = 4.  Since eps + 1/eps = t, the norm only depends on the
trace t, and eps**2 <= x is equivalent to t <= sqrt(x) + 1/sqrt(x).  All
membership decisions below are made on integers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from ._accum import neumaier_prefix
from .errors import DomainError, ResourceLimitError

BY_DISCRIMINANT = "by-discriminant"
BY_TRACE = "by-trace"

# Largest x_max a build accepts by default.  The vectorised Pell search keeps
# d*u^2 + 4 <= 4*x_max + 8 in int64 with an exact square-root correction,
# which is safe far beyond this.
MAX_X_MAX = 1e9
# Work items (d, u) held in memory at once by the vectorised Pell search.
_CHUNK = 1 << 20


def is_square(n):
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def is_discriminant(n):
    """True iff n = 0, 1 (mod 4) and n is not a perfect square."""
    n = int(n)
    return n >= 1 and n % 4 in (0, 1) and not is_square(n)


def _check_disc(d):
    if not is_discriminant(d):
        raise DomainError(f"{d} is not a non-square discriminant")


def pell_fundamental(d, u_max):
    """Smallest solution of t^2 - d u^2 = 4 with 1 <= u <= u_max, or None."""
    _check_disc(d)
    if u_max < 1:
        raise DomainError("u_max must be >= 1")
    for u in range(1, int(u_max) + 1):
        n = d * u * u + 4
        t = math.isqrt(n)
        if t * t == n:
            return t, u
    return None


@dataclass(frozen=True)
class QuadraticForm:
    """Integral binary quadratic form a x^2 + b x y + c y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self):
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self):
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def is_reduced(self):
        # |sqrt(d) - 2|a|| < b < sqrt(d), via squared integer comparisons
        d = self.discriminant
        b, a2 = self.b, 2 * abs(self.a)
        if b <= 0 or b * b >= d:
            return False
        # sqrt(d) - b < 2|a| < sqrt(d) + b
        lower = a2 + b > 0 and (a2 + b) * (a2 + b) > d
        upper = a2 <= b or (a2 - b) * (a2 - b) < d
        return lower and upper

    def rho(self):
        """The reduction operator: (a, b, c) -> (c, b', (b'^2 - d)/(4c))."""
        d = self.discriminant
        s = math.isqrt(d)
        m = 2 * abs(self.c)
        # b' = -b mod 2|c|, chosen in (sqrt(d) - 2|c|, sqrt(d))
        b2 = s - (s + self.b) % m
        return QuadraticForm(self.c, b2, (b2 * b2 - d) // (4 * self.c))


def _reduced_form_arrays(d):
    """All reduced primitive forms of discriminant d as int64 arrays."""
    s = math.isqrt(d)
    b = np.arange(1 if d % 2 else 2, s + 1, 2, dtype=np.int64)
    # reduced with a > 0: (s - b + 1)/2 <= a <= (s + b)/2
    lo = np.maximum(1, (s - b + 2) // 2)
    hi = (s + b) // 2
    cnt = np.maximum(hi - lo + 1, 0)
    B = np.repeat(b, cnt)
    offs = np.concatenate(([0], np.cumsum(cnt)[:-1]))
    A = np.repeat(lo - offs, cnt) + np.arange(B.size, dtype=np.int64)
    N = (d - B * B) // 4
    ok = N % A == 0
    A, B, N = A[ok], B[ok], N[ok]
    C = N // A
    ok = np.gcd(np.gcd(A, B), C) == 1
    A, B, C = A[ok], B[ok], C[ok]
    # ac < 0 for reduced forms; the a < 0 half mirrors the a > 0 half
    return (np.concatenate([A, -A]), np.concatenate([B, B]),
            np.concatenate([-C, C]))


def reduced_forms(d):
    """List of reduced primitive forms of discriminant d."""
    _check_disc(d)
    a, b, c = _reduced_form_arrays(d)
    forms = [QuadraticForm(int(x), int(y), int(z)) for x, y, z in zip(a, b, c)]
    return sorted(forms, key=lambda f: (f.a, f.b))


def class_number(d):
    """Number of rho-cycles of reduced forms, i.e. proper classes of disc d."""
    _check_disc(d)
    d = int(d)
    if d > 1 << 40:
        raise ResourceLimitError(f"class_number: d={d} too large")
    a, b, c = _reduced_form_arrays(d)
    s = math.isqrt(d)
    b2 = s - (s + b) % (2 * np.abs(c))
    # (a, b) determines the form; encode it as one integer key
    key = (a + s) * (s + 1) + b
    key2 = (c + s) * (s + 1) + b2
    order = np.argsort(key, kind="stable")
    succ = order[np.searchsorted(key[order], key2)]
    if not np.array_equal(key[succ], key2):
        raise AssertionError(f"rho left the reduced set for d={d}")
    # label every form by the minimum index on its cycle (pointer doubling)
    lab = np.arange(a.size)
    step, k = succ, 1
    while k < a.size:
        lab = np.minimum(lab, lab[step])
        step = step[step]
        k *= 2
    return int(np.unique(lab).size)


@dataclass(frozen=True)
class DiscriminantRecord:
    """One discriminant of the spectrum: h(d) classes of norm eps_d^2."""

    d: int
    t: int
    u: int
    h: int
    log_eps: float = field(init=False, compare=False, repr=False)
    norm: float = field(init=False, compare=False)

    def __post_init__(self):
        # eps + 1/eps = t, so log eps = acosh(t/2), accurate for every t
        le = math.acosh(self.t / 2)
        object.__setattr__(self, "log_eps", le)
        object.__setattr__(self, "norm", math.exp(2 * le))

    @property
    def t_d(self):
        return self.t

    @property
    def u_d(self):
        return self.u

    @property
    def power_key(self):
        return (self.t, self.u * self.u * self.d)

    def check(self):
        """Raise DomainError unless every record invariant holds."""
        if not (self.d >= 5 and is_discriminant(self.d)):
            raise DomainError(f"d={self.d} is not a non-square discriminant")
        if self.u < 1 or self.t * self.t - self.d * self.u * self.u != 4:
            raise DomainError(f"(t, u)=({self.t}, {self.u}) does not solve t^2 - {self.d} u^2 = 4")
        if pell_fundamental(self.d, self.u) != (self.t, self.u):
            raise DomainError(f"(t, u)=({self.t}, {self.u}) is not fundamental for d={self.d}")
        if self.h < 1:
            raise DomainError(f"class number h={self.h} must be >= 1")
        return self


@dataclass(frozen=True)
class NormSpectrum:
    """All primitive norms eps_d^2 <= x_max with multiplicity h(d)."""

    entries: tuple
    x_max: float
    build_method: str = field(default=BY_DISCRIMINANT, compare=False)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @cached_property
    def norms(self):
        return np.array([e.norm for e in self.entries], dtype=float)

    @cached_property
    def log_eps(self):
        return np.array([e.log_eps for e in self.entries], dtype=float)

    @cached_property
    def h(self):
        return np.array([e.h for e in self.entries], dtype=np.int64)

    @cached_property
    def traces(self):
        return np.array([e.t for e in self.entries], dtype=np.int64)

    @cached_property
    def theta_prefix(self):
        # running compensated sums of h * 2 log eps in ascending-norm order
        return neumaier_prefix(2.0 * self.h * self.log_eps)

    @cached_property
    def count_prefix(self):
        return np.concatenate(([0], np.cumsum(self.h)))

    @property
    def min_norm(self):
        return self.entries[0].norm if self.entries else math.inf

    def restrict(self, x):
        """Sub-spectrum of norms <= x, with coverage bound x."""
        if x > self.x_max:
            raise DomainError("restrict beyond x_max")
        frac = Fraction(x)
        p, q = frac.numerator, frac.denominator
        keep = tuple(e for e in self.entries if _trace_ok(e.t, p, q))
        return NormSpectrum(keep, float(x), self.build_method)


def _trace_ok(t, p, q):
    # eps^2 <= x = p/q  <=>  t^2 x <= (x + 1)^2
    return t * t * p * q <= (p + q) * (p + q)


def max_trace(x_max):
    """Largest t with ((t + sqrt(t^2-4))/2)^2 <= x_max, computed exactly."""
    frac = Fraction(x_max)
    p, q = frac.numerator, frac.denominator
    t = math.isqrt(int(x_max)) + 2
    while t > 2 and not _trace_ok(t, p, q):
        t -= 1
    return t


def _check_x(x_max):
    if not (isinstance(x_max, (int, float)) and math.isfinite(x_max)):
        raise DomainError("x_max must be a finite real")
    if x_max < 6:
        raise DomainError("x_max must be >= 6")
    if x_max > MAX_X_MAX:
        raise ResourceLimitError(
            f"x_max={x_max:g} exceeds the configured cap {MAX_X_MAX:g}")


def _isqrt_array(n):
    # exact floor square root for int64 values below 2^62
    r = np.floor(np.sqrt(n.astype(float))).astype(np.int64)
    r -= (r * r > n)
    r += ((r + 1) * (r + 1) <= n)
    return r


def _pell_first(ds, x_max):
    """Fundamental (t, u) for each d in ds with u <= u_max(d); t=0 if none."""
    ds = np.asarray(ds, dtype=np.int64)
    umax = np.floor(2 * math.sqrt(x_max) / np.sqrt(ds.astype(float))).astype(np.int64) + 1
    tt = np.zeros(ds.size, dtype=np.int64)
    uu = np.zeros(ds.size, dtype=np.int64)
    start = 0
    while start < ds.size:
        # grow the block until it holds about _CHUNK (d, u) pairs
        cum = np.cumsum(umax[start:])
        stop = start + max(1, int(np.searchsorted(cum, _CHUNK, side="right")))
        cnt = umax[start:stop]
        D = np.repeat(ds[start:stop], cnt)
        offs = np.concatenate(([0], np.cumsum(cnt)[:-1]))
        U = np.arange(D.size, dtype=np.int64) - np.repeat(offs, cnt) + 1
        n = D * U * U + 4
        r = _isqrt_array(n)
        hit = np.flatnonzero(r * r == n)
        if hit.size:
            owner = np.repeat(np.arange(start, stop), cnt)[hit]
            first = np.concatenate(([True], owner[1:] != owner[:-1]))
            tt[owner[first]] = r[hit[first]]
            uu[owner[first]] = U[hit[first]]
        start = stop
    return tt, uu


def _candidates(x_max):
    # eps_d >= (sqrt(d) + sqrt(d-4))/2, so eps_d^2 <= x_max forces d <= x_max + 4
    top = int(math.floor(x_max)) + 4
    n = np.arange(5, top + 1, dtype=np.int64)
    n = n[(n % 4 == 0) | (n % 4 == 1)]
    return n[_isqrt_array(n) ** 2 != n]


def _records(pairs, workers=1):
    """Build sorted records from {d: (t, u)}; class numbers optionally threaded."""
    ds = sorted(pairs)
    if workers and workers > 1 and len(ds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            hs = list(ex.map(class_number, ds))
    else:
        hs = [class_number(d) for d in ds]
    recs = [DiscriminantRecord(d, pairs[d][0], pairs[d][1], h) for d, h in zip(ds, hs)]
    # norm is strictly increasing in t, so (t, d) is the exact (norm, d) order
    recs.sort(key=lambda r: (r.t, r.d))
    return tuple(recs)


def build_spectrum(x_max, workers=1, max_candidates=None):
    """Spectrum via a bounded Pell search over every candidate discriminant."""
    _check_x(x_max)
    cap = max_candidates if max_candidates is not None else int(MAX_X_MAX)
    ds = _candidates(x_max)
    if ds.size > cap:
        raise ResourceLimitError(f"{ds.size} candidate discriminants exceed cap {cap}")
    tt, uu = _pell_first(ds, x_max)
    frac = Fraction(x_max)
    p, q = frac.numerator, frac.denominator
    pairs = {}
    for i in np.flatnonzero(tt):
        t, u, d = int(tt[i]), int(uu[i]), int(ds[i])
        if _trace_ok(t, p, q):
            pairs[d] = (t, u)
    return NormSpectrum(_records(pairs, workers), float(x_max), BY_DISCRIMINANT)


def decompose_trace(t):
    """All (d, u) with d*u^2 = t^2 - 4 and d a non-square discriminant."""
    t = int(t)
    if t < 3:
        raise DomainError("trace must be >= 3")
    n = t * t - 4
    out = []
    u = 1
    while 5 * u * u <= n:
        if n % (u * u) == 0 and is_discriminant(n // (u * u)):
            out.append((n // (u * u), u))
        u += 1
    return sorted(out)


def build_spectrum_by_trace(x_max, workers=1):
    """Spectrum via traces t <= sqrt(x) + 1/sqrt(x); first t per d is fundamental."""
    _check_x(x_max)
    T = max_trace(x_max)
    pairs = {}
    if T >= 3:
        tt = np.arange(3, T + 1, dtype=np.int64)
        n = tt * tt - 4
        umax = int(math.isqrt(T * T // 5)) + 1
        for u in range(1, umax + 1):
            sel = n % (u * u) == 0
            if not sel.any():
                continue
            d = n[sel] // (u * u)
            ok = ((d % 4 == 0) | (d % 4 == 1)) & (d >= 5) & (_isqrt_array(d) ** 2 != d)
            for dv, tv in zip(d[ok].tolist(), tt[sel][ok].tolist()):
                if dv not in pairs or tv < pairs[dv][0]:
                    pairs[dv] = (tv, u)
    return NormSpectrum(_records(pairs, workers), float(x_max), BY_TRACE)


# -- the L-series attached to t^2 - 4 ---------------------------------------

@lru_cache(maxsize=4)
def _sieve_tables(q_max):
    """Factor structure of 1..q_max: prime powers and the spf split of each q."""
    Q = int(q_max)
    spf = np.zeros(Q + 1, dtype=np.int64)
    for p in range(2, math.isqrt(Q) + 1):
        if spf[p] == 0:
            blk = spf[p * p::p]
            blk[blk == 0] = p
    idx = np.arange(Q + 1)
    spf[spf == 0] = idx[spf == 0]
    spf[:2] = 0
    primes = np.flatnonzero(spf == np.arange(Q + 1))
    primes = primes[primes >= 2]
    # exact power of spf(q) dividing q, and the cofactor
    pk = np.ones(Q + 1, dtype=np.int64)
    cof = np.arange(Q + 1, dtype=np.int64)
    live = np.arange(2, Q + 1)
    while live.size:
        p = spf[live]
        m = cof[live] % p == 0
        live = live[m]
        pk[live] *= spf[live]
        cof[live] //= spf[live]
    # prime powers p^k <= Q
    pp, pp_p, pp_k = [], [], []
    for p in primes.tolist():
        v, k = p, 1
        while v <= Q:
            pp.append(v)
            pp_p.append(p)
            pp_k.append(k)
            v *= p
            k += 1
    pp = np.array(pp, dtype=np.int64)
    pos = np.full(Q + 1, -1, dtype=np.int64)
    pos[pp] = np.arange(pp.size)
    # evaluation order: q is a product of its spf power and a smaller cofactor
    omega = np.zeros(Q + 1, dtype=np.int64)
    for q in range(2, Q + 1):
        omega[q] = omega[cof[q]] + 1
    layers = [np.flatnonzero(omega == w) for w in range(2, int(omega.max()) + 1)]
    return (pp, np.array(pp_p, dtype=np.int64), np.array(pp_k, dtype=np.int64),
            pos, pk, cof, layers)


def _powmod(b, e, m):
    b = b % m
    r = np.ones_like(b)
    e = e.copy()
    while e.any():
        odd = (e & 1) == 1
        r = np.where(odd, r * b % m, r)
        b = b * b % m
        e >>= 1
    return r


def rho_count(q, delta):
    """#{x mod 2q : x^2 = delta mod 4q}, by direct count."""
    q = int(q)
    x = np.arange(2 * q, dtype=object if q > 1 << 30 else np.int64)
    return int(np.count_nonzero((x * x - delta) % (4 * q) == 0))


def _lambda_prime_powers(delta, pp_p, pp_k):
    """lambda_{p^k}(delta) for every listed prime power."""
    K = int(pp_k.max()) if pp_k.size else 0
    # rho_{p^c} for c = 0..K as a (len, K+1) table
    P = pp_p
    odd = P != 2
    v = np.zeros(P.size, dtype=np.int64)
    red = np.full(P.size, delta, dtype=np.int64)
    while True:
        m = red % P == 0
        if not m.any():
            break
        v[m] += 1
        red[m] //= P[m]
    leg = _powmod(red % P, (P - 1) // 2, P)
    qr = (leg == 1) & odd
    rho = np.zeros((P.size, K + 1), dtype=float)
    rho[:, 0] = 1.0
    for c in range(1, K + 1):
        low = c <= v
        hi_ok = (v % 2 == 0) & qr
        rho[:, c] = np.where(low, P.astype(float) ** (c // 2),
                             np.where(hi_ok, 2.0 * P.astype(float) ** (v // 2), 0.0))
    for i in np.flatnonzero(~odd):
        for c in range(1, int(pp_k[i]) + 1):
            rho[i, c] = rho_count(2 ** c, delta)
    lam = np.zeros(P.size)
    for a in range(0, K // 2 + 1):
        c = pp_k - 2 * a
        ok = c >= 0
        cc = np.clip(c, 0, K)
        cm = np.clip(c - 1, 0, K)
        r = np.arange(P.size)
        term = rho[r, cc] - np.where(c >= 1, rho[r, cm], 0.0)
        lam += np.where(ok, term, 0.0)
    return lam


def curly_L(delta, q_max):
    """Partial sum sum_{q <= q_max} lambda_q(delta)/q approximating L(1, delta).

    rho_q and lambda_q are multiplicative in q; lambda is evaluated exactly at
    prime powers and extended through the smallest-prime-factor split.
    """
    delta = int(delta)
    if delta <= 0 or delta % 4 not in (0, 1) or delta >= 1 << 62:
        raise DomainError("delta must be positive and 0 or 1 mod 4")
    q_max = int(q_max)
    if q_max < 1:
        raise DomainError("q_max must be >= 1")
    if q_max == 1:
        return 1.0
    pp, pp_p, pp_k, pos, pk, cof, layers = _sieve_tables(q_max)
    lam_pp = _lambda_prime_powers(delta, pp_p, pp_k)
    lam = np.zeros(q_max + 1)
    lam[1] = 1.0
    lam[pp] = lam_pp
    for layer in layers:
        lam[layer] = lam[cof[layer]] * lam_pp[pos[pk[layer]]]
    terms = lam[1:] / np.arange(1, q_max + 1)
    return math.fsum(terms.tolist())
