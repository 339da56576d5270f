"""Classical baselines over the rational primes, and Kloosterman sums.

These give the rational-prime versions of the geodesic experiments
(Mertens' product, Ramanujan's formula for partial Euler products in the
strip, the central-point product for the character mod 4) plus Kloosterman
sums with their Weil bound and the Selberg-Kloosterman partial sums.
"""

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from ._accum import neumaier_sum
from .errors import CoverageError, DomainError, ParseError, ValidationError, VersionError
from .specfun import EULER_GAMMA, li_power

# -- primes -----------------------------------------------------------------


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, limit):
        limit = int(limit)
        if limit < 2:
            raise DomainError("prime table limit must be >= 2")
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                sieve[p * p::p] = False
        return cls(limit, np.flatnonzero(sieve))

    def upto(self, x):
        if x > self.limit:
            raise CoverageError(f"x={x:g} exceeds prime table limit {self.limit}")
        return self.primes[: int(np.searchsorted(self.primes, x, side="right"))]

    def chebyshev_theta(self, x):
        return math.fsum(np.log(self.upto(x).astype(float)).tolist())


@lru_cache(maxsize=4)
def prime_table(limit=10**6):
    return PrimeTable.build(limit)


def _table(x, table):
    if table is None:
        table = prime_table(max(10**6, int(math.ceil(x))))
    return table


def mertens_ratio(x, table=None):
    """prod_{p <= x} (1 - 1/p)^-1 / (e^gamma log x)."""
    if not x > 1:
        raise DomainError("mertens_ratio needs x > 1")
    ps = _table(x, table).upto(x).astype(float)
    log_prod = -math.fsum(np.log1p(-1.0 / ps).tolist())
    return math.exp(log_prod - EULER_GAMMA) / math.log(x)


# -- zeta and L on the real line ---------------------------------------------


@lru_cache(maxsize=None)
def _borwein_weights(n):
    # d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), returned as (d_k - d_n)/d_n
    d, acc = [], 0
    for i in range(n + 1):
        acc += Fraction(math.factorial(n + i - 1) * 4 ** i,
                        math.factorial(n - i) * math.factorial(2 * i))
        d.append(n * acc)
    dn = d[n]
    return np.array([float((d[k] - dn) / dn) for k in range(n)])


def _alternating(s, bases, n=60):
    """sum_k (-1)^k bases[k]^-s accelerated with Borwein's weights."""
    w = _borwein_weights(n)
    k = np.arange(n)
    terms = (-1.0) ** k * w * np.exp(-complex(s) * np.log(bases(k)))
    return -complex(neumaier_sum(terms))


def eta(s, n=60):
    """Dirichlet eta function sum (-1)^k (k+1)^-s."""
    return _alternating(s, lambda k: k + 1.0, n)


def zeta(s, n=60):
    """Riemann zeta via eta(s)/(1 - 2^(1-s)), valid for Re s > 0, s != 1."""
    s = complex(s)
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    if s.real <= 0:
        raise DomainError("zeta evaluator needs Re s > 0")
    v = eta(s, n) / (1 - 2 ** (1 - s))
    return v.real if s.imag == 0 else v


def dirichlet_beta(s, n=60):
    """L(s, chi_4) = sum (-1)^k (2k+1)^-s."""
    v = _alternating(s, lambda k: 2.0 * k + 1.0, n)
    return v.real if complex(s).imag == 0 else v


def _theta_rs(t):
    # Riemann-Siegel theta by its Stirling expansion (accurate for t >= 5)
    return (t / 2 * math.log(t / (2 * math.pi)) - t / 2 - math.pi / 8
            + 1 / (48 * t) + 7 / (5760 * t ** 3) + 31 / (80640 * t ** 5))


def hardy_z(t, n=90):
    """Z(t) = e^{i theta(t)} zeta(1/2 + i t), real for real t."""
    return (cmath.exp(1j * _theta_rs(t)) * zeta(0.5 + 1j * t, n)).real


def first_zero_scan(lo=10.0, hi=20.0, step=0.05, tol=1e-10):
    """Ordinate of the first sign change of Z on [lo, hi], by bisection."""
    a, za = lo, hardy_z(lo)
    while a < hi:
        b = a + step
        zb = hardy_z(b)
        if za * zb < 0:
            while b - a > tol:
                m = 0.5 * (a + b)
                zm = hardy_z(m)
                if za * zm <= 0:
                    b = m
                else:
                    a, za = m, zm
            return 0.5 * (a + b)
        a, za = b, zb
    raise DomainError("no sign change of Z found")


# -- Riemann zeros -------------------------------------------------------------

ZEROS_HEADER = "gel-zeros"
ZEROS_VERSION = "v1"
FIRST_ZERO = 14.134725


@dataclass(frozen=True)
class ZerosDataset:
    gammas: tuple

    def __post_init__(self):
        g = self.gammas
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValidationError("zero ordinates are not strictly ascending")
        if g and abs(g[0] - FIRST_ZERO) > 1e-3:
            raise ValidationError(f"first ordinate {g[0]} is not within 1e-3 of {FIRST_ZERO}")

    def __len__(self):
        return len(self.gammas)


def parse_zeros(text):
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty zeros file", line=1)
    head = lines[0].split()
    if len(head) < 2 or head[0] != ZEROS_HEADER:
        raise ParseError(f"expected header '{ZEROS_HEADER} {ZEROS_VERSION}'", line=1)
    if head[1] != ZEROS_VERSION:
        raise VersionError(f"unsupported zeros format version {head[1]!r}")
    gs = []
    for no, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            g = float(line)
        except ValueError:
            raise ParseError(f"bad ordinate {line!r}", line=no) from None
        if not (g > 0 and math.isfinite(g)):
            raise ValidationError(f"ordinate {line} is not positive", line=no)
        if gs and g <= gs[-1]:
            raise ValidationError(f"ordinate {line} out of ascending order", line=no)
        gs.append(g)
    return ZerosDataset(tuple(gs))


def format_zeros(zs):
    return f"{ZEROS_HEADER} {ZEROS_VERSION}\n" + "".join(f"{g!r}\n" for g in zs.gammas)


def load_zeros(path=None):
    """Load a zeros file, or the bundled list when path is None."""
    if path is None:
        text = resources.files("gel.data").joinpath("zeta_zeros.txt").read_text(encoding="ascii")
    else:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    return parse_zeros(text)


# -- Ramanujan's formula and the central point for chi_4 -------------------------


def _check_half_strip(s):
    if not 0.5 < s < 1:
        raise DomainError("s must lie in (1/2, 1)")


def euler_product_real(s, x, table=None):
    """prod_{p <= x} (1 - p^-s)^-1 for real s."""
    ps = _table(x, table).upto(x).astype(float)
    return math.exp(-math.fsum(np.log1p(-ps ** (-s)).tolist()))


def zero_sum(s, x, zeros, K):
    """S_s(x) = -s sum over the first K zeros (with conjugates) of x^(rho-s)/(rho(rho-s))."""
    if K > len(zeros):
        raise DomainError(f"asked for {K} zeros, dataset has {len(zeros)}")
    if K == 0:
        return 0.0
    g = np.array(zeros.gammas[:K])
    rho = 0.5 + 1j * g
    lx = math.log(x)
    terms = np.exp((rho - s) * lx) / (rho * (rho - s))
    return -s * 2.0 * math.fsum(terms.real.tolist())


def ramanujan_rhs(s, x, zeros, K, table=None):
    """-zeta(s) exp(Li(theta(x)^(1-s)) + 2s x^(1/2-s)/((2s-1) log x) + S_s(x)/log x)."""
    _check_half_strip(s)
    tab = _table(x, table)
    th = tab.chebyshev_theta(x)
    lx = math.log(x)
    expo = (li_power(th, 1 - s).real
            + 2 * s * x ** (0.5 - s) / ((2 * s - 1) * lx)
            + zero_sum(s, x, zeros, K) / lx)
    return -zeta(s) * math.exp(expo)


def ramanujan_error(s, x, zeros, K, table=None):
    """|LHS/RHS - 1| with LHS the partial Euler product over p <= x."""
    _check_half_strip(s)
    lhs = euler_product_real(s, x, table)
    return abs(lhs / ramanujan_rhs(s, x, zeros, K, table) - 1)


def drh_dirichlet_ratio(x, table=None):
    """prod_{p <= x} (1 - chi_4(p) p^-1/2)^-1 / (sqrt 2 L(1/2, chi_4))."""
    if not x >= 1:
        raise DomainError("x must be >= 1")
    ps = _table(x, table).upto(x)
    ps = ps[ps % 2 == 1]
    chi = np.where(ps % 4 == 1, 1.0, -1.0)
    log_prod = -math.fsum(np.log1p(-chi / np.sqrt(ps.astype(float))).tolist())
    return math.exp(log_prod) / (math.sqrt(2) * dirichlet_beta(0.5))


def drh_log_averaged(xs, table=None):
    """Mean of drh_dirichlet_ratio over a (geometric) grid."""
    xs = list(xs)
    if not xs:
        raise DomainError("empty grid")
    return math.fsum(drh_dirichlet_ratio(x, table) for x in xs) / len(xs)


# -- Kloosterman sums -----------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """A character given by its table of values on 0..modulus-1."""

    modulus: int
    values: tuple
    name: str = ""

    def __call__(self, n):
        return self.values[n % self.modulus]

    def table(self, ds):
        return np.asarray(self.values, dtype=complex)[np.asarray(ds) % self.modulus]


def trivial_character():
    return DirichletCharacter(1, (1.0,), "trivial")


def chi4():
    return DirichletCharacter(4, (0.0, 1.0, 0.0, -1.0), "chi4")


def tau(n):
    """Number of divisors."""
    n = int(n)
    count, p = 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        count *= e + 1
        p += 1
    return count * (2 if n > 1 else 1)


def _units_and_inverses(c):
    d = np.arange(c, dtype=np.int64)
    d = d[np.gcd(d, c) == 1]
    if c == 1:
        return np.zeros(1, np.int64), np.zeros(1, np.int64)
    # d^(phi(c)-1) = d^-1 mod c
    phi = d.size
    e = np.full(d.size, phi - 1, dtype=np.int64)
    return d, _powmod(d, e, c)


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


def _roots(c):
    return np.exp(2j * np.pi * np.arange(c) / c)


def _check_char(c, chi):
    if c < 1:
        raise DomainError("modulus c must be >= 1")
    if c % chi.modulus:
        raise DomainError(f"character modulus {chi.modulus} does not divide c={c}")


def kloosterman(m, n, c, chi=None):
    """sum over units d mod c of chi(d) e((m dbar + n d)/c)."""
    chi = chi or trivial_character()
    c = int(c)
    _check_char(c, chi)
    d, dbar = _units_and_inverses(c)
    idx = (m * dbar + n * d) % c
    return complex(np.sum(chi.table(d) * _roots(c)[idx]))


def weil_bound(m, n, c):
    g = math.gcd(math.gcd(int(m), int(n)), int(c))
    return math.sqrt(g) * math.sqrt(c) * tau(c)


def weil_check(m, n, c, chi=None):
    return abs(kloosterman(m, n, c, chi)) <= weil_bound(m, n, c) + 1e-9


@dataclass(frozen=True)
class SweepResult:
    checked: int
    violations: tuple  # of (m, n, c, |S|, bound)
    worst_ratio: float


def _sweep_one(c, mn_max, chi):
    d, dbar = _units_and_inverses(c)
    roots = _roots(c)
    cv = chi.table(d)
    out, worst = [], 0.0
    for m in range(mn_max + 1):
        base = m * dbar
        for n in range(mn_max + 1):
            val = complex(np.sum(cv * roots[(base + n * d) % c]))
            bound = weil_bound(m, n, c)
            worst = max(worst, abs(val) / bound)
            if abs(val) > bound + 1e-9:
                out.append((m, n, c, abs(val), bound))
    return (mn_max + 1) ** 2, out, worst


def kloosterman_sweep(c_max, mn_max=10, chi=None, workers=1):
    """Weil check for every c <= c_max divisible by the character modulus."""
    chi = chi or trivial_character()
    cs = [c for c in range(1, int(c_max) + 1) if c % chi.modulus == 0]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda c: _sweep_one(c, mn_max, chi), cs))
    else:
        parts = [_sweep_one(c, mn_max, chi) for c in cs]
    checked = sum(p[0] for p in parts)
    viol = tuple(v for p in parts for v in p[1])
    worst = max((p[2] for p in parts), default=0.0)
    return SweepResult(checked, viol, worst)


def selberg_kloosterman_partial(m, n, s, q=1, chi=None, C=1000):
    """sum_{c = 0 mod q, c <= C} S_chi(m, n; c) / c^(2s)."""
    chi = chi or trivial_character()
    s = complex(s)
    if not s.real > 0.5:
        raise DomainError("need Re s > 1/2")
    if q % chi.modulus:
        raise DomainError("character modulus must divide q")
    terms = [kloosterman(m, n, c, chi) * cmath.exp(-2 * s * math.log(c))
             for c in range(q, int(C) + 1, q)]
    if not terms:
        return 0j
    return complex(neumaier_sum(np.array(terms)))


def weil_tail_envelope(c_lo, c_hi, sigma, q=1):
    """sum over c_lo < c <= c_hi, q | c, of c^(1/2) tau(c) c^(-2 sigma)."""
    cs = [c for c in range(int(c_lo) + 1, int(c_hi) + 1) if c % q == 0]
    return math.fsum(math.sqrt(c) * tau(c) * c ** (-2 * sigma) for c in cs)
