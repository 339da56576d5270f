"""Maass spectral data, the explicit formula for psi and spectral sums.

Spectral parameters t_j come from Laplace eigenvalues lambda_j = 1/4 + t_j^2
of cusp forms on SL(2, Z); the Selberg zeta zeros on the critical line are
s_j = 1/2 +- i t_j.  The only small eigenvalue is lambda_0 = 0, giving the
single exceptional zero s_0 = 1.
"""

import cmath
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import counts
from .errors import CoverageError, DomainError, ParseError, RangeError, ValidationError, VersionError

HEADER = "gel-spectral"
VERSION = "v1"
BUNDLED = "sl2z_maass.txt"
# smallest cusp-form eigenvalue for SL(2, Z), to two decimals
LAMBDA1 = 91.14


@dataclass(frozen=True)
class SpectralDataset:
    exceptional: tuple = (1.0,)
    t_values: tuple = ()
    multiplicities: tuple = ()
    source: str = ""
    t_arr: np.ndarray = field(init=False, compare=False, repr=False)
    m_arr: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if len(self.t_values) != len(self.multiplicities):
            raise ValidationError("t_values and multiplicities differ in length")
        for e in self.exceptional:
            if not 0.5 < e <= 1:
                raise ValidationError(f"exceptional zero {e} outside (1/2, 1]")
        for i, (t, m) in enumerate(zip(self.t_values, self.multiplicities)):
            if not (t > 0 and math.isfinite(t)):
                raise ValidationError(f"t_{i + 1}={t} is not positive")
            if int(m) != m or m < 1:
                raise ValidationError(f"multiplicity {m} of t={t} is not a positive integer")
        if any(b <= a for a, b in zip(self.t_values, self.t_values[1:])):
            raise ValidationError("t_values are not strictly increasing")
        object.__setattr__(self, "t_arr", np.array(self.t_values, dtype=float))
        object.__setattr__(self, "m_arr", np.array(self.multiplicities, dtype=float))

    @property
    def t_max(self):
        # an empty list claims an empty cusp spectrum, so it covers everything
        return self.t_values[-1] if self.t_values else math.inf

    def weyl_count(self, T):
        return int(self.m_arr[self.t_arr <= T].sum())


def parse_spectral(text, exceptional=(1.0,)):
    """Parse the line format: header, then `t<TAB>multiplicity` lines."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty spectral file", line=1)
    head = lines[0].split(None, 2)
    if len(head) < 2 or head[0] != HEADER:
        raise ParseError(f"expected header '{HEADER} {VERSION} <source>'", line=1)
    if head[1] != VERSION:
        raise VersionError(f"unsupported spectral format version {head[1]!r}")
    source = head[2].strip() if len(head) > 2 else ""
    ts, ms = [], []
    for no, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 't<TAB>multiplicity'", line=no)
        try:
            t = float(parts[0])
            m = int(parts[1])
        except ValueError:
            raise ParseError(f"bad number in {line!r}", line=no) from None
        if not (t > 0 and math.isfinite(t)):
            raise ValidationError(f"t={parts[0]} is not positive", line=no)
        if m < 1:
            raise ValidationError(f"multiplicity {m} is not positive", line=no)
        if ts and t == ts[-1]:
            ms[-1] += m
            continue
        if ts and t < ts[-1]:
            raise ValidationError(f"t={parts[0]} out of ascending order", line=no)
        ts.append(t)
        ms.append(m)
    return SpectralDataset(tuple(exceptional), tuple(ts), tuple(ms), source)


def format_spectral(ds):
    out = [f"{HEADER} {VERSION} {ds.source}".rstrip()]
    out += [f"{t!r}\t{m}" for t, m in zip(ds.t_values, ds.multiplicities)]
    return "\n".join(out) + "\n"


def load_spectral(source=None, exceptional=(1.0,)):
    """Load a dataset from a path, or the bundled SL(2, Z) list when None."""
    if source is None:
        text = resources.files("gel.data").joinpath(BUNDLED).read_text(encoding="ascii")
        ds = parse_spectral(text, exceptional)
        t1 = math.sqrt(LAMBDA1 - 0.25)
        if not ds.t_values or abs(ds.t_values[0] - t1) > 0.01:
            raise ValidationError(f"bundled t_1 is not within 0.01 of {t1:.5f}")
        return ds
    with open(source, encoding="ascii") as fh:
        return parse_spectral(fh.read(), exceptional)


def explicit_psi(dataset, x, T, allow_partial=False):
    """sum_exc x^s_j/s_j + sqrt(x) sum_{t_j <= T} 2 Re(x^{it_j}/(1/2 + it_j))."""
    if not x > 1:
        raise DomainError("x must exceed 1")
    if not 1 <= T <= math.sqrt(x) / math.log(x):
        raise RangeError(f"T={T:g} outside [1, sqrt(x)/log x = {math.sqrt(x) / math.log(x):.4g}]")
    if dataset.t_max < T and not allow_partial:
        raise CoverageError(f"spectral data ends at t={dataset.t_max:g} < T={T:g}")
    main = math.fsum(x ** e / e for e in dataset.exceptional)
    t = dataset.t_arr[dataset.t_arr <= T]
    m = dataset.m_arr[: t.size]
    if t.size == 0:
        return main
    lx = math.log(x)
    terms = 2.0 * m * (np.exp(1j * t * lx) / (0.5 + 1j * t)).real
    return main + math.sqrt(x) * math.fsum(terms.tolist())


@dataclass(frozen=True)
class ExpSum:
    value: complex
    envelope: float


def spectral_exp_sum(dataset, x, T):
    """sum_{t_j <= T} m_j x^{i t_j}, with the T^(5/4) x^(1/8) (log T)^2 envelope."""
    if T > dataset.t_max:
        raise CoverageError(f"spectral data ends at t={dataset.t_max:g} < T={T:g}")
    sel = dataset.t_arr <= T
    ph = dataset.t_arr[sel] * math.log(x)
    m = dataset.m_arr[sel]
    value = complex(math.fsum((m * np.cos(ph)).tolist()), math.fsum((m * np.sin(ph)).tolist()))
    env = T ** 1.25 * x ** 0.125 * math.log(T) ** 2 if T > 0 else 0.0
    return ExpSum(value, env)


def _check_strip(s, dataset_exc=(1.0,)):
    s = complex(s)
    if not 0.5 < s.real <= 1:
        raise DomainError("need 1/2 < Re s <= 1")
    if any(s == e for e in dataset_exc):
        raise DomainError(f"s={s} is an exceptional zero")
    return s


def weighted_psi(spectrum, s, x):
    """sum over N^k <= x of h * log N / N^(ks)."""
    s = _check_strip(s)
    if x > spectrum.x_max:
        raise CoverageError(f"x={x:g} exceeds spectrum coverage {spectrum.x_max:g}")
    re, im = [], []
    le = spectrum.log_eps
    w = 2.0 * spectrum.h * le
    k = 1
    while len(spectrum) and x ** (1.0 / k) >= spectrum.min_norm:
        n = int(np.searchsorted(spectrum.norms, x ** (1.0 / k), side="right"))
        v = w[:n] * np.exp(-2.0 * k * s * le[:n])
        re.extend(v.real.tolist())
        im.extend(v.imag.tolist())
        k += 1
    return complex(math.fsum(re), math.fsum(im))


def logderiv_estimate(spectrum, s, x):
    """-zeta'/zeta(s) ~ weighted_psi - x^-s psi(x) - s x^(1-s)/(1-s)."""
    s = _check_strip(s)
    wp = weighted_psi(spectrum, s, x)
    ps = counts.psi(spectrum, x)
    return wp - cmath.exp(-s * math.log(x)) * ps - s * cmath.exp((1 - s) * math.log(x)) / (1 - s)
