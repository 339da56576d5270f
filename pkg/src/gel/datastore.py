"""Text persistence for spectra and datasets, plus a small on-disk cache.

Only exact integers are written for spectra; norms and logarithms are
recomputed on load.  Writes go to a temporary file that is renamed into
place, so readers never observe a partial file.
"""

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import baselines, spectral
from .errors import ParseError, ValidationError, VersionError
from .quadratic import (
    BY_DISCRIMINANT, DiscriminantRecord, NormSpectrum, build_spectrum, class_number,
    _trace_ok, is_discriminant, pell_fundamental,
)

SPECTRUM_HEADER = "gel-spectrum"
SPECTRUM_VERSION = "v1"
CACHE_ENV = "GEL_CACHE_DIR"
MANIFEST = "manifest.json"


def content_hash(data):
    """64-bit blake2b digest as 16 hex digits."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.blake2b(data, digest_size=8).hexdigest()


def atomic_write(path, text, encoding="ascii"):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding=encoding, newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# -- spectra ---------------------------------------------------------------------


def format_spectrum(spectrum):
    lines = [f"{SPECTRUM_HEADER} {SPECTRUM_VERSION} x_max={spectrum.x_max!r}"]
    lines += [f"{e.d}\t{e.t}\t{e.u}\t{e.h}" for e in spectrum.entries]
    return "\n".join(lines) + "\n"


def parse_spectrum(text, check_class_numbers=False):
    """Parse and validate a spectrum file; never trusts its contents."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty spectrum file", line=1)
    head = lines[0].split()
    if len(head) != 3 or head[0] != SPECTRUM_HEADER or not head[2].startswith("x_max="):
        raise ParseError(f"expected header '{SPECTRUM_HEADER} {SPECTRUM_VERSION} x_max=<decimal>'", line=1)
    if head[1] != SPECTRUM_VERSION:
        raise VersionError(f"unsupported spectrum format version {head[1]!r}")
    try:
        x_max = float(head[2][len("x_max="):])
    except ValueError:
        raise ParseError("bad x_max value", line=1) from None
    if not math.isfinite(x_max):
        raise ParseError("x_max must be finite", line=1)
    frac = Fraction(x_max)
    p, q = frac.numerator, frac.denominator
    recs, seen, prev = [], set(), None
    for no, raw in enumerate(lines[1:], 2):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 4:
            raise ParseError("expected 'd<TAB>t<TAB>u<TAB>h'", line=no)
        try:
            d, t, u, h = (int(v) for v in parts)
        except ValueError:
            raise ParseError(f"non-integer field in {raw!r}", line=no) from None
        if not is_discriminant(d) or d < 5:
            raise ValidationError(f"d={d} is not a non-square discriminant", line=no)
        if h < 1:
            raise ValidationError(f"class number h={h} must be >= 1", line=no)
        if t < 3 or u < 1 or t * t - d * u * u != 4:
            raise ValidationError(f"(t, u)=({t}, {u}) does not solve t^2 - {d} u^2 = 4", line=no)
        if pell_fundamental(d, u) != (t, u):
            raise ValidationError(f"(t, u)=({t}, {u}) is not the fundamental solution for d={d}", line=no)
        if not _trace_ok(t, p, q):
            raise ValidationError(f"norm of d={d} exceeds x_max", line=no)
        if d in seen:
            raise ValidationError(f"duplicate discriminant d={d}", line=no)
        if prev is not None and (t, d) <= prev:
            raise ValidationError("records not sorted by (norm, d)", line=no)
        if check_class_numbers and class_number(d) != h:
            raise ValidationError(f"h={h} differs from the class number of d={d}", line=no)
        seen.add(d)
        prev = (t, d)
        recs.append(DiscriminantRecord(d, t, u, h))
    return NormSpectrum(tuple(recs), x_max, BY_DISCRIMINANT)


def save_spectrum(spectrum, path):
    atomic_write(path, format_spectrum(spectrum))


def load_spectrum(path, check_class_numbers=False):
    with open(path, encoding="ascii") as fh:
        return parse_spectrum(fh.read(), check_class_numbers)


def save_spectral(dataset, path):
    atomic_write(path, spectral.format_spectral(dataset))


def save_zeros(zeros, path):
    atomic_write(path, baselines.format_zeros(zeros))


def load_zeros(path):
    return baselines.load_zeros(path)


def load_spectral(path):
    return spectral.load_spectral(path)


# -- cache -------------------------------------------------------------------------


@dataclass(frozen=True)
class CacheEntry:
    kind: str
    key: str
    content_hash: str
    path: Path


def resolve_cache_dir(cache_dir=None):
    d = cache_dir or os.environ.get(CACHE_ENV)
    return Path(d) if d else None


class Cache:
    """Directory of text payloads indexed by a manifest of content hashes."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _manifest(self):
        try:
            with open(self.root / MANIFEST, encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError:
            return {}
        except ValueError:
            return {}

    def entry(self, kind, key):
        rec = self._manifest().get(f"{kind}:{key}")
        if rec is None:
            return None
        return CacheEntry(kind, key, rec["hash"], self.root / rec["file"])

    def get_text(self, kind, key):
        e = self.entry(kind, key)
        if e is None or not e.path.exists():
            return None
        text = e.path.read_text(encoding="ascii")
        if content_hash(text) != e.content_hash:
            return None
        return text

    def put_text(self, kind, key, text):
        name = f"{kind}-{content_hash(key)}.txt"
        atomic_write(self.root / name, text)
        man = self._manifest()
        man[f"{kind}:{key}"] = {"file": name, "hash": content_hash(text)}
        atomic_write(self.root / MANIFEST, json.dumps(man, indent=1, sort_keys=True) + "\n")
        return CacheEntry(kind, key, man[f"{kind}:{key}"]["hash"], self.root / name)


def get_spectrum(x_max, cache_dir=None, workers=1):
    """Build a spectrum, or load it from the cache when one is configured."""
    root = resolve_cache_dir(cache_dir)
    if root is None:
        return build_spectrum(x_max, workers=workers)
    cache = Cache(root)
    key = repr(float(x_max))
    text = cache.get_text("spectrum", key)
    if text is not None:
        try:
            return parse_spectrum(text)
        except (ParseError, VersionError):
            pass
    spec = build_spectrum(x_max, workers=workers)
    cache.put_text("spectrum", key, format_spectrum(spec))
    return spec
