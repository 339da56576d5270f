"""Command-line entry point: every experiment as a CSV table.

Output is UTF-8 CSV preceded by `#` metadata lines.  Exit status is 0 on
success, 2 for invalid input, 1 for internal errors; error messages go to
stderr prefixed with `error:`.
"""

import argparse
import csv
import io
import math
import re
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, baselines, counts, datastore, euler_lab, spectral
from .errors import GelError, ParseError

_NUM = r"[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?"
_COMPLEX = re.compile(rf"^([+-]?(?:{_NUM}))([+-])({_NUM})i$")
_REAL = re.compile(rf"^[+-]?(?:{_NUM})$")


def parse_complex(text):
    """Parse `a+bi` / `a-bi` (a plain real `a` is read as `a+0i`)."""
    text = text.strip()
    m = _COMPLEX.match(text)
    if m:
        im = float(m.group(3))
        return complex(float(m.group(1)), -im if m.group(2) == "-" else im)
    if _REAL.match(text):
        return complex(float(text), 0.0)
    raise ParseError(f"cannot parse complex value {text!r}; expected a+bi")


def parse_grid(text):
    """`start,factor,count` -> geometric list start*factor^i."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ParseError(f"grid {text!r} must be start,factor,count")
    try:
        start, factor, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"bad number in grid {text!r}") from None
    if count < 1:
        raise ParseError("grid count must be >= 1")
    if not (start > 0 and math.isfinite(start)):
        raise ParseError("grid start must be positive")
    if count > 1 and not factor > 1:
        raise ParseError("grid factor must exceed 1")
    return [start * factor ** i for i in range(count)]


def parse_x(text):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"bad number {text!r}") from None
    if not math.isfinite(v):
        raise ParseError(f"{text!r} is not finite")
    return v


def fmt(v):
    """Deterministic text for a cell."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        return f"{v.real!r}{'+' if v.imag >= 0 or math.isnan(v.imag) else '-'}{abs(v.imag)!r}i"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _arg(fn):
    """Wrap a parser so argparse shows its message verbatim."""
    def wrapped(text):
        try:
            return fn(text)
        except ParseError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    wrapped.__name__ = fn.__name__
    return wrapped


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _common(p, x=True, grid=True, s=False):
    if x:
        p.add_argument("--x-max", type=_arg(parse_x))
    if grid:
        p.add_argument("--grid", type=_arg(parse_grid))
    if s:
        p.add_argument("--s", action="append", type=_arg(parse_complex), default=None)
    p.add_argument("--cache-dir")
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1)


def build_parser():
    p = _Parser(prog="gel", description="Geodesic Euler products and prime-geodesic experiments.")
    p.add_argument("--version", action="version", version=f"gel {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    _common(sub.add_parser("spectrum", help="build (and cache) the norm spectrum"), grid=False)
    _common(sub.add_parser("counts", help="theta, psi, pi, Pi table"))
    _common(sub.add_parser("pgt", help="prime geodesic theorem error table and fitted exponent"))
    e = sub.add_parser("euler", help="renormalized partial Euler products")
    _common(e, s=True)
    e.add_argument("--renorm", default="ultimate", choices=euler_lab.TAGS)
    _common(sub.add_parser("mertens-geo", help="zeta_x(1)/(e^gamma log x)"))
    ex = sub.add_parser("explicit", help="explicit-formula residuals")
    _common(ex)
    ex.add_argument("--T", type=_arg(parse_x))
    ex.add_argument("--spectral-file")
    es = sub.add_parser("expsum", help="spectral exponential sums")
    _common(es, x=False)
    es.add_argument("--T", type=_arg(parse_x), required=True)
    es.add_argument("--spectral-file")
    b = sub.add_parser("baseline", help="rational-prime baselines")
    b.add_argument("which", choices=("mertens", "ramanujan", "drh"))
    _common(b, x=False, s=True)
    b.add_argument("--zeros-file")
    b.add_argument("--K", type=int, default=100)
    k = sub.add_parser("kloosterman", help="Kloosterman sweep with Weil verdict")
    _common(k, x=False, grid=False)
    k.add_argument("--c-max", type=int, default=2000)
    k.add_argument("--mn-max", type=int, default=10)
    sk = sub.add_parser("sk-zeta", help="Selberg-Kloosterman partial sums")
    _common(sk, x=False, s=True)
    sk.add_argument("--m", type=int, default=1)
    sk.add_argument("--n", type=int, default=1)
    sk.add_argument("--q", type=int, default=1)
    return p


# -- commands -------------------------------------------------------------------


def _need(value, flag):
    if value is None:
        raise ParseError(f"{flag} is required")
    return value


def _xs_and_max(a):
    xs = a.grid
    x_max = a.x_max
    if x_max is None and xs is None:
        raise ParseError("--x-max or --grid is required")
    if x_max is None:
        x_max = max(xs)
    if xs is None:
        xs = [x_max]
    if max(xs) > x_max:
        raise ParseError("grid extends beyond --x-max")
    return xs, x_max


def _spectrum(a, x_max):
    return datastore.get_spectrum(x_max, a.cache_dir, workers=max(1, a.threads))


def cmd_spectrum(a, meta):
    S = _spectrum(a, _need(a.x_max, "--x-max"))
    meta.append(f"entries={len(S)} sum_h={int(S.h.sum()) if len(S) else 0}")
    rows = [(e.d, e.t, e.u, e.h, e.log_eps, e.norm) for e in S.entries]
    return ("d", "t", "u", "h", "log_eps", "norm"), rows


def cmd_counts(a, meta):
    xs, x_max = _xs_and_max(a)
    S = _spectrum(a, x_max)
    rows = []
    for x in xs:
        c = counts.snapshot(S, x)
        rows.append((x, c.theta, c.psi, c.pi_prim, c.Pi_weighted, c.pgt_error))
    return ("x", "theta", "psi", "pi", "Pi", "error"), rows


def cmd_pgt(a, meta):
    xs, x_max = _xs_and_max(a)
    S = _spectrum(a, x_max)
    rows, errs = [], []
    for x in xs:
        p = counts.psi(S, x)
        errs.append(p - x)
        rows.append((x, p, p - x, abs(p - x) / x ** 0.75))
    if len(xs) >= 2:
        try:
            meta.append(f"fitted_exponent={counts.pgt_exponent(xs, errs)!r}")
        except GelError:
            meta.append("fitted_exponent=nan")
    meta.append(f"max_scaled_error={max(r[3] for r in rows)!r}")
    return ("x", "psi", "error", "error_over_x34"), rows


def cmd_euler(a, meta):
    xs, x_max = _xs_and_max(a)
    S = _spectrum(a, x_max)
    rows = []
    for s in _need(a.s, "--s"):
        tr = euler_lab.renormalized_trace(S, s, xs, a.renorm)
        if len(xs) >= 2:
            est = euler_lab.estimate_limit(tr, len(xs))
            meta.append(f"s={fmt(s)} limit={fmt(est.value)} sign={est.sign} dispersion={est.dispersion!r}")
        for x, lr, r in tr.checkpoints:
            rows.append((s, x, lr, r))
    return ("s", "x", "log_raw", "renorm"), rows


def cmd_mertens_geo(a, meta):
    xs, x_max = _xs_and_max(a)
    S = _spectrum(a, x_max)
    est = euler_lab.mertens_geodesic(S, xs)
    meta.append(f"mean={est.value.real!r} dispersion={est.dispersion!r}")
    return ("x", "ratio"), [(x, v.real) for x, v in zip(xs, est.samples)]


def _spectral(a, meta):
    ds = spectral.load_spectral(a.spectral_file)
    if a.spectral_file:
        with open(a.spectral_file, "rb") as fh:
            meta.append(f"spectral_hash={datastore.content_hash(fh.read())}")
    else:
        meta.append("spectral=bundled")
    return ds


def cmd_explicit(a, meta):
    xs, x_max = _xs_and_max(a)
    S = _spectrum(a, x_max)
    ds = _spectral(a, meta)
    rows = []
    for x in xs:
        T = a.T if a.T is not None else min(ds.t_max, math.sqrt(x) / math.log(x))
        p = counts.psi(S, x)
        e = spectral.explicit_psi(ds, x, T)
        rows.append((x, T, p, e, p - e, p - x))
    return ("x", "T", "psi", "explicit", "residual", "naive_residual"), rows


def cmd_expsum(a, meta):
    xs = _need(a.grid, "--grid")
    ds = _spectral(a, meta)
    rows = []
    for x in xs:
        r = spectral.spectral_exp_sum(ds, x, a.T)
        rows.append((x, a.T, r.value, abs(r.value), r.envelope))
    return ("x", "T", "sum", "abs", "envelope"), rows


def cmd_baseline(a, meta):
    xs = _need(a.grid, "--grid")
    if a.which == "mertens":
        return ("x", "ratio"), [(x, baselines.mertens_ratio(x)) for x in xs]
    if a.which == "drh":
        rows = [(x, baselines.drh_dirichlet_ratio(x)) for x in xs]
        meta.append(f"mean_ratio={baselines.drh_log_averaged(xs)!r}")
        return ("x", "ratio"), rows
    zeros = baselines.load_zeros(a.zeros_file)
    if a.zeros_file:
        with open(a.zeros_file, "rb") as fh:
            meta.append(f"zeros_hash={datastore.content_hash(fh.read())}")
    rows = []
    for s in _need(a.s, "--s"):
        if s.imag != 0:
            raise ParseError("ramanujan baseline needs real s")
        for x in xs:
            lhs = baselines.euler_product_real(s.real, x)
            r0 = baselines.ramanujan_rhs(s.real, x, zeros, 0)
            rk = baselines.ramanujan_rhs(s.real, x, zeros, a.K)
            rows.append((s.real, x, lhs, r0, rk, abs(lhs / r0 - 1), abs(lhs / rk - 1)))
    return ("s", "x", "lhs", "rhs_K0", f"rhs_K{a.K}", "err_K0", f"err_K{a.K}"), rows


def cmd_kloosterman(a, meta):
    rows = []
    for chi in (baselines.trivial_character(), baselines.chi4()):
        r = baselines.kloosterman_sweep(a.c_max, a.mn_max, chi, workers=max(1, a.threads))
        rows.append((chi.name, a.c_max, a.mn_max, r.checked, len(r.violations), r.worst_ratio,
                     not r.violations))
    return ("chi", "c_max", "mn_max", "checked", "violations", "worst_ratio", "weil_ok"), rows


def cmd_sk_zeta(a, meta):
    Cs = _need(a.grid, "--grid")
    rows = []
    for s in _need(a.s, "--s"):
        for C in Cs:
            v = baselines.selberg_kloosterman_partial(a.m, a.n, s, a.q, None, int(C))
            rows.append((s, int(C), v))
    return ("s", "C", "value"), rows


COMMANDS = {
    "spectrum": cmd_spectrum, "counts": cmd_counts, "pgt": cmd_pgt, "euler": cmd_euler,
    "mertens-geo": cmd_mertens_geo, "explicit": cmd_explicit, "expsum": cmd_expsum,
    "baseline": cmd_baseline, "kloosterman": cmd_kloosterman, "sk-zeta": cmd_sk_zeta,
}


def render(argv, meta, header, rows):
    buf = io.StringIO()
    buf.write(f"# gel {__version__} numpy {np.__version__}\n")
    buf.write(f"# command: {' '.join(argv)}\n")
    buf.write(f"# generated: {datetime.now(timezone.utc).strftime('%Y-%m-%dT%H:%M:%SZ')}\n")
    for m in meta:
        buf.write(f"# {m}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        a = build_parser().parse_args(argv)
        if a.threads < 1:
            raise ParseError("--threads must be >= 1")
        meta = []
        header, rows = COMMANDS[a.command](a, meta)
        text = render(argv, meta, header, rows)
        if a.out:
            datastore.atomic_write(a.out, text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except (GelError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        print(f"error: internal: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
