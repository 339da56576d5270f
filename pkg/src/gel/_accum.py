"""Compensated (Neumaier) running sums."""

import numpy as np


def neumaier_prefix(values):
    """Array p of length n+1 with p[i] the compensated sum of values[:i]."""
    vals = np.asarray(values)
    if np.iscomplexobj(vals):
        return neumaier_prefix(vals.real) + 1j * neumaier_prefix(vals.imag)
    out = np.zeros(vals.size + 1)
    s = c = 0.0
    for i, v in enumerate(vals.tolist(), 1):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


def neumaier_sum(values):
    vals = np.asarray(values)
    if vals.size == 0:
        return 0.0 if not np.iscomplexobj(vals) else 0j
    return neumaier_prefix(vals)[-1]
