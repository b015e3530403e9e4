"""Shared builders for the test modules."""
import numpy as np

from qmfloops import Sequence

LATTICES = {
    "2Z": [[2]],
    "3Z": [[3]],
    "quincunx": [[1, 1], [1, -1]],
    "2Zx2Z": [[2, 0], [0, 2]],
    "hex3": [[2, 1], [-1, 1]],
}


def as_dicts(fb):
    return [dict(f.taps) for f in fb.filters]


def perturb(fb, rng, size=1e-3):
    """Nudge one tap of one filter; the result is no longer a QMF bank."""
    k = int(rng.integers(fb.size))
    f = fb.filters[k]
    key = list(f.taps)[int(rng.integers(len(f)))]
    taps = dict(f.taps)
    taps[key] = taps[key] * (1 + size)
    filters = list(fb.filters)
    filters[k] = Sequence(taps, dim=fb.dim)
    return fb.with_filters(filters)


def random_signal(rng, dim, length=16, complex_=True, lo=-8):
    n = length if dim == 1 else max(2, int(round(length ** (1 / dim))))
    pts = np.stack(np.meshgrid(*[np.arange(lo, lo + n)] * dim, indexing="ij"), -1).reshape(-1, dim)
    vals = rng.standard_normal(len(pts))
    if complex_:
        vals = vals + 1j * rng.standard_normal(len(pts))
    return Sequence.from_arrays(pts, vals, dim)
