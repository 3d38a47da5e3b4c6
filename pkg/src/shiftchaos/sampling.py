"""Seeded random draws of test functions, spectral parameters and specs."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .piecewise import GeometricTail, PiecewiseFn, Segment


def rng_for(seed):
    return np.random.default_rng(seed)


def _coef(rng, complex_values):
    re = rng.normal()
    return complex(re, rng.normal()) if complex_values else complex(re)


def _cuts(rng, lo, hi, q, pieces):
    """Sorted distinct grid points ``lo = c0 < ... < ck = hi`` on the 1/q grid."""
    lo_i, hi_i = int(lo * q), int(hi * q)
    inner = hi_i - lo_i - 1
    k = min(pieces - 1, inner)
    picks = sorted(rng.choice(np.arange(lo_i + 1, hi_i), size=k, replace=False)) if k > 0 else []
    return [Fraction(v, q) for v in [lo_i, *picks, hi_i]]


def random_finite(rng, span=4, q=4, max_pieces=4, max_degree=2, complex_values=False,
                  rates=True, stacked=True, space=None):
    """Eventually-zero function on ``[0, span)``; may have gaps and one stacked piece."""
    pieces = int(rng.integers(1, max_pieces + 1))
    cuts = _cuts(rng, Fraction(0), Fraction(span), q, pieces)
    segs = []
    for lo, hi in zip(cuts, cuts[1:]):
        if len(cuts) > 2 and rng.random() < 0.15:
            continue
        deg = int(rng.integers(0, max_degree + 1))
        poly = tuple(_coef(rng, complex_values) for _ in range(deg + 1))
        gamma = complex(rng.uniform(-1.5, 1.0), rng.uniform(-2, 2) if complex_values else 0.0) if rates and rng.random() < 0.5 else 0j
        segs.append(Segment(lo, hi, c=1.0, gamma=gamma, poly=poly))
    if not segs:
        segs.append(Segment(cuts[0], cuts[1], c=_coef(rng, complex_values)))
    if stacked and rng.random() < 0.2:
        lo, hi = sorted(rng.choice(np.arange(0, span * q + 1), size=2, replace=False))
        segs.append(Segment(Fraction(int(lo), q), Fraction(int(hi), q), c=_coef(rng, complex_values),
                            gamma=rng.uniform(-1, 1)))
    return PiecewiseFn(tuple(segs), None, space)


def random_continuous(rng, span=4, q=4, max_knots=5, zero_at_start=False, complex_values=False,
                      space="C0"):
    """Continuous eventually-zero function: knots on the grid, linear pieces plus
    optional ``b*tau*(h - tau)`` bumps; value 0 at ``span``."""
    cuts = _cuts(rng, Fraction(0), Fraction(span), q, int(rng.integers(1, max_knots + 1)))
    vals = [_coef(rng, complex_values) for _ in cuts]
    vals[-1] = 0j
    if zero_at_start:
        vals[0] = 0j
    segs = []
    for (lo, hi), (v0, v1) in zip(zip(cuts, cuts[1:]), zip(vals, vals[1:])):
        h = float(hi - lo)
        slope = (v1 - v0) / h
        bump = _coef(rng, complex_values) if rng.random() < 0.4 else 0j
        poly = (v0, slope + bump * h, -bump)
        segs.append(Segment(lo, hi, poly=poly))
    return PiecewiseFn(tuple(segs), None, space)


def random_kernel(rng, spec, N=1, zero_at_start=False, complex_values=False):
    """Random element of ``ker T**N`` (support in ``[0, N a)``)."""
    span = N * spec.a
    q = 4 * N
    if spec.space.is_c0:
        f = random_continuous(rng, span=1, q=q, zero_at_start=zero_at_start,
                              complex_values=complex_values, space=spec.space)
    else:
        f = random_finite(rng, span=1, q=q, complex_values=complex_values, stacked=False,
                          space=spec.space)
    return _rescale(f, span, spec.space)


def _rescale(f, span, space):
    """Stretch a function on ``[0, 1)`` to ``[0, span)``."""
    s = float(span)
    segs = []
    for g in f.segments:
        poly = tuple(c / s**i for i, c in enumerate(g.poly))
        segs.append(Segment(g.start * span, g.end * span, c=g.c, gamma=g.gamma / s, poly=poly))
    return PiecewiseFn(tuple(segs), None, space)


def random_tail_fn(rng, span_q=4, space=None):
    """Function with an infinite geometric tail of one of three laws:
    pure geometric, geometric with a weight on each block, or Gaussian-decaying."""
    base = random_finite(rng, span=1, q=span_q, max_pieces=2, stacked=False)
    kind = int(rng.integers(0, 3))
    if kind == 0:
        ratio = cmath.rect(rng.uniform(0.05, 0.8), rng.uniform(-math.pi, math.pi))
        tail = GeometricTail(base.segments, 1, ratio)
    elif kind == 1:
        w = float(rng.choice([1.5, 2.0, 3.0]))
        tail = GeometricTail(base.segments, 1, 1.0, w, 0, -int(rng.integers(1, 3)))
    else:
        w = float(rng.choice([1.5, 2.0, 3.0]))
        n = int(rng.integers(1, 3))
        ratio = complex(rng.uniform(-3, 3))
        tail = GeometricTail(base.segments, n, ratio, w, -n, Fraction(n * (n + 1), 2))
    head = random_finite(rng, span=1, q=span_q, max_pieces=2, stacked=False) if rng.random() < 0.5 else None
    segs = () if head is None else head.segments
    if segs:
        tail = tail.moved(Fraction(1))
    return PiecewiseFn(segs, tail, space)


def random_lambda(rng, spec):
    """Point-spectrum draw: inside the open disk ``|lambda| < |w|`` for bounded
    kinds, the disk of radius 10 (boundary included) for unbounded ones."""
    if spec.bounded:
        r = abs(spec.w) * math.sqrt(rng.uniform(0, 1)) * 0.999
    else:
        r = 10.0 * math.sqrt(rng.uniform(0, 1))
    return cmath.rect(r, rng.uniform(-math.pi, math.pi))


def random_w(rng, kind):
    if kind == "bounded":
        return cmath.rect(rng.uniform(1.1, 3.0), rng.uniform(-math.pi, math.pi))
    return float(rng.uniform(1.1, 3.0))
