"""Spectrum classification of the shifts and grid export.

Bounded kinds: open disk ``|lambda| < |w|`` is point spectrum, the circle is
continuous spectrum, outside is the resolvent set. Unbounded kinds: every
``lambda`` is an eigenvalue. Residual spectrum is empty throughout.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .constructions import EigenPair, eigenvector, modulus_position
from .norms import norm
from .operators import ShiftSpec, apply
from .piecewise import indicator
from .report import Report
from .sampling import random_continuous, random_finite, rng_for

POINT, CONTINUOUS, RESIDUAL, RESOLVENT = "Point", "Continuous", "Residual", "Resolvent"
NAMES = {
    _kernels.POINT: POINT,
    _kernels.CONTINUOUS: CONTINUOUS,
    _kernels.RESIDUAL: RESIDUAL,
    _kernels.RESOLVENT: RESOLVENT,
}
CODES = {v: k for k, v in NAMES.items()}
LETTERS = {POINT: "P", CONTINUOUS: "C", RESIDUAL: "R", RESOLVENT: "ρ"}
REL_TOL = 1e-12


@dataclass(frozen=True)
class SpectrumClass:
    cls: str
    rule: str
    provenance: str
    evidence: EigenPair | None = None

    @property
    def code(self):
        return CODES[self.cls]

    @property
    def letter(self):
        return LETTERS[self.cls]

    def to_dict(self):
        d = {"class": self.cls, "rule": self.rule, "provenance": self.provenance}
        if self.evidence is not None:
            d["evidence"] = {
                "lambda": [self.evidence.lam.real, self.evidence.lam.imag],
                "relative_residual": self.evidence.relative_residual,
                "truncation_K": self.evidence.truncation_K,
            }
        return d


def classify(spec: ShiftSpec, lam, evidence=True) -> SpectrumClass:
    lam = complex(lam)
    if not spec.bounded:
        ev = eigenvector(spec, lam) if evidence else None
        return SpectrumClass(POINT, "unbounded: whole plane is point spectrum", "closed-form", ev)
    pos = modulus_position(lam, spec.w, REL_TOL)
    if pos < 0:
        ev = eigenvector(spec, lam) if evidence else None
        return SpectrumClass(POINT, "bounded: |lambda| < |w|", "closed-form", ev)
    if pos == 0:
        return SpectrumClass(CONTINUOUS, "bounded: |lambda| = |w|", "theorem-asserted")
    return SpectrumClass(RESOLVENT, "bounded: |lambda| > |w|", "theorem-asserted")


@dataclass(frozen=True)
class SpectrumGrid:
    re: np.ndarray
    im: np.ndarray
    codes: np.ndarray  # int8, shape (len(im), len(re)); row r <-> im[r]

    def counts(self):
        return {NAMES[c]: int((self.codes == c).sum()) for c in NAMES}

    def cells(self):
        """Row-major ``(re, im, class name)``."""
        for r, y in enumerate(self.im):
            for c, x in enumerate(self.re):
                yield float(x), float(y), NAMES[int(self.codes[r, c])]

    def to_csv(self):
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["re", "im", "class"])
        for x, y, name in self.cells():
            out.writerow([repr(x), repr(y), LETTERS[name]])
        return buf.getvalue()


def axis(lo, hi, resolution):
    if resolution < 2:
        raise ValueError("resolution must be >= 2 per axis")
    return np.linspace(float(lo), float(hi), int(resolution))


def spectrum_grid(spec: ShiftSpec, re_range, im_range, resolution) -> SpectrumGrid:
    """Classify a rectangular grid; ``resolution`` is an int or ``(n_re, n_im)``."""
    n_re, n_im = (resolution, resolution) if np.isscalar(resolution) else resolution
    re = axis(*re_range, n_re)
    im = axis(*im_range, n_im)
    if not spec.bounded:
        codes = np.full((im.size, re.size), _kernels.POINT, dtype=np.int8)
        return SpectrumGrid(re, im, codes)
    w_abs = abs(spec.w)
    codes = np.array(_kernels.classify_disk(re, im, w_abs, REL_TOL), dtype=np.int8)
    # cells whose float verdict sits next to a band edge are redone exactly
    mod2 = re[None, :] ** 2 + im[:, None] ** 2
    diff = np.abs(mod2 - w_abs * w_abs)
    band = REL_TOL * w_abs * (np.sqrt(mod2) + w_abs)
    close = (np.abs(diff - band) <= 1e-6 * band) | (diff <= 64 * np.finfo(float).eps * (mod2 + w_abs * w_abs))
    for r, c in zip(*np.nonzero(close)):
        codes[r, c] = classify(spec, complex(re[c], im[r]), evidence=False).code
    return SpectrumGrid(re, im, codes)


def gelfand_bound_check(spec: ShiftSpec, samples=500, seed=0) -> Report:
    """Sample unit-norm ``f`` and check ``||T f|| <= |w| (1 + 1e-10)``; the
    indicator of ``[a, a+1)`` is included as the attaining family."""
    if not spec.bounded:
        raise ValueError("gelfand_bound_check needs a bounded spec")
    rng = rng_for(seed)
    w_abs = abs(spec.w)
    a = spec.a
    best, family = 0.0, None
    if spec.space.is_c0:
        from .piecewise import hat

        probes = [("hat on [a, a+1]", hat(a, a + 1, space=spec.space))]
    else:
        probes = [("indicator [a, a+1)", indicator(a, a + 1, spec.space))]
    probes.append(("indicator [0, a)" if not spec.space.is_c0 else "hat on [0, a]",
                   indicator(0, a, spec.space) if not spec.space.is_c0 else hat(0, a, space=spec.space)))
    for i in range(samples):
        if spec.space.is_c0:
            f = random_continuous(rng, span=4, complex_values=True, space=spec.space)
        else:
            f = random_finite(rng, span=4, complex_values=True, space=spec.space)
        probes.append((f"random #{i}", f))
    for name, f in probes:
        n = norm(f, spec.space).value
        if n == 0:
            continue
        ratio = norm(apply(spec, f), spec.space).value / n
        if ratio > best:
            best, family = ratio, name
    return Report.make(
        "gelfand_bound",
        spec,
        {"samples": samples, "seed": seed, "attained_by": family},
        best,
        w_abs * (1 + 1e-10),
        0.0,
        "le",
        "closed-form",
        "operator-norm-equals-|w|",
    )
