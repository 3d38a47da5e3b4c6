"""Hot numeric loops.

Every kernel exists twice: a numba ``@njit`` version and a numpy version with
identical signature. The module-level names (``eval_segments``,
``panel_abs_p``, ``classify_disk``) point at one or the other depending on
``SHIFTCHAOS_DISABLE_NUMBA``; both variants stay importable under the
``*_numba`` / ``*_numpy`` names so the benchmark and tests can compare them.

Segments are passed as a struct of arrays:

    s0, s1 : float64[n]      support [s0, s1) of each piece
    k0     : complex128[n]   constant factor
    k1     : complex128[n]   linear log-rate in the local variable tau = t - s0
    k2     : float64[n]      quadratic log-rate (real)
    poly   : complex128[n, D+1]  ascending coefficients in tau

so the value of piece j at t is ``k0 * exp(k1*tau + k2*tau**2) * poly_j(tau)``.
"""
import numpy as np

from ._config import USE_NUMBA, numba_default, numba_parallel, thread_cap

POINT, CONTINUOUS, RESIDUAL, RESOLVENT = 0, 1, 2, 3


# ---------------------------------------------------------------- numpy path


def eval_segments_numpy(t, s0, s1, k0, k1, k2, poly):
    t = np.asarray(t, dtype=np.float64)
    flat = t.ravel()
    order = np.argsort(flat, kind="stable")
    ts = flat[order]
    lo = np.searchsorted(ts, s0, "left")
    hi = np.searchsorted(ts, s1, "left")
    out = np.zeros(flat.shape, dtype=np.complex128)
    deg = poly.shape[1]
    for j in range(s0.shape[0]):
        if hi[j] <= lo[j]:
            continue
        idx = order[lo[j] : hi[j]]
        tau = ts[lo[j] : hi[j]] - s0[j]
        acc = np.full(tau.shape, poly[j, deg - 1], dtype=np.complex128)
        for i in range(deg - 2, -1, -1):
            acc = acc * tau + poly[j, i]
        out[idx] += k0[j] * np.exp(k1[j] * tau + k2[j] * tau * tau) * acc
    return out.reshape(t.shape)


def panel_abs_p_numpy(lo, hi, nodes, weights, s0, s1, k0, k1, k2, poly, p):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[:, None] + half[:, None] * nodes[None, :]
    v = eval_segments_numpy(t.ravel(), s0, s1, k0, k1, k2, poly).reshape(t.shape)
    return half * (np.abs(v) ** p @ weights)


def classify_disk_numpy(re, im, w_abs, rel_tol):
    r = np.asarray(re, dtype=np.float64)[None, :]
    i = np.asarray(im, dtype=np.float64)[:, None]
    w2 = w_abs * w_abs
    mod2 = r * r + i * i
    diff = mod2 - w2
    band = rel_tol * w_abs * (np.sqrt(mod2) + w_abs)
    codes = np.full(diff.shape, RESOLVENT, dtype=np.int8)
    codes[diff < 0] = POINT
    codes[np.abs(diff) <= band] = CONTINUOUS
    return codes


# ---------------------------------------------------------------- numba path

if USE_NUMBA:
    import numba
    from numba import njit, prange

    @njit(**numba_default)
    def _eval_point(t, s0, s1, k0, k1, k2, poly):
        acc_total = 0.0 + 0.0j
        deg = poly.shape[1]
        for j in range(s0.shape[0]):
            if t < s0[j] or t >= s1[j]:
                continue
            tau = t - s0[j]
            acc = poly[j, deg - 1]
            for i in range(deg - 2, -1, -1):
                acc = acc * tau + poly[j, i]
            acc_total += k0[j] * np.exp(k1[j] * tau + k2[j] * tau * tau) * acc
        return acc_total

    @njit(**numba_default)
    def eval_segments_numba(t, s0, s1, k0, k1, k2, poly):
        # sort once, then each piece touches only the points it covers
        order = np.argsort(t, kind="mergesort")
        ts = t[order]
        out = np.zeros(t.shape[0], dtype=np.complex128)
        deg = poly.shape[1]
        for j in range(s0.shape[0]):
            lo = np.searchsorted(ts, s0[j], "left")
            hi = np.searchsorted(ts, s1[j], "left")
            for n in range(lo, hi):
                tau = ts[n] - s0[j]
                acc = poly[j, deg - 1]
                for i in range(deg - 2, -1, -1):
                    acc = acc * tau + poly[j, i]
                out[order[n]] += k0[j] * np.exp(k1[j] * tau + k2[j] * tau * tau) * acc
        return out

    @njit(**numba_default)
    def panel_abs_p_numba(lo, hi, nodes, weights, s0, s1, k0, k1, k2, poly, p):
        out = np.empty(lo.shape[0], dtype=np.float64)
        for m in range(lo.shape[0]):
            half = 0.5 * (hi[m] - lo[m])
            mid = 0.5 * (hi[m] + lo[m])
            acc = 0.0
            for q in range(nodes.shape[0]):
                v = _eval_point(mid + half * nodes[q], s0, s1, k0, k1, k2, poly)
                acc += weights[q] * np.abs(v) ** p
            out[m] = half * acc
        return out

    @njit(**numba_parallel)
    def classify_disk_numba(re, im, w_abs, rel_tol):
        codes = np.empty((im.shape[0], re.shape[0]), dtype=np.int8)
        w2 = w_abs * w_abs
        for r in prange(im.shape[0]):
            for c in range(re.shape[0]):
                mod2 = re[c] * re[c] + im[r] * im[r]
                diff = mod2 - w2
                if abs(diff) <= rel_tol * w_abs * (np.sqrt(mod2) + w_abs):
                    codes[r, c] = CONTINUOUS
                elif diff < 0:
                    codes[r, c] = POINT
                else:
                    codes[r, c] = RESOLVENT
        return codes

    def _eval_dispatch(t, s0, s1, k0, k1, k2, poly):
        t = np.ascontiguousarray(np.asarray(t, dtype=np.float64))
        shape = t.shape
        return eval_segments_numba(t.ravel(), s0, s1, k0, k1, k2, poly).reshape(shape)

    def _cap_threads():
        cap = thread_cap()
        if cap is not None:
            numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))

    def _panel_dispatch(lo, hi, nodes, weights, s0, s1, k0, k1, k2, poly, p):
        return panel_abs_p_numba(lo, hi, nodes, weights, s0, s1, k0, k1, k2, poly, float(p))

    def _classify_dispatch(re, im, w_abs, rel_tol):
        _cap_threads()
        return classify_disk_numba(
            np.ascontiguousarray(re, dtype=np.float64),
            np.ascontiguousarray(im, dtype=np.float64),
            float(w_abs),
            float(rel_tol),
        )

    eval_segments = _eval_dispatch
    panel_abs_p = _panel_dispatch
    classify_disk = _classify_dispatch
else:
    eval_segments_numba = panel_abs_p_numba = classify_disk_numba = None
    eval_segments = eval_segments_numpy
    panel_abs_p = panel_abs_p_numpy
    classify_disk = classify_disk_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
