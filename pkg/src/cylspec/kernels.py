"""Hot inner loops.

Each kernel exists twice: a scalar-loop version written for numba (``*_loops``)
and a vectorized numpy version (``*_np``). The public names at the bottom of
the module dispatch to one or the other according to :mod:`cylspec._accel`.
Both versions operate in place and return an integer status so that they
share a calling convention.

Band storage follows LAPACK ``gbtrf``: ``A[r, c]`` lives at
``ab[kl + ku + r - c, c]`` and ``ab`` has ``2*kl + ku + 1`` rows, the first
``kl`` of which absorb fill-in from row interchanges.
"""
import math

import numpy as np
from numpy.lib.stride_tricks import as_strided

from . import _accel

EPS = np.finfo(np.float64).eps


# ---------------------------------------------------------------------------
# Symmetric tridiagonal QL with implicit shifts
# ---------------------------------------------------------------------------

def tql_loops(d, e, z, max_iter):
    """Diagonalize the symmetric tridiagonal (d, e) in place.

    ``e[i]`` couples rows i and i+1; ``e[n-1]`` is scratch. ``z`` accumulates
    the rotations (pass the identity to obtain eigenvectors). Returns 0 on
    success, otherwise 1 + the index whose eigenvalue failed to converge.
    """
    n = d.shape[0]
    nz = z.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l + 1
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(nz):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tql_np(d, e, z, max_iter):
    # Same recurrence as tql_loops; only the rotation of z is vectorized.
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l + 1
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                zi1 = z[:, i + 1]
                z[:, i] = c * zi - s * zi1
                z[:, i + 1] = s * zi + c * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


# ---------------------------------------------------------------------------
# Cyclic Jacobi for dense symmetric matrices
# ---------------------------------------------------------------------------

def jacobi_loops(a, v, max_sweeps, tol):
    """Cyclic Jacobi on the symmetric ``a`` (overwritten, ends diagonal).

    ``v`` accumulates rotations. Returns the number of sweeps used, or -1 if
    the off-diagonal mass did not drop below ``tol * ||a||_F``.
    """
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += a[i, j] * a[i, j]
    scale = math.sqrt(total)
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        if math.sqrt(2.0 * off) <= tol * scale:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


def jacobi_np(a, v, max_sweeps, tol):
    n = a.shape[0]
    scale = np.sqrt(np.sum(a * a))
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(a[iu] ** 2))
        if off <= tol * scale:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return -1


# ---------------------------------------------------------------------------
# Banded LU with partial pivoting
# ---------------------------------------------------------------------------

def gbtrf_loops(ab, kl, ku, ipiv):
    """Factor the band matrix in ``ab`` in place. Returns 0 or 1 + first zero pivot."""
    n = ab.shape[1]
    kv = kl + ku
    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        p = 0
        amax = abs(ab[kv, j])
        for i in range(1, km + 1):
            val = abs(ab[kv + i, j])
            if val > amax:
                amax = val
                p = i
        ipiv[j] = j + p
        if amax == 0.0:
            return j + 1
        ju = max(ju, min(j + ku + p, n - 1))
        if p != 0:
            for cc in range(j, ju + 1):
                t = ab[kv + j - cc, cc]
                ab[kv + j - cc, cc] = ab[kv + j + p - cc, cc]
                ab[kv + j + p - cc, cc] = t
        piv = ab[kv, j]
        for i in range(1, km + 1):
            ab[kv + i, j] = ab[kv + i, j] / piv
        for cc in range(j + 1, ju + 1):
            ujc = ab[kv + j - cc, cc]
            if ujc != 0.0:
                for i in range(1, km + 1):
                    ab[kv + j + i - cc, cc] -= ab[kv + i, j] * ujc
    return 0


def gbtrs_loops(ab, kl, ku, ipiv, b):
    """Solve A x = b in place with factors from gbtrf."""
    n = ab.shape[1]
    kv = kl + ku
    for j in range(n - 1):
        km = min(kl, n - 1 - j)
        p = ipiv[j]
        if p != j:
            t = b[j]
            b[j] = b[p]
            b[p] = t
        bj = b[j]
        if bj != 0.0:
            for i in range(1, km + 1):
                b[j + i] -= ab[kv + i, j] * bj
    for j in range(n - 1, -1, -1):
        b[j] = b[j] / ab[kv, j]
        bj = b[j]
        if bj != 0.0:
            lo = max(0, j - kv)
            for r in range(lo, j):
                b[r] -= ab[kv + r - j, j] * bj
    return 0


def gbtrs_h_loops(ab, kl, ku, ipiv, b):
    """Solve A^H x = b in place with factors from gbtrf."""
    n = ab.shape[1]
    kv = kl + ku
    for j in range(n):
        lo = max(0, j - kv)
        s = b[j]
        for r in range(lo, j):
            s -= np.conj(ab[kv + r - j, j]) * b[r]
        b[j] = s / np.conj(ab[kv, j])
    for j in range(n - 2, -1, -1):
        km = min(kl, n - 1 - j)
        s = b[j]
        for i in range(1, km + 1):
            s -= np.conj(ab[kv + i, j]) * b[j + i]
        b[j] = s
        p = ipiv[j]
        if p != j:
            t = b[j]
            b[j] = b[p]
            b[p] = t
    return 0


def _flat(ab):
    # ab is Fortran-ordered, so element (row, col) sits at col * ldab + row.
    return ab.reshape(-1, order="F")


def gbtrf_np(ab, kl, ku, ipiv):
    if not ab.flags.f_contiguous:
        raise ValueError("band storage must be Fortran-ordered")
    ldab, n = ab.shape
    kv = kl + ku
    flat = _flat(ab)
    step = flat.strides[0]
    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        col = ab[kv:kv + km + 1, j]
        p = int(np.argmax(np.abs(col)))
        ipiv[j] = j + p
        if col[p] == 0:
            return j + 1
        ju = max(ju, min(j + ku + p, n - 1))
        w = ju - j + 1
        # row j over columns j..ju is a stride-(ldab-1) diagonal of the storage
        base = j * (ldab - 1) + kv + j
        if p != 0:
            row_j = as_strided(flat[base:], shape=(w,), strides=((ldab - 1) * step,))
            row_p = as_strided(flat[base + p:], shape=(w,), strides=((ldab - 1) * step,))
            tmp = row_j.copy()
            row_j[:] = row_p
            row_p[:] = tmp
        if km == 0:
            continue
        ab[kv + 1:kv + km + 1, j] /= ab[kv, j]
        if w > 1:
            u = as_strided(flat[base + ldab - 1:], shape=(w - 1,),
                           strides=((ldab - 1) * step,))
            block = as_strided(flat[base + ldab:], shape=(km, w - 1),
                               strides=(step, (ldab - 1) * step))
            block -= np.outer(ab[kv + 1:kv + km + 1, j], u)
    return 0


def gbtrs_np(ab, kl, ku, ipiv, b):
    n = ab.shape[1]
    kv = kl + ku
    for j in range(n - 1):
        km = min(kl, n - 1 - j)
        p = ipiv[j]
        if p != j:
            b[j], b[p] = b[p], b[j]
        if km:
            b[j + 1:j + km + 1] -= ab[kv + 1:kv + km + 1, j] * b[j]
    for j in range(n - 1, -1, -1):
        b[j] = b[j] / ab[kv, j]
        lo = max(0, j - kv)
        if lo < j:
            b[lo:j] -= ab[kv + lo - j:kv, j] * b[j]
    return 0


def gbtrs_h_np(ab, kl, ku, ipiv, b):
    n = ab.shape[1]
    kv = kl + ku
    for j in range(n):
        lo = max(0, j - kv)
        s = b[j]
        if lo < j:
            s = s - np.dot(np.conj(ab[kv + lo - j:kv, j]), b[lo:j])
        b[j] = s / np.conj(ab[kv, j])
    for j in range(n - 2, -1, -1):
        km = min(kl, n - 1 - j)
        if km:
            b[j] = b[j] - np.dot(np.conj(ab[kv + 1:kv + km + 1, j]), b[j + 1:j + km + 1])
        p = ipiv[j]
        if p != j:
            b[j], b[p] = b[p], b[j]
    return 0


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

tql_jit = _accel.njit(tql_loops)
jacobi_jit = _accel.njit(jacobi_loops)
gbtrf_jit = _accel.njit(gbtrf_loops)
gbtrs_jit = _accel.njit(gbtrs_loops)
gbtrs_h_jit = _accel.njit(gbtrs_h_loops)

if _accel.USE_NUMBA:
    tql = tql_jit
    jacobi = jacobi_jit
    gbtrf = gbtrf_jit
    gbtrs = gbtrs_jit
    gbtrs_h = gbtrs_h_jit
else:
    tql = tql_np
    jacobi = jacobi_np
    gbtrf = gbtrf_np
    gbtrs = gbtrs_np
    gbtrs_h = gbtrs_h_np
