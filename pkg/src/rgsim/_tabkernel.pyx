# cython: boundscheck=False, wraparound=False, cdivision=True
"""Bit-packed stabilizer-tableau kernels, compiled implementation.

Mirrors `_tabkernel_py` exactly; selected at import when available.
"""

import numpy as np

cdef extern from *:
    """
    static inline int popcount64(unsigned long long v) {
    #if defined(_MSC_VER)
        return (int)__popcnt64(v);
    #else
        return __builtin_popcountll(v);
    #endif
    }
    """
    int popcount64(unsigned long long v) nogil

BACKEND_NAME = "cython"

ctypedef unsigned long long u64
ctypedef unsigned char u8


def alloc(int n):
    """Arrays for an n-qubit tableau in the all-zeros state."""
    words = (n + 63) >> 6
    x = np.zeros((2 * n + 1, words), dtype=np.uint64)
    z = np.zeros((2 * n + 1, words), dtype=np.uint64)
    r = np.zeros(2 * n + 1, dtype=np.uint8)
    for q in range(n):
        x[q, q >> 6] |= 1 << (q & 63)
        z[n + q, q >> 6] |= 1 << (q & 63)
    return x, z, r


def apply_h(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t q):
    cdef Py_ssize_t w = q >> 6
    cdef u64 m = (<u64>1) << (q & 63)
    cdef Py_ssize_t i, rows = x.shape[0]
    cdef u64 xb, zb, diff
    for i in range(rows):
        xb = x[i, w] & m
        zb = z[i, w] & m
        if xb and zb:
            r[i] ^= 1
        diff = xb ^ zb
        x[i, w] ^= diff
        z[i, w] ^= diff


def apply_s(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t q):
    cdef Py_ssize_t w = q >> 6
    cdef u64 m = (<u64>1) << (q & 63)
    cdef Py_ssize_t i, rows = x.shape[0]
    cdef u64 xb
    for i in range(rows):
        xb = x[i, w] & m
        if xb and (z[i, w] & m):
            r[i] ^= 1
        z[i, w] ^= xb


def apply_x(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t q):
    cdef Py_ssize_t w = q >> 6
    cdef u64 m = (<u64>1) << (q & 63)
    cdef Py_ssize_t i, rows = x.shape[0]
    for i in range(rows):
        if z[i, w] & m:
            r[i] ^= 1


def apply_y(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t q):
    cdef Py_ssize_t w = q >> 6
    cdef u64 m = (<u64>1) << (q & 63)
    cdef Py_ssize_t i, rows = x.shape[0]
    for i in range(rows):
        if (x[i, w] ^ z[i, w]) & m:
            r[i] ^= 1


def apply_z(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t q):
    cdef Py_ssize_t w = q >> 6
    cdef u64 m = (<u64>1) << (q & 63)
    cdef Py_ssize_t i, rows = x.shape[0]
    for i in range(rows):
        if x[i, w] & m:
            r[i] ^= 1


def apply_cz(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t a, Py_ssize_t b):
    cdef Py_ssize_t wa = a >> 6, wb = b >> 6
    cdef int ba = a & 63, bb = b & 63
    cdef Py_ssize_t i, rows = x.shape[0]
    cdef u64 xa, za, xb, zb
    for i in range(rows):
        xa = (x[i, wa] >> ba) & 1
        za = (z[i, wa] >> ba) & 1
        xb = (x[i, wb] >> bb) & 1
        zb = (z[i, wb] >> bb) & 1
        if xa & xb & (za ^ zb):
            r[i] ^= 1
        z[i, wa] ^= xb << ba
        z[i, wb] ^= xa << bb


def apply_cnot(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t c, Py_ssize_t t):
    cdef Py_ssize_t wc = c >> 6, wt = t >> 6
    cdef int bc = c & 63, bt = t & 63
    cdef Py_ssize_t i, rows = x.shape[0]
    cdef u64 xc, zc, xt, zt
    for i in range(rows):
        xc = (x[i, wc] >> bc) & 1
        zc = (z[i, wc] >> bc) & 1
        xt = (x[i, wt] >> bt) & 1
        zt = (z[i, wt] >> bt) & 1
        if xc & zt & (xt ^ zc ^ 1):
            r[i] ^= 1
        x[i, wt] ^= xc << bt
        z[i, wc] ^= zt << bc


cdef void _row_mult(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r,
                    Py_ssize_t h, Py_ssize_t i) nogil:
    # Row h *= row i; even i-phase assumed for rows whose sign matters.
    cdef Py_ssize_t w, words = x.shape[1]
    cdef u64 x1, z1, x2, z2, pos, neg
    cdef int tot = 2 * (r[h] + r[i])
    for w in range(words):
        x1 = x[h, w]
        z1 = z[h, w]
        x2 = x[i, w]
        z2 = z[i, w]
        pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2)
        neg = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2)
        tot += popcount64(pos) - popcount64(neg)
        x[h, w] = x1 ^ x2
        z[h, w] = z1 ^ z2
    r[h] = <u8>((tot % 4 + 4) % 4 >> 1)


def measure_z(u64[:, ::1] x, u64[:, ::1] z, u8[::1] r, Py_ssize_t n,
              Py_ssize_t q, int coin):
    """Measure Z on qubit q. Returns (outcome_bit, was_deterministic)."""
    cdef Py_ssize_t w = q >> 6
    cdef int b = q & 63
    cdef u64 m = (<u64>1) << b
    cdef Py_ssize_t i, p = -1
    cdef Py_ssize_t two_n = 2 * n
    for i in range(n, two_n):
        if x[i, w] & m:
            p = i
            break
    cdef Py_ssize_t ww, words = x.shape[1]
    if p >= 0:
        for i in range(two_n):
            if i != p and (x[i, w] & m):
                _row_mult(x, z, r, i, p)
        for ww in range(words):
            x[p - n, ww] = x[p, ww]
            z[p - n, ww] = z[p, ww]
            x[p, ww] = 0
            z[p, ww] = 0
        r[p - n] = r[p]
        z[p, w] = m
        r[p] = <u8>coin
        return coin, False
    for ww in range(words):
        x[two_n, ww] = 0
        z[two_n, ww] = 0
    r[two_n] = 0
    for i in range(n):
        if x[i, w] & m:
            _row_mult(x, z, r, two_n, n + i)
    return r[two_n], True
