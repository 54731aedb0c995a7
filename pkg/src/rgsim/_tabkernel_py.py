"""Bit-packed stabilizer-tableau kernels, NumPy implementation.

Fallback backend with the same interface as the compiled `_tabkernel`
extension. Rows are packed 64 qubits per word; rows 0..n-1 are
destabilizers, n..2n-1 stabilizers, row 2n is scratch for deterministic
measurements.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

_ONE = np.uint64(1)


def alloc(n: int):
    """Arrays for an n-qubit tableau in the all-zeros state."""
    words = (n + 63) >> 6
    x = np.zeros((2 * n + 1, words), dtype=np.uint64)
    z = np.zeros((2 * n + 1, words), dtype=np.uint64)
    r = np.zeros(2 * n + 1, dtype=np.uint8)
    for q in range(n):
        w, b = q >> 6, np.uint64(q & 63)
        x[q, w] |= _ONE << b
        z[n + q, w] |= _ONE << b
    return x, z, r


def _bit(arr, w, b):
    return (arr[:, w] >> np.uint64(b)) & _ONE


def apply_h(x, z, r, q):
    w, b = q >> 6, q & 63
    m = _ONE << np.uint64(b)
    xb = x[:, w] & m
    zb = z[:, w] & m
    r ^= ((xb & zb) != 0).astype(np.uint8)
    diff = xb ^ zb
    x[:, w] ^= diff
    z[:, w] ^= diff


def apply_s(x, z, r, q):
    w, b = q >> 6, q & 63
    m = _ONE << np.uint64(b)
    xb = x[:, w] & m
    r ^= ((xb & z[:, w]) != 0).astype(np.uint8)
    z[:, w] ^= xb


def apply_x(x, z, r, q):
    w, b = q >> 6, q & 63
    m = _ONE << np.uint64(b)
    r ^= ((z[:, w] & m) != 0).astype(np.uint8)


def apply_y(x, z, r, q):
    w, b = q >> 6, q & 63
    m = _ONE << np.uint64(b)
    r ^= (((x[:, w] ^ z[:, w]) & m) != 0).astype(np.uint8)


def apply_z(x, z, r, q):
    w, b = q >> 6, q & 63
    m = _ONE << np.uint64(b)
    r ^= ((x[:, w] & m) != 0).astype(np.uint8)


def apply_cz(x, z, r, a, b):
    wa, ba = a >> 6, a & 63
    wb, bb = b >> 6, b & 63
    xa = _bit(x, wa, ba)
    za = _bit(z, wa, ba)
    xb = _bit(x, wb, bb)
    zb = _bit(z, wb, bb)
    r ^= (xa & xb & (za ^ zb)).astype(np.uint8)
    z[:, wa] ^= xb << np.uint64(ba)
    z[:, wb] ^= xa << np.uint64(bb)


def apply_cnot(x, z, r, c, t):
    wc, bc = c >> 6, c & 63
    wt, bt = t >> 6, t & 63
    xc = _bit(x, wc, bc)
    zc = _bit(z, wc, bc)
    xt = _bit(x, wt, bt)
    zt = _bit(z, wt, bt)
    r ^= (xc & zt & (xt ^ zc ^ _ONE)).astype(np.uint8)
    x[:, wt] ^= xc << np.uint64(bt)
    z[:, wc] ^= zt << np.uint64(bc)


def _row_mult(x, z, r, h, i):
    # Row h *= row i with sign tracking (left factor = row h). The i-phase
    # count is even whenever the rows commute; the odd bit is dropped, which
    # only ever affects rows whose phase is about to be overwritten.
    x1, z1 = x[h], z[h]
    x2, z2 = x[i], z[i]
    pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2)
    neg = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2)
    tot = int(np.bitwise_count(pos).sum()) - int(np.bitwise_count(neg).sum())
    tot += 2 * (int(r[h]) + int(r[i]))
    r[h] = (tot % 4) >> 1
    x[h] = x1 ^ x2
    z[h] = z1 ^ z2


def measure_z(x, z, r, n, q, coin):
    """Measure Z on qubit q. Returns (outcome_bit, was_deterministic).

    `coin` is the pre-drawn random bit used only when the outcome is random,
    so both backends consume randomness identically.
    """
    w, b = q >> 6, q & 63
    two_n = 2 * n
    xcol = (x[:two_n, w] >> np.uint64(b)) & _ONE
    stab_hits = np.nonzero(xcol[n:])[0]
    if stab_hits.size:
        p = n + int(stab_hits[0])
        for i in np.nonzero(xcol)[0]:
            i = int(i)
            if i != p:
                _row_mult(x, z, r, i, p)
        x[p - n] = x[p]
        z[p - n] = z[p]
        r[p - n] = r[p]
        x[p] = 0
        z[p] = 0
        z[p, w] = _ONE << np.uint64(b)
        r[p] = coin
        return coin, False
    x[two_n] = 0
    z[two_n] = 0
    r[two_n] = 0
    for j in np.nonzero(xcol[:n])[0]:
        _row_mult(x, z, r, two_n, n + int(j))
    return int(r[two_n]), True
