"""Exact stabilizer-tableau simulator used as the ground-truth oracle.

The heavy row operations live in a compiled kernel module
(`rgsim._tabkernel`) with a NumPy twin (`rgsim._tabkernel_py`) selected at
import; set RGSIM_BACKEND=python to force the fallback.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from .pauli import PauliString, mul_paulis

GATES_1Q = ("H", "S", "X", "Y", "Z")
GATES_2Q = ("CZ", "CNOT")


def _load_kernels(backend: str):
    if backend == "python":
        from . import _tabkernel_py

        return _tabkernel_py
    if backend == "cython":
        from . import _tabkernel

        return _tabkernel
    raise ValueError(f"unknown backend {backend!r}")


def _select_default():
    forced = os.environ.get("RGSIM_BACKEND")
    if forced:
        return _load_kernels(forced)
    try:
        return _load_kernels("cython")
    except ImportError:
        return _load_kernels("python")


_DEFAULT_KERNELS = _select_default()


def active_backend() -> str:
    """Name of the kernel backend new tableaus use by default."""
    return _DEFAULT_KERNELS.BACKEND_NAME


class MeasureResult(NamedTuple):
    sign: int  # +1 or -1
    deterministic: bool


class Tableau:
    """Stabilizer state of `n` qubits, initialized to |0...0>.

    Tracks n destabilizer and n stabilizer generator rows with sign bits.
    A tableau is confined to a single trial; it is never shared between
    concurrently running trials.
    """

    def __init__(self, n: int, backend: str | None = None):
        if n < 1:
            raise ValueError("qubit count must be at least 1")
        self.n = n
        self._k = _load_kernels(backend) if backend else _DEFAULT_KERNELS
        self._x, self._z, self._r = self._k.alloc(n)

    @property
    def backend(self) -> str:
        return self._k.BACKEND_NAME

    def copy(self) -> "Tableau":
        dup = object.__new__(Tableau)
        dup.n = self.n
        dup._k = self._k
        dup._x = self._x.copy()
        dup._z = self._z.copy()
        dup._r = self._r.copy()
        return dup

    # -- gates ---------------------------------------------------------

    def _check(self, *qubits):
        for q in qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit {q} out of range 0..{self.n - 1}")
        if len(qubits) == 2 and qubits[0] == qubits[1]:
            raise ValueError("two-qubit gate needs distinct targets")

    def h(self, q: int):
        self._check(q)
        self._k.apply_h(self._x, self._z, self._r, q)

    def s(self, q: int):
        self._check(q)
        self._k.apply_s(self._x, self._z, self._r, q)

    def x(self, q: int):
        self._check(q)
        self._k.apply_x(self._x, self._z, self._r, q)

    def y(self, q: int):
        self._check(q)
        self._k.apply_y(self._x, self._z, self._r, q)

    def z(self, q: int):
        self._check(q)
        self._k.apply_z(self._x, self._z, self._r, q)

    def cz(self, a: int, b: int):
        self._check(a, b)
        self._k.apply_cz(self._x, self._z, self._r, a, b)

    def cnot(self, c: int, t: int):
        self._check(c, t)
        self._k.apply_cnot(self._x, self._z, self._r, c, t)

    def apply(self, gate: str, *targets: int):
        """Apply a named gate from {H, S, X, Y, Z, CZ, CNOT}."""
        gate = gate.upper()
        if gate in GATES_1Q:
            if len(targets) != 1:
                raise ValueError(f"{gate} takes one target")
            getattr(self, gate.lower())(*targets)
        elif gate == "CZ":
            self.cz(*targets)
        elif gate == "CNOT":
            self.cnot(*targets)
        else:
            raise ValueError(f"unknown gate {gate!r}")

    # -- measurement ---------------------------------------------------

    def measure(self, basis: str, q: int, rng) -> MeasureResult:
        """Projectively measure qubit q in the X, Y or Z basis.

        One random bit is drawn from `rng` on every call (used only when the
        outcome is random) so identical seeds give identical trajectories
        regardless of backend or how many outcomes happened to be forced.
        """
        self._check(q)
        coin = int(rng.integers(0, 2))
        basis = basis.upper()
        if basis == "Z":
            bit, det = self._k.measure_z(self._x, self._z, self._r, self.n, q, coin)
        elif basis == "X":
            self.h(q)
            bit, det = self._k.measure_z(self._x, self._z, self._r, self.n, q, coin)
            self.h(q)
        elif basis == "Y":
            # S_dag then H maps Y to Z; undo afterwards.
            self.s(q)
            self.z(q)
            self.h(q)
            bit, det = self._k.measure_z(self._x, self._z, self._r, self.n, q, coin)
            self.h(q)
            self.s(q)
        else:
            raise ValueError(f"unknown basis {basis!r}")
        return MeasureResult(-1 if bit else 1, bool(det))

    # -- stabilizer-group queries ---------------------------------------

    def _row(self, i: int):
        """Row i as (x bitmask, z bitmask, sign) with true-Pauli convention."""
        xm = 0
        zm = 0
        for w in range(self._x.shape[1]):
            xm |= int(self._x[i, w]) << (64 * w)
            zm |= int(self._z[i, w]) << (64 * w)
        return xm, zm, -1 if self._r[i] else 1

    def stabilizer_rows(self) -> list[PauliString]:
        return [
            PauliString(self.n, *self._row(self.n + i)) for i in range(self.n)
        ]

    def dump(self) -> str:
        """Debug text: one stabilizer generator per line, sign prefix +/-."""
        return "\n".join(p.to_label() for p in self.stabilizer_rows())

    def is_stabilized_by(self, p: PauliString) -> bool:
        """Whether p (with its sign) is an element of the stabilizer group.

        Decided by reduction against the generator rows, not enumeration.
        """
        if p.n != self.n:
            raise ValueError("operator width does not match tableau")
        for i in range(self.n, 2 * self.n):
            xr, zr, _ = self._row(i)
            if ((p.x & zr).bit_count() + (p.z & xr).bit_count()) % 2:
                return False
        ax = az = 0
        asign = 1
        for j in range(self.n):
            xd, zd, _ = self._row(j)
            if ((p.x & zd).bit_count() + (p.z & xd).bit_count()) % 2:
                xs, zs, ss = self._row(self.n + j)
                ax, az, asign = mul_paulis(ax, az, asign, xs, zs, ss)
        return ax == p.x and az == p.z and asign == p.sign

    def canonical_stabilizers(self, qubits=None) -> list[PauliString]:
        """Canonical generator list for the state reduced to `qubits`.

        The subset must be unentangled with its complement (checked).
        Identical reduced states give identical lists.
        """
        subset = sorted(range(self.n)) if qubits is None else sorted(set(qubits))
        if not subset:
            raise ValueError("empty qubit subset")
        if any(q < 0 or q >= self.n for q in subset):
            raise ValueError("subset qubit out of range")
        rows = [self._row(self.n + i) for i in range(self.n)]
        comp = [q for q in range(self.n) if q not in set(subset)]

        # Eliminate complement support; surviving rows generate the reduced
        # stabilizer group.
        for q in comp:
            for which in (0, 1):  # x column then z column
                pivot = None
                for idx, (xr, zr, _) in enumerate(rows):
                    if ((xr if which == 0 else zr) >> q) & 1:
                        pivot = idx
                        break
                if pivot is None:
                    continue
                px, pz, ps = rows[pivot]
                for idx in range(len(rows)):
                    if idx == pivot:
                        continue
                    xr, zr, sr = rows[idx]
                    if ((xr if which == 0 else zr) >> q) & 1:
                        rows[idx] = mul_paulis(xr, zr, sr, px, pz, ps)
                del rows[pivot]
        if len(rows) != len(subset):
            raise ValueError("subset is entangled with its complement")

        # Compress onto the subset's qubit positions.
        pos = {q: i for i, q in enumerate(subset)}
        packed = []
        for xr, zr, sr in rows:
            nx = nz = 0
            for q in subset:
                nx |= ((xr >> q) & 1) << pos[q]
                nz |= ((zr >> q) & 1) << pos[q]
            packed.append((nx, nz, sr))

        # Unique form: GF(2) RREF over columns [x_0..x_{k-1}, z_0..z_{k-1}]
        # with sign-tracked row products.
        k = len(subset)
        rank = 0
        for col in range(2 * k):
            q, use_x = (col, True) if col < k else (col - k, False)
            pivot = None
            for idx in range(rank, len(packed)):
                xr, zr, _ = packed[idx]
                if (((xr if use_x else zr) >> q) & 1):
                    pivot = idx
                    break
            if pivot is None:
                continue
            packed[rank], packed[pivot] = packed[pivot], packed[rank]
            px, pz, ps = packed[rank]
            for idx in range(len(packed)):
                if idx == rank:
                    continue
                xr, zr, sr = packed[idx]
                if (((xr if use_x else zr) >> q) & 1):
                    packed[idx] = mul_paulis(xr, zr, sr, px, pz, ps)
            rank += 1
        return [PauliString(k, xr, zr, sr) for xr, zr, sr in packed]


def new_tableau(n: int, backend: str | None = None) -> Tableau:
    """Fresh |0...0> tableau; stabilizers are +Z on every qubit."""
    return Tableau(n, backend=backend)
