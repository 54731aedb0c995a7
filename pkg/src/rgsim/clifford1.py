"""Single-qubit Clifford tags for graph-state vertices.

An element is stored by its conjugation action (signed images of X and Z),
which identifies it up to global phase: 24 elements. The protocol itself
only ever leaves {I, Z, H, HZ} on photons, but local complementation needs
the full group.
"""

from __future__ import annotations

from dataclasses import dataclass

_X, _Y, _Z = 1, 2, 3

# p*q = i^k r for distinct non-identity Paulis p, q.
_PROD = {
    (_X, _Y): (1, _Z),
    (_Y, _X): (-1, _Z),
    (_Y, _Z): (1, _X),
    (_Z, _Y): (-1, _X),
    (_Z, _X): (1, _Y),
    (_X, _Z): (-1, _Y),
}


@dataclass(frozen=True, slots=True)
class LocalClifford:
    """Conjugation action: X -> sx*px, Z -> sz*pz (px, pz in {X,Y,Z})."""

    sx: int
    px: int
    sz: int
    pz: int

    def act(self, sign: int, pauli: int) -> tuple[int, int]:
        if pauli == _X:
            return sign * self.sx, self.px
        if pauli == _Z:
            return sign * self.sz, self.pz
        if pauli == _Y:
            # Y = iXZ, so act(Y) = i * act(X) * act(Z).
            k, r = _PROD[(self.px, self.pz)]
            s = self.sx * self.sz * (-1 if k == 1 else 1)
            return sign * s, r
        raise ValueError(f"bad Pauli code {pauli}")

    def compose(self, other: "LocalClifford") -> "LocalClifford":
        """Matrix product self*other (other acts first in a circuit)."""
        sx, px = self.act(other.sx, other.px)
        sz, pz = self.act(other.sz, other.pz)
        return LocalClifford(sx, px, sz, pz)

    def __matmul__(self, other: "LocalClifford") -> "LocalClifford":
        return self.compose(other)

    def gates(self) -> tuple[str, ...]:
        """Circuit realizing this element, as gate names applied in order."""
        return _WORDS[self]

    @property
    def name(self) -> str:
        return _NAMES.get(self, "".join(self.gates()) or "I")

    def __str__(self) -> str:
        return self.name


C_I = LocalClifford(1, _X, 1, _Z)
C_X = LocalClifford(1, _X, -1, _Z)
C_Y = LocalClifford(-1, _X, -1, _Z)
C_Z = LocalClifford(-1, _X, 1, _Z)
C_H = LocalClifford(1, _Z, 1, _X)
C_S = LocalClifford(1, _Y, 1, _Z)
C_SDG = LocalClifford(-1, _Y, 1, _Z)
C_HZ = C_H @ C_Z  # X -> -Z, Z -> X

# Quarter-turn rotations used by local complementation (mod phase,
# sqrt(-iZ) coincides with S and sqrt(iZ) with S_dag).
C_SQRT_IX = LocalClifford(1, _X, 1, _Y)  # X -> X, Z -> Y
C_SQRT_MIX = LocalClifford(1, _X, -1, _Y)  # X -> X, Z -> -Y

#: Tags the measurement rules accept on a qubit about to be measured.
Z_LIKE = (C_I, C_Z)
#: Tags the generation pipeline can leave on photons.
PIPELINE_TAGS = (C_I, C_Z, C_H, C_HZ)


def _enumerate_words():
    generators = (("H", C_H), ("S", C_S))
    words = {C_I: ()}
    frontier = [C_I]
    while frontier:
        nxt = []
        for element in frontier:
            for gname, g in generators:
                new = g @ element
                if new not in words:
                    words[new] = words[element] + (gname,)
                    nxt.append(new)
        frontier = nxt
    assert len(words) == 24
    return words


_WORDS = _enumerate_words()

_NAMES = {
    C_I: "I",
    C_X: "X",
    C_Y: "Y",
    C_Z: "Z",
    C_H: "H",
    C_S: "S",
    C_SDG: "Sdg",
    C_HZ: "HZ",
    C_SQRT_IX: "sqrt(iX)",
    C_SQRT_MIX: "sqrt(-iX)",
}

ALL_ELEMENTS = tuple(_WORDS)
