"""Pauli strings with a real (+1/-1) phase over a fixed qubit range."""

from __future__ import annotations

from dataclasses import dataclass

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}


@dataclass(frozen=True)
class PauliString:
    """n-qubit Pauli operator stored as X/Z bitmasks plus a +/-1 sign.

    Bit q of `x`/`z` gives the letter on qubit q: 00=I, 10=X, 11=Y, 01=Z.
    Imaginary phases are not representable; they never arise in the checks
    this library performs.
    """

    n: int
    x: int
    z: int
    sign: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one qubit")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.x >> self.n or self.z >> self.n:
            raise ValueError("support exceeds qubit range")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse e.g. '+XZI' or '-YZ' (qubit 0 is the leftmost letter)."""
        sign = 1
        if label and label[0] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        x = z = 0
        for q, letter in enumerate(label):
            try:
                xb, zb = _LETTER_TO_BITS[letter]
            except KeyError:
                raise ValueError(f"bad Pauli letter {letter!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(label), x, z, sign)

    @classmethod
    def from_ops(cls, n: int, ops: dict[int, str], sign: int = 1) -> "PauliString":
        """Build an n-qubit string from a {qubit: letter} map."""
        x = z = 0
        for q, letter in ops.items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range")
            xb, zb = _LETTER_TO_BITS[letter]
            x |= xb << q
            z |= zb << q
        return cls(n, x, z, sign)

    def letter(self, q: int) -> str:
        return _BITS_TO_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]

    def to_label(self) -> str:
        body = "".join(self.letter(q) for q in range(self.n))
        return ("+" if self.sign > 0 else "-") + body

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError("length mismatch")
        anti = (self.x & other.z).bit_count() + (self.z & other.x).bit_count()
        return anti % 2 == 0

    def __str__(self) -> str:
        return self.to_label()


def mul_paulis(x1: int, z1: int, s1: int, x2: int, z2: int, s2: int):
    """Product of two commuting sign-tracked Paulis (bitmask form).

    Returns (x, z, sign). Raises if the arguments anticommute, since the
    product would then carry an imaginary phase.
    """
    # Exponent of i accumulated per qubit when multiplying letters
    # (left factor 1, right factor 2): X*Y=iZ, Y*Z=iX, Z*X=iY and the
    # reversed orders pick up -i.
    pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2)
    neg = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2)
    phase = (pos.bit_count() - neg.bit_count()) % 4
    if phase % 2:
        raise ValueError("anticommuting factors give an imaginary phase")
    sign = s1 * s2 * (-1 if phase == 2 else 1)
    return x1 ^ x2, z1 ^ z2, sign
