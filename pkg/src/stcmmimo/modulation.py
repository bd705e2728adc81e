"""Gray-mapped constellations with unit average symbol energy.

A scheme's constellation is indexed by the integer bit label: points[b] is
the symbol whose transmitted bits are the binary digits of b (MSB first).
Gray mapping then means geometric neighbors differ in exactly one bit.
"""

from dataclasses import dataclass, field

import numpy as np


def _gray(k: int) -> int:
    return k ^ (k >> 1)


@dataclass(frozen=True)
class ModulationScheme:
    name: str
    points: np.ndarray = field(repr=False)  # indexed by bit label

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.ndim != 1 or pts.size < 2 or (pts.size & (pts.size - 1)) != 0:
            raise ValueError("constellation size must be a power of two >= 2")
        object.__setattr__(self, "points", pts)

    @property
    def order(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        return int(self.order).bit_length() - 1

    @classmethod
    def qpsk(cls) -> "ModulationScheme":
        # Bit pair 00 -> (1+j)/sqrt(2); Gray ring 00, 01, 11, 10.
        pts = np.array([1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j]) / np.sqrt(2.0)
        return cls("qpsk", pts)

    @classmethod
    def psk(cls, order: int) -> "ModulationScheme":
        if order == 4:
            return cls.qpsk()
        pts = np.empty(order, dtype=np.complex128)
        for k in range(order):
            pts[_gray(k)] = np.exp(2j * np.pi * k / order)
        return cls(f"{order}psk", pts)

    @classmethod
    def qam(cls, order: int) -> "ModulationScheme":
        """Square QAM with per-axis (rectangular) Gray coding."""
        side = int(round(np.sqrt(order)))
        if side * side != order or (side & (side - 1)) != 0:
            raise ValueError(f"square QAM needs order 4, 16, 64, ..., got {order}")
        bits_axis = side.bit_length() - 1
        levels = np.arange(side) * 2.0 - (side - 1)
        pts = np.empty(order, dtype=np.complex128)
        for i in range(side):
            for q in range(side):
                label = (_gray(i) << bits_axis) | _gray(q)
                pts[label] = complex(levels[i], levels[q])
        pts /= np.sqrt(np.mean(np.abs(pts) ** 2))
        return cls(f"{order}qam", pts)

    @classmethod
    def from_name(cls, name: str) -> "ModulationScheme":
        name = name.strip().lower()
        if name == "qpsk":
            return cls.qpsk()
        if name.endswith("psk"):
            return cls.psk(int(name[:-3]))
        if name.endswith("qam"):
            return cls.qam(int(name[:-3]))
        raise ValueError(f"unknown modulation scheme {name!r}")


def modulate(bits, scheme: ModulationScheme) -> np.ndarray:
    """Map a flat 0/1 sequence to constellation symbols."""
    bits = np.asarray(bits, dtype=np.int64)
    bps = scheme.bits_per_symbol
    if bits.size % bps != 0:
        raise ValueError(f"bit count {bits.size} is not a multiple of {bps}")
    groups = bits.reshape(-1, bps)
    weights = 1 << np.arange(bps - 1, -1, -1)
    labels = groups @ weights
    return scheme.points[labels]


def demodulate(symbols, scheme: ModulationScheme) -> np.ndarray:
    """Nearest-point hard decision back to a flat bit sequence."""
    labels = nearest_labels(symbols, scheme)
    bps = scheme.bits_per_symbol
    shifts = np.arange(bps - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).reshape(-1)


def nearest_labels(symbols, scheme: ModulationScheme) -> np.ndarray:
    """Bit labels of the nearest constellation points (ties: lowest label)."""
    s = np.atleast_1d(np.asarray(symbols, dtype=np.complex128))
    d2 = np.abs(s[:, None] - scheme.points[None, :]) ** 2
    return np.argmin(d2, axis=1)


def bits_for_label(label: int, scheme: ModulationScheme) -> np.ndarray:
    shifts = np.arange(scheme.bits_per_symbol - 1, -1, -1)
    return (label >> shifts) & 1
