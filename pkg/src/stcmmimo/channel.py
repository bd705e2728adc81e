"""Rayleigh channel draws, coupling application, and sub-array partitioning.

The channel vector is always stored in physical element order. Coupling is
applied in physical order and the two code branches are extracted afterwards
through the assignment's gather pattern, so the contiguous and interleaved
selection styles differ exactly and only in that gather.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coupling import CouplingMatrix


class SubArrayStyle(Enum):
    CONTIGUOUS = "contiguous"  # branch 0 = first half, branch 1 = second half
    INTERLEAVED = "interleaved"  # branch 0 = even indices, branch 1 = odd


@dataclass(frozen=True)
class SubArrayAssignment:
    """Partition of the M physical elements into the two code branches."""

    style: SubArrayStyle
    element_count: int

    def __post_init__(self):
        if self.element_count < 2 or self.element_count % 2 != 0:
            raise ValueError(
                f"element_count must be even and >= 2, got {self.element_count}"
            )

    @property
    def branch_size(self) -> int:
        return self.element_count // 2

    def branch_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical indices gathered by branch 0 and branch 1."""
        m = self.element_count
        if self.style is SubArrayStyle.CONTIGUOUS:
            idx = np.arange(m)
            return idx[: m // 2], idx[m // 2 :]
        return np.arange(0, m, 2), np.arange(1, m, 2)


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw: physical vector, its coupled image, and the partition."""

    h_physical: np.ndarray
    h_coupled: np.ndarray
    assignment: SubArrayAssignment

    def __post_init__(self):
        hp = np.asarray(self.h_physical, dtype=np.complex128)
        hc = np.asarray(self.h_coupled, dtype=np.complex128)
        m = self.assignment.element_count
        if hp.shape != (m,) or hc.shape != (m,):
            raise ValueError(
                f"channel vectors must have shape ({m},), got {hp.shape} and {hc.shape}"
            )
        if not (np.all(np.isfinite(hp)) and np.all(np.isfinite(hc))):
            raise ValueError("channel vectors must be finite")
        object.__setattr__(self, "h_physical", hp)
        object.__setattr__(self, "h_coupled", hc)

    def branches(self, coupled: bool):
        h = self.h_coupled if coupled else self.h_physical
        return partition(h, self.assignment)


def draw_channel(rng: np.random.Generator, element_count: int) -> np.ndarray:
    """One i.i.d. CN(0, 1) channel vector (real/imag variance 1/2 each).

    Consumes exactly 2 * element_count standard normals from rng, in
    interleaved (re, im) order; this draw order is part of the
    reproducibility contract of the simulator's per-trial substreams.
    """
    if element_count < 2:
        raise ValueError(f"element_count must be >= 2, got {element_count}")
    z = rng.standard_normal(2 * element_count)
    return (z[0::2] + 1j * z[1::2]) / np.sqrt(2.0)


def apply_coupling(coupling: CouplingMatrix | np.ndarray, h: np.ndarray) -> np.ndarray:
    """Coupled channel C @ h (physical order)."""
    c = coupling.entries if isinstance(coupling, CouplingMatrix) else np.asarray(coupling)
    h = np.asarray(h)
    if c.shape[1] != h.shape[0]:
        raise ValueError(f"dimension mismatch: C is {c.shape}, h has length {h.shape[0]}")
    return c @ h


def partition(h: np.ndarray, assignment: SubArrayAssignment):
    """Gather the branch-0 and branch-1 sub-vectors of a physical-order vector."""
    h = np.asarray(h)
    if h.shape[0] != assignment.element_count:
        raise ValueError(
            f"vector length {h.shape[0]} does not match assignment "
            f"element_count {assignment.element_count}"
        )
    i0, i1 = assignment.branch_indices()
    return h[i0], h[i1]


def scatter(h0: np.ndarray, h1: np.ndarray, assignment: SubArrayAssignment) -> np.ndarray:
    """Inverse of partition: rebuild the physical-order vector."""
    h0 = np.asarray(h0)
    h1 = np.asarray(h1)
    n = assignment.branch_size
    if h0.shape[0] != n or h1.shape[0] != n:
        raise ValueError(f"branch vectors must have length {n}")
    out = np.empty(assignment.element_count, dtype=np.result_type(h0, h1))
    i0, i1 = assignment.branch_indices()
    out[i0] = h0
    out[i1] = h1
    return out
