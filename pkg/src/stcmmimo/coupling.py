"""Dipole ULA impedance matrix and mutual coupling matrix.

All geometry is wavelength-normalized, so the wave number is 2*pi and the
carrier frequency never enters; meter/GHz conversion is a CLI concern.
Only half-wave dipoles (L = 0.5) are supported: the self-impedance
constants are the half-wave values and other lengths would be silently
mis-modeled, so they are rejected outright.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .specfun import EULER_GAMMA, cosine_integral, sine_integral

INTRINSIC_IMPEDANCE = 120.0 * math.pi  # eta_0, ohms
WAVE_NUMBER = 2.0 * math.pi  # beta = 2*pi/lambda with lambda = 1

# Paper-matched defaults: Z_A of a resonant half-wave dipole, conjugate load.
DEFAULT_ANTENNA_IMPEDANCE = 73.0 + 42.0j
DEFAULT_LOAD_IMPEDANCE = 73.0 - 42.0j

CONDITION_LIMIT = 1e12


class UnsupportedGeometryError(ValueError):
    """Raised for dipole lengths other than the supported half wavelength."""


class SingularCouplingError(ArithmeticError):
    """Raised when (Z + Z_L I) is singular or too ill-conditioned to invert."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(
            f"impedance system is numerically singular "
            f"(condition estimate {condition:.3e} > {CONDITION_LIMIT:.0e})"
        )


@dataclass(frozen=True)
class DipoleArraySpec:
    """Physical description of the transmit ULA.

    element_count: number of dipoles M (even, >= 2; two equal sub-arrays)
    spacing: inter-element distance in wavelengths
    dipole_length: dipole length in wavelengths (only 0.5 supported)
    antenna_impedance / load_impedance: Z_A and Z_L in ohms
    """

    element_count: int
    spacing: float
    dipole_length: float = 0.5
    antenna_impedance: complex = DEFAULT_ANTENNA_IMPEDANCE
    load_impedance: complex = DEFAULT_LOAD_IMPEDANCE

    def __post_init__(self):
        if self.element_count < 2 or self.element_count % 2 != 0:
            raise ValueError(
                f"element_count must be an even integer >= 2, got {self.element_count}"
            )
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be > 0, got {self.spacing}")
        if not (math.isfinite(self.dipole_length) and self.dipole_length > 0):
            raise ValueError(f"dipole_length must be > 0, got {self.dipole_length}")
        for name in ("antenna_impedance", "load_impedance"):
            z = complex(getattr(self, name))
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError(f"{name} must be finite, got {z}")

    @classmethod
    def from_aperture(cls, element_count: int, total_length: float, **kwargs):
        """Spec for a fixed array aperture: spacing = total_length / M."""
        return cls(element_count, total_length / element_count, **kwargs)


@dataclass(frozen=True)
class CouplingMatrix:
    """The M x M coupling matrix C = (Z_A + Z_L)(Z + Z_L I)^-1."""

    entries: np.ndarray
    source_spec: DipoleArraySpec | None = None
    condition: float = field(default=float("nan"), compare=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.complex128)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"coupling matrix must be square, got shape {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("coupling matrix has non-finite entries")
        if self.source_spec is not None and e.shape[0] != self.source_spec.element_count:
            raise ValueError("coupling matrix dimension does not match its array spec")
        object.__setattr__(self, "entries", e)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def _require_half_wave(length: float):
    if length != 0.5:
        raise UnsupportedGeometryError(
            f"only half-wave dipoles (L=0.5) are supported, got L={length}"
        )


def self_impedance(length: float = 0.5) -> complex:
    """Self impedance of a half-wave dipole (about 73.13 + 42.54j ohms)."""
    _require_half_wave(length)
    two_pi = 2.0 * math.pi
    scale = INTRINSIC_IMPEDANCE / (4.0 * math.pi)
    return scale * complex(
        EULER_GAMMA + math.log(two_pi) - cosine_integral(two_pi),
        sine_integral(two_pi),
    )


def mutual_impedance(separation: float, length: float = 0.5) -> complex:
    """Mutual impedance of two parallel side-by-side half-wave dipoles.

    separation is the center-to-center distance in wavelengths; the value
    depends only on the distance, not on which element is which.
    """
    _require_half_wave(length)
    if not (math.isfinite(separation) and separation > 0):
        raise ValueError(f"separation must be > 0, got {separation}")
    u1 = math.hypot(separation, length) + length
    u2 = math.hypot(separation, length) - length
    b = WAVE_NUMBER
    re = (
        2.0 * cosine_integral(b * separation)
        - cosine_integral(b * u1)
        - cosine_integral(b * u2)
    )
    im = (
        2.0 * sine_integral(b * separation)
        - sine_integral(b * u1)
        - sine_integral(b * u2)
    )
    scale = INTRINSIC_IMPEDANCE / (4.0 * math.pi)
    return scale * complex(re, -im)


def toeplitz_impedance_matrix(
    element_count: int, spacing: float, dipole_length: float = 0.5
) -> np.ndarray:
    """Symmetric Toeplitz Z with Z_mn = mutual_impedance(|m-n| d) off-diagonal.

    Accepts element_count = 1 for internal/diagnostic use.
    """
    if element_count < 1:
        raise ValueError(f"element_count must be >= 1, got {element_count}")
    col = np.empty(element_count, dtype=np.complex128)
    col[0] = self_impedance(dipole_length)
    for k in range(1, element_count):
        col[k] = mutual_impedance(k * spacing, dipole_length)
    # Pass the row explicitly: Z is complex symmetric (Z_mn = Z_nm), and
    # toeplitz() would otherwise conjugate the upper triangle.
    return scipy.linalg.toeplitz(col, col)


def impedance_matrix(spec: DipoleArraySpec) -> np.ndarray:
    """The M x M dipole-array impedance matrix for a ULA spec."""
    return toeplitz_impedance_matrix(spec.element_count, spec.spacing, spec.dipole_length)


def coupling_matrix_from_impedance(
    z_matrix: np.ndarray,
    antenna_impedance: complex,
    load_impedance: complex,
    source_spec: DipoleArraySpec | None = None,
) -> CouplingMatrix:
    """C = (Z_A + Z_L)(Z + Z_L I)^-1 from an explicit impedance matrix.

    Computed by an LU solve against the identity rather than an explicit
    inverse; a condition estimate above CONDITION_LIMIT raises
    SingularCouplingError.
    """
    z = np.asarray(z_matrix, dtype=np.complex128)
    m = z.shape[0]
    system = z + load_impedance * np.eye(m)
    cond = float(np.linalg.cond(system))
    if not math.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularCouplingError(cond)
    scale = antenna_impedance + load_impedance
    entries = scale * scipy.linalg.solve(system, np.eye(m, dtype=np.complex128))
    return CouplingMatrix(entries=entries, source_spec=source_spec, condition=cond)


def coupling_matrix(spec: DipoleArraySpec) -> CouplingMatrix:
    """Mutual coupling matrix of the ULA described by spec."""
    return coupling_matrix_from_impedance(
        impedance_matrix(spec),
        spec.antenna_impedance,
        spec.load_impedance,
        source_spec=spec,
    )
