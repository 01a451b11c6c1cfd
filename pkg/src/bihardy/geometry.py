"""Radial measure backends.

Each geometry supplies the radial surface density ``Lambda(r)``, the
integral of the polar density over the sphere of radius ``r`` around the
base point, so that ``int_X g = int_0^inf g(r) Lambda(r) dr`` for radial g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._special import log_sinhc, logsinh
from .asymptotics import Exponential, Growth, Hints, PowerLaw


class GeometryKind(str, Enum):
    HOMOGENEOUS = "Homogeneous"
    HYPERBOLIC = "Hyperbolic"
    CARTAN_HADAMARD = "CartanHadamardConst"


class GeometryDomainError(ValueError):
    """Raised for invalid geometry parameters or non-positive radii."""


def unit_sphere_area(n: float) -> float:
    """Area of the unit sphere in R^n, 2 pi^(n/2) / Gamma(n/2)."""
    return math.exp(math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n))


@dataclass(frozen=True)
class RadialGeometry:
    """A radial geometry with density ``Lambda(r)``.

    ``dim`` is Q for homogeneous groups and n otherwise.  ``curvature_b`` is
    the constant b with sectional curvature -b (Cartan-Hadamard only).
    """

    kind: GeometryKind
    dim: float
    sphere_area: float
    curvature_b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", GeometryKind(self.kind))
        if not (self.dim > 0 and math.isfinite(self.dim)):
            raise GeometryDomainError(f"dim must be positive, got {self.dim}")
        if not (self.sphere_area > 0 and math.isfinite(self.sphere_area)):
            raise GeometryDomainError(f"sphere_area must be positive, got {self.sphere_area}")
        if not self.curvature_b >= 0:
            raise GeometryDomainError(f"curvature_b must be >= 0, got {self.curvature_b}")
        if self.kind is not GeometryKind.CARTAN_HADAMARD and self.curvature_b != 0:
            raise GeometryDomainError("curvature_b applies to CartanHadamardConst only")

    @classmethod
    def homogeneous(cls, Q: float, sigma: float = 1.0) -> "RadialGeometry":
        return cls(GeometryKind.HOMOGENEOUS, float(Q), float(sigma))

    @classmethod
    def hyperbolic(cls, n: float) -> "RadialGeometry":
        return cls(GeometryKind.HYPERBOLIC, float(n), unit_sphere_area(n))

    @classmethod
    def cartan_hadamard(cls, n: float, b: float) -> "RadialGeometry":
        return cls(GeometryKind.CARTAN_HADAMARD, float(n), unit_sphere_area(n), float(b))

    @property
    def scale(self) -> float:
        """Curvature scale sqrt(b) of the sinh profile; 0 for flat profiles."""
        if self.kind is GeometryKind.HYPERBOLIC:
            return 1.0
        if self.kind is GeometryKind.CARTAN_HADAMARD:
            return math.sqrt(self.curvature_b)
        return 0.0

    def log_density(self, r):
        """Elementwise log Lambda(r); r must be positive."""
        r = np.asarray(r, dtype=float)
        m = self.dim - 1.0
        log_c = math.log(self.sphere_area)
        with np.errstate(divide="ignore"):
            if self.kind is GeometryKind.HYPERBOLIC:
                return log_c + m * logsinh(r) if m else np.full_like(r, log_c)
            if self.kind is GeometryKind.CARTAN_HADAMARD and self.curvature_b > 0:
                s = self.scale
                # J(r) r^(n-1) with J = (sinh(s r)/(s r))^(n-1)
                return log_c + m * (log_sinhc(s * r) + np.log(r)) if m else np.full_like(r, log_c)
            return log_c + m * np.log(r) if m else np.full_like(r, log_c)

    def surface_density(self, r):
        """Lambda(r); raises for non-positive r."""
        arr = np.asarray(r, dtype=float)
        if np.any(~(arr > 0)):
            raise GeometryDomainError("surface_density requires r > 0")
        out = np.exp(self.log_density(arr))
        return float(out) if np.ndim(r) == 0 else out

    def tail_profile(self) -> tuple[float, Growth]:
        """(power of Lambda at 0+, growth class of Lambda at infinity)."""
        m = self.dim - 1.0
        s = self.scale
        if s > 0:
            return m, Exponential(m * s)
        return m, PowerLaw(m)

    @property
    def hints(self) -> Hints:
        zero, inf = self.tail_profile()
        return Hints(zero, inf)

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "dim": self.dim, "sphere_area": self.sphere_area}
        if self.kind is GeometryKind.CARTAN_HADAMARD:
            out["b"] = self.curvature_b
        return out
