"""Beamspace model of a parasitic-array antenna: reactance-controlled element
currents, steering vectors on a circular layout, Gram-Schmidt orthonormal
basis patterns, and weight extraction.

This module exists to show that random basis-pattern weights are physically
realizable; the capacity simulator works on weights directly and never
routes through reactance space.  Geometry defaults to a uniform circular
array of radius lambda/16 with the active element at the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateLoadError",
    "RankDeficientGeometryError",
    "EsparConfig",
    "BasisSet",
    "synthetic_admittance",
    "element_currents",
    "steering_vector",
    "build_basis",
    "pattern_weights",
    "pattern_value",
]

DEFAULT_RADIUS_WAVELENGTHS = 1.0 / 16.0
_COND_LIMIT = 1e12
_ACTIVE_LOAD_OHMS = 50.0


class DegenerateLoadError(ValueError):
    """Reactance setting makes the load network numerically singular."""


class RankDeficientGeometryError(ValueError):
    """Element layout yields linearly dependent steering components."""


def synthetic_admittance(m_elements: int) -> np.ndarray:
    """Bundled symmetric, diagonally dominant admittance fixture (siemens).

    Mutual terms decay with inter-element spacing; purely a plausible
    stand-in since measured coupling matrices are hardware-specific.
    """
    radius = DEFAULT_RADIUS_WAVELENGTHS
    pos = [(0.0, 0.0)]
    for i in range(m_elements - 1):
        psi = 2.0 * math.pi * i / max(1, m_elements - 1)
        pos.append((radius * math.cos(psi), radius * math.sin(psi)))
    y = np.zeros((m_elements, m_elements), dtype=complex)
    for i in range(m_elements):
        for j in range(m_elements):
            if i == j:
                y[i, j] = 1.0 / _ACTIVE_LOAD_OHMS
            else:
                d = math.hypot(pos[i][0] - pos[j][0], pos[i][1] - pos[j][1])
                y[i, j] = (0.002 - 0.001j) / (1.0 + 8.0 * d)
    return y


@dataclass(frozen=True)
class EsparConfig:
    """Antenna description: element count, coupling matrix, feed, geometry."""

    m_elements: int
    admittance: np.ndarray = None            # M x M complex, symmetric
    feed_voltage: complex = 1.0 + 0.0j
    radius_wavelengths: float = DEFAULT_RADIUS_WAVELENGTHS
    element_angles: tuple = None             # M-1 parasitic angles, radians

    def __post_init__(self) -> None:
        if self.m_elements < 1:
            raise ValueError(f"m_elements must be >= 1, got {self.m_elements}")
        if self.admittance is None:
            object.__setattr__(self, "admittance", synthetic_admittance(self.m_elements))
        y = np.asarray(self.admittance, dtype=complex)
        if y.shape != (self.m_elements, self.m_elements):
            raise ValueError(
                f"admittance must be {self.m_elements}x{self.m_elements}, got {y.shape}"
            )
        if not np.allclose(y, y.T, rtol=1e-10, atol=1e-14):
            raise ValueError("admittance must be symmetric (reciprocity)")
        object.__setattr__(self, "admittance", y)
        if self.m_elements > 1 and not self.radius_wavelengths > 0.0:
            raise ValueError("radius_wavelengths must be > 0 for multi-element arrays")
        if self.element_angles is None:
            n_par = self.m_elements - 1
            angles = tuple(2.0 * math.pi * i / n_par for i in range(n_par)) if n_par else ()
            object.__setattr__(self, "element_angles", angles)
        elif len(self.element_angles) != self.m_elements - 1:
            raise ValueError(
                f"need {self.m_elements - 1} parasitic angles, got {len(self.element_angles)}"
            )

    def element_polar(self) -> list[tuple[float, float]]:
        """(radius, angle) per element; the active element sits at the origin."""
        return [(0.0, 0.0)] + [(self.radius_wavelengths, a) for a in self.element_angles]


@dataclass
class BasisSet:
    """Orthonormal basis patterns sampled on a uniform angle grid."""

    theta_grid: np.ndarray     # quadrature nodes on [0, 2 pi)
    basis_values: np.ndarray   # (M, grid) complex, rows orthonormal under the grid
    projections: np.ndarray    # (M, M), column l = steering components onto pattern l
    weight: float              # quadrature weight 2 pi / grid size

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Trapezoidal inner product <f, g> on the periodic grid."""
        return complex(self.weight * np.sum(f * np.conj(g)))


def element_currents(cfg: EsparConfig, reactances) -> np.ndarray:
    """Element currents v_s (Y^-1 + X)^-1 u for loads X = diag(50, j x_1, ...).

    Raises :class:`DegenerateLoadError` when the load network's condition
    estimate exceeds 1e12.
    """
    x = np.asarray(reactances, dtype=float)
    if x.shape != (cfg.m_elements - 1,):
        raise ValueError(f"expected {cfg.m_elements - 1} reactances, got shape {x.shape}")
    loads = np.concatenate(([complex(_ACTIVE_LOAD_OHMS)], 1j * x))
    system = np.linalg.inv(cfg.admittance) + np.diag(loads)
    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise DegenerateLoadError(
            f"load network is numerically singular (condition estimate {cond:.3e})"
        )
    u = np.zeros(cfg.m_elements, dtype=complex)
    u[0] = 1.0
    return complex(cfg.feed_voltage) * np.linalg.solve(system, u)


def steering_vector(cfg: EsparConfig, theta) -> np.ndarray:
    """Steering components a_m(theta) = exp(j 2 pi r_m cos(theta - psi_m)).

    The centered active element contributes a constant 1.  ``theta`` may be
    scalar or an array; the result has shape (M, ...) matching theta.
    """
    th = np.asarray(theta, dtype=float)
    rows = []
    for r, psi in cfg.element_polar():
        rows.append(np.exp(2j * math.pi * r * np.cos(th - psi)))
    return np.stack(rows)


def build_basis(cfg: EsparConfig, grid_size: int) -> BasisSet:
    """Gram-Schmidt orthonormalization of the steering components on a grid.

    The trapezoidal rule on a uniform periodic grid is spectrally accurate
    for these trigonometric integrands, so grid_size >= 4 M suffices.
    """
    if grid_size < 4 * cfg.m_elements:
        raise ValueError(f"grid_size must be >= 4*M = {4 * cfg.m_elements}, got {grid_size}")
    theta = np.arange(grid_size) * (2.0 * math.pi / grid_size)
    weight = 2.0 * math.pi / grid_size
    a = steering_vector(cfg, theta)  # (M, grid)

    def ip(f, g):
        return weight * np.sum(f * np.conj(g))

    m = cfg.m_elements
    basis = np.zeros_like(a)
    proj = np.zeros((m, m), dtype=complex)
    for l in range(m):
        v = a[l].copy()
        # Two MGS passes keep orthogonality at roundoff level.
        for _ in range(2):
            for k in range(l):
                v -= ip(v, basis[k]) * basis[k]
        norm = math.sqrt(abs(ip(v, v)))
        if norm < 1e-10 * math.sqrt(abs(ip(a[l], a[l]).real)):
            raise RankDeficientGeometryError(
                f"steering component {l} is linearly dependent on earlier ones "
                "(coincident element positions?)"
            )
        basis[l] = v / norm
    for row in range(m):
        for col in range(m):
            proj[row, col] = ip(a[row], basis[col])
    return BasisSet(theta_grid=theta, basis_values=basis, projections=proj, weight=weight)


def pattern_weights(currents, basis: BasisSet) -> np.ndarray:
    """Basis-pattern weights w_l = i^T q_l from element currents."""
    i = np.asarray(currents, dtype=complex)
    m = basis.projections.shape[0]
    if i.shape != (m,):
        raise ValueError(f"expected {m} currents, got shape {i.shape}")
    return i @ basis.projections


def pattern_value(currents, cfg: EsparConfig, theta) -> complex:
    """Radiation pattern P(theta) = i^T a(theta) at an arbitrary angle."""
    i = np.asarray(currents, dtype=complex)
    a = steering_vector(cfg, theta)
    if i.shape != (a.shape[0],):
        raise ValueError(f"expected {a.shape[0]} currents, got shape {i.shape}")
    out = np.tensordot(i, a, axes=(0, 0))
    return complex(out) if out.ndim == 0 else out
