"""Mollified densities and truncated potentials on the solver grid.

An atomic measure is smeared by the width-eps bump kernel.  The kernel is
sampled on the grid and each atom's samples are renormalized to carry exactly
the atom's mass (conservative deposition), so the grid integral of the density
equals the measure's total mass to float precision at every admissible
resolution.  The potential used by the regularized flow is either the density
itself ("mollified_only") or the density multiplied by the smooth plateau that
is 1 on [-1/eps, 1/eps] and vanishes beyond 2/eps ("fully_truncated").
"""
from __future__ import annotations

import numpy as np

from .bump import bump, cutoff
from .errors import ResolutionError
from .field import Grid, GriddedDensity
from .measure import _as_measure

__all__ = [
    "VARIANTS",
    "GriddedDensity",
    "check_resolution",
    "mollified_density",
    "truncated_potential",
]

VARIANTS = ("fully_truncated", "mollified_only")


def check_resolution(grid: Grid, eps: float) -> None:
    """Reject grids with fewer than four points across the kernel support.

    Quadrature quality degrades gracefully down to that point (relative mass
    error of the raw sampled kernel is ~2e-4 at dx = eps/8 and ~5e-3 at
    dx = eps/2); below it the sampled kernel can miss atoms entirely.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    if grid.dx > eps / 2:
        raise ResolutionError(
            f"grid spacing {grid.dx:.6g} exceeds eps/2 = {eps / 2:.6g}; "
            "refine the grid or increase eps")


def mollified_density(mu, grid: Grid, eps: float) -> GriddedDensity:
    """Width-eps mollification of a measure, sampled on the grid.

    Atomic part: per-atom deposition of the sampled bump kernel, renormalized
    to the atom's exact mass.  Density part (if any): spectral convolution
    with the same discrete kernel.
    """
    m = _as_measure(mu)
    check_resolution(grid, eps)
    values = np.zeros(grid.n)
    if m.atoms is not None and m.atoms.count:
        L, dx, n = grid.half_length, grid.dx, grid.n
        for y, mass in zip(m.atoms.positions, m.atoms.masses):
            i0 = max(0, int(np.ceil((y - eps + L) / dx)))
            i1 = min(n - 1, int(np.floor((y + eps + L) / dx)))
            if i1 < i0:
                continue
            xs = -L + dx * np.arange(i0, i1 + 1)
            k = bump((xs - y) / eps) / eps
            s = k.sum() * dx
            if s <= 0.0:
                continue
            values[i0:i1 + 1] += (mass / s) * k
    if m.density is not None:
        if m.density.grid != grid:
            raise ValueError("density part must live on the target grid")
        k = bump(grid.x / eps) / eps
        khat = np.fft.fft(np.fft.ifftshift(k / k.sum()))
        values += np.real(np.fft.ifft(np.fft.fft(m.density.values) * khat))
    return GriddedDensity(grid, np.maximum(values, 0.0))


def truncated_potential(mu, grid: Grid, eps: float,
                        variant: str = "fully_truncated") -> GriddedDensity:
    """Potential for the regularized flow; non-negative by construction."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    dens = mollified_density(mu, grid, eps)
    if variant == "mollified_only":
        return dens
    return GriddedDensity(grid, dens.values * cutoff(grid.x, eps))
