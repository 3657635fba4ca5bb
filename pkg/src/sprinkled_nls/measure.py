"""Locally finite measures and the slowly varying weight built from them.

The weight machinery discretizes the measure into unit-interval masses
mu(I_k), I_k = [k-1/2, k+1/2), and forms

    N_k^2 = 4 + max(0, sup over occupied intervals l of mu(I_l)^2 - |k-l|),

then interpolates linearly between integers:

    w(x) = (1+k-x) N_k^2 + (x-k) N_{k+1}^2   for x in [k, k+1).

N_k^2 >= 4, neighbouring values differ by at most 1, w is 1-Lipschitz, and
w(x) grows at most like N_0^2 + |x|.  The weighted norm ||f||^2 = int |f|^2 w
is equivalent to the block sum over unit intervals sum_k N_k^2 ||chi_k f||^2
with a smooth partition of unity chi_k.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bump import raw_bump
from .field import FLOAT_FMT, Grid, GriddedDensity, WaveField
from .point_process import AtomicMeasure

__all__ = [
    "Measure",
    "WeightProfile",
    "interval_mass",
    "weight_profile",
    "nk_squared",
    "weight",
    "chi",
    "weighted_l2_norm",
    "block_norm",
    "save_profile_csv",
    "save_weight_csv",
]

BASELINE_NK_SQUARED = 4.0


@dataclass(frozen=True)
class Measure:
    """Atomic part plus optional absolutely continuous part on a grid."""

    atoms: AtomicMeasure | None = None
    density: GriddedDensity | None = None

    def __post_init__(self):
        if self.atoms is None and self.density is None:
            raise ValueError("measure needs an atomic or a density part")

    @property
    def window(self) -> tuple[float, float]:
        if self.atoms is not None:
            return self.atoms.window
        g = self.density.grid
        return (-g.half_length, g.half_length)

    def total_mass(self) -> float:
        total = 0.0
        if self.atoms is not None:
            total += self.atoms.total_mass()
        if self.density is not None:
            total += self.density.integral()
        return total


def _as_measure(mu) -> Measure:
    if isinstance(mu, Measure):
        return mu
    if isinstance(mu, AtomicMeasure):
        return Measure(atoms=mu)
    raise TypeError("expected Measure or AtomicMeasure")


def _density_interval_mass(d: GriddedDensity, lo: float, hi: float) -> float:
    """Trapezoid of the density over [lo, hi] with interpolated endpoints."""
    g = d.grid
    lo = max(lo, -g.half_length)
    hi = min(hi, g.x[-1])
    if hi <= lo:
        return 0.0
    i0 = int(np.ceil((lo + g.half_length) / g.dx - 1e-12))
    i1 = int(np.floor((hi + g.half_length) / g.dx + 1e-12))
    v_lo = float(np.interp(lo, g.x, d.values))
    v_hi = float(np.interp(hi, g.x, d.values))
    nodes = [lo, *g.x[i0:i1 + 1], hi]
    vals = [v_lo, *d.values[i0:i1 + 1], v_hi]
    return float(np.trapezoid(vals, nodes))


def interval_mass(mu, k: int) -> float:
    """mu(I_k) with I_k = [k-1/2, k+1/2); atoms on the right edge belong to
    the next interval."""
    m = _as_measure(mu)
    total = 0.0
    if m.atoms is not None:
        pos = m.atoms.positions
        inside = (pos >= k - 0.5) & (pos < k + 0.5)
        total += float(np.sum(m.atoms.masses[inside]))
    if m.density is not None:
        total += _density_interval_mass(m.density, k - 0.5, k + 0.5)
    return total


@dataclass(frozen=True)
class WeightProfile:
    """N_k^2 over a range of integers wide enough to reach the baseline.

    Outside [k_start, k_end] the profile continues exactly as
    max(4, edge value - distance), because every occupied interval lies inside
    the covered range and each unit of distance lowers the sup by exactly one.
    """

    k_start: int
    nk_squared_values: np.ndarray
    window: tuple[float, float]

    def __post_init__(self):
        v = np.asarray(self.nk_squared_values, dtype=float).copy()
        v.setflags(write=False)
        object.__setattr__(self, "nk_squared_values", v)

    @property
    def k_end(self) -> int:
        return self.k_start + len(self.nk_squared_values) - 1

    def nk_squared(self, k) -> np.ndarray:
        """N_k^2 for integer (array) k, using the exact analytic extension."""
        k = np.asarray(k, dtype=np.int64)
        clipped = np.clip(k, self.k_start, self.k_end)
        dist = np.abs(k - clipped)
        vals = self.nk_squared_values[clipped - self.k_start]
        return np.maximum(BASELINE_NK_SQUARED, vals - dist)

    def weight(self, x) -> np.ndarray:
        """Piecewise-linear weight w(x) interpolating N_k^2 at the integers."""
        x = np.asarray(x, dtype=float)
        k = np.floor(x).astype(np.int64)
        frac = x - k
        left = self.nk_squared(k)
        right = self.nk_squared(k + 1)
        return left + frac * (right - left)


def _occupied_interval_masses(m: Measure) -> tuple[np.ndarray, np.ndarray]:
    """Indices and masses of unit intervals carrying positive mass."""
    masses: dict[int, float] = {}
    if m.atoms is not None and m.atoms.count:
        ls = np.floor(m.atoms.positions + 0.5).astype(np.int64)
        for l, mass in zip(ls, m.atoms.masses):
            masses[int(l)] = masses.get(int(l), 0.0) + float(mass)
    if m.density is not None:
        g = m.density.grid
        l_lo = int(np.floor(-g.half_length + 0.5))
        l_hi = int(np.ceil(g.half_length + 0.5))
        for l in range(l_lo, l_hi + 1):
            dm = _density_interval_mass(m.density, l - 0.5, l + 0.5)
            if dm > 0:
                masses[l] = masses.get(l, 0.0) + dm
    if not masses:
        return np.empty(0, dtype=np.int64), np.empty(0)
    ls = np.array(sorted(masses), dtype=np.int64)
    return ls, np.array([masses[int(l)] for l in ls])


def weight_profile(mu) -> WeightProfile:
    """Compute N_k^2 over the window plus a margin that provably reaches 4."""
    m = _as_measure(mu)
    ls, lmass = _occupied_interval_masses(m)
    a, b = m.window
    if ls.size == 0:
        k_start = int(np.floor(a))
        ks = np.arange(k_start, int(np.ceil(b)) + 1)
        return WeightProfile(k_start, np.full(ks.size, BASELINE_NK_SQUARED), m.window)
    margin = 2 * int(np.ceil(BASELINE_NK_SQUARED + np.max(lmass) ** 2))
    k_start = int(min(np.floor(a), ls.min())) - margin
    k_end = int(max(np.ceil(b), ls.max())) + margin
    ks = np.arange(k_start, k_end + 1)
    # sup over occupied intervals of mass^2 - |k - l|, floored at 0
    contrib = lmass[None, :] ** 2 - np.abs(ks[:, None] - ls[None, :])
    sup = np.maximum(0.0, contrib.max(axis=1))
    return WeightProfile(k_start, BASELINE_NK_SQUARED + sup, m.window)


def nk_squared(mu, k) -> np.ndarray:
    """N_k^2 directly from a measure (convenience wrapper)."""
    return weight_profile(mu).nk_squared(k)


def weight(mu, x) -> np.ndarray:
    """w(x) directly from a measure (convenience wrapper)."""
    return weight_profile(mu).weight(x)


def chi(x, k: int) -> np.ndarray:
    """Smooth partition of unity over unit intervals: chi_k(x) = chi(x - k),
    supported on (k-1, k+1), with sum_k chi_k = 1 identically."""
    x = np.asarray(x, dtype=float) - k
    floor = np.floor(x)
    frac = x - floor
    denom = raw_bump(frac) + raw_bump(frac - 1.0)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = raw_bump(x[inside]) / denom[inside]
    return out


def _upsampled_abs2(f: WaveField, refinement: int) -> np.ndarray:
    """|f|^2 sampled on the refinement-times-finer grid via zero-padded FFT
    (exact for the trigonometric interpolant of f)."""
    if refinement == 1:
        v = f.values
        return v.real**2 + v.imag**2
    n = f.grid.n
    fhat = np.fft.fft(f.values)
    pad = np.zeros(n * refinement, dtype=np.complex128)
    half = n // 2
    pad[:half] = fhat[:half]
    pad[-(half - 1):] = fhat[-(half - 1):]
    # split the shared Nyquist bin symmetrically
    pad[half] = 0.5 * fhat[half]
    pad[-half] = 0.5 * fhat[half]
    fine = np.fft.ifft(pad) * refinement
    return fine.real**2 + fine.imag**2


def _auto_refinement(n: int) -> int:
    return max(1, min(32, (1 << 17) // n))


def weighted_l2_norm(f: WaveField, mu, *, profile: WeightProfile | None = None,
                     refinement: int | None = None) -> float:
    """Weighted norm ( int |f|^2 w(x; mu) dx )^(1/2) by periodic trapezoid.

    |f|^2 is band-limit upsampled before quadrature so the kinks of the
    piecewise-linear weight at the integers cost ~(dx/refinement)^2 instead of
    dx^2; the default refinement targets ~1e5 quadrature nodes.
    """
    if profile is None:
        profile = weight_profile(mu)
    r = _auto_refinement(f.grid.n) if refinement is None else max(1, int(refinement))
    dens = _upsampled_abs2(f, r)
    n_fine = f.grid.n * r
    x_fine = -f.grid.half_length + (2.0 * f.grid.half_length / n_fine) * np.arange(n_fine)
    w = profile.weight(x_fine)
    return float(np.sqrt(np.sum(dens * w) * (f.grid.dx / r)))


def block_norm(f: WaveField, mu, *, profile: WeightProfile | None = None,
               ks: Iterable[int] | None = None) -> float:
    """( sum_k N_k^2 ||chi_k f||_{L^2}^2 )^(1/2) over the window (plus margin)."""
    if profile is None:
        profile = weight_profile(mu)
    g = f.grid
    if ks is None:
        ks = range(int(np.floor(-g.half_length)) - 1,
                   int(np.ceil(g.half_length)) + 2)
    ks = np.asarray(list(ks), dtype=np.int64)
    v2 = f.values.real**2 + f.values.imag**2
    total = 0.0
    for k in ks:
        c = chi(g.x, int(k))
        total += float(profile.nk_squared(int(k))) * float(np.sum(c * c * v2)) * g.dx
    return float(np.sqrt(total))


# --- serialization ---

def save_profile_csv(p: WeightProfile, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("k,nk_squared\n")
        for i, v in enumerate(p.nk_squared_values):
            fh.write(f"{p.k_start + i:d},{v:.17g}\n")


def save_weight_csv(p: WeightProfile, grid: Grid, path) -> None:
    w = p.weight(grid.x)
    with open(path, "w", newline="\n") as fh:
        fh.write("x,w\n")
        for x, v in zip(grid.x, w):
            fh.write(f"{x:.17g},{v:.17g}\n")
