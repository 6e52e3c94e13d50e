"""Periodic grids, sampled wavefunctions and spectral differentiation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise ValueError(f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]")
        n = int(self.n)
        if n < 16 or n & (n - 1):
            raise ValueError(f"grid point count must be a power of two >= 16, got {self.n}")
        object.__setattr__(self, "n", n)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @cached_property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def k_max(self) -> float:
        return np.pi / self.dx


@dataclass(frozen=True, eq=False)
class WaveField:
    grid: Grid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("wave field contains non-finite samples")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def density(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2

    def norm(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def normalized(self) -> "WaveField":
        return WaveField(self.grid, self.values / math.sqrt(self.norm()), self.t)

    def with_phase(self, alpha: float) -> "WaveField":
        return WaveField(self.grid, self.values * np.exp(1j * alpha), self.t)


def spectral_derivative(f: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    """Fourier derivative of periodic samples.

    The Nyquist mode is dropped for odd orders so that real input gives
    real output.
    """
    ik = 1j * grid.k
    if order % 2 and grid.n % 2 == 0:
        ik = ik.copy()
        ik[grid.n // 2] = 0.0
    out = np.fft.ifft(ik**order * np.fft.fft(f))
    return out.real if np.isrealobj(f) else out


def check_same_grid(a: WaveField, b: WaveField) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")
