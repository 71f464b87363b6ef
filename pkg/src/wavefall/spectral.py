"""Uniform periodic grid, its wavenumber lattice, and unitary transforms.

The domain is [-L/2, L/2) per axis with N samples, x_n = -L/2 + n L/N, and
wavenumbers k_m = (2 pi / L) m with m in standard DFT order
[0, 1, ..., N/2-1, -N/2, ..., -1].  The forward transform is referenced to
the physical coordinates,

    A_m = N^(-d/2) sum_n f(x_n) exp(-i k_m . x_n),

so the coefficients are Fourier amplitudes of the domain-centered field.
Both directions carry N^(-d/2); discrete Parseval sum|f|^2 == sum|A|^2 holds
exactly up to rounding.  Complex fields are plain complex128 ndarrays of
shape ``grid.shape`` (row-major); there is no wrapper type.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import SizeMismatch


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Periodic Cartesian lattice shared by all fields of one run."""

    dim: int
    n: int
    extent: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"points per axis must be even and >= 8, got {self.n}")
        if not self.extent > 0:
            raise ValueError(f"extent must be positive, got {self.extent}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def dx(self) -> float:
        return self.extent / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx ** self.dim

    @property
    def k_max(self) -> float:
        return np.pi * self.n / self.extent

    @cached_property
    def axis_positions(self) -> np.ndarray:
        x = -self.extent / 2.0 + np.arange(self.n) * self.dx
        x.flags.writeable = False
        return x

    @cached_property
    def axis_modes(self) -> np.ndarray:
        # standard DFT order [0..N/2-1, -N/2..-1], built from exact integers
        # (fftfreq(n)*n is not exactly integral for every even n)
        m = np.arange(self.n)
        m = np.where(m < self.n // 2, m, m - self.n).astype(float)
        m.flags.writeable = False
        return m

    @cached_property
    def axis_wavenumbers(self) -> np.ndarray:
        k = (2.0 * np.pi / self.extent) * self.axis_modes
        k.flags.writeable = False
        return k

    def _spread(self, axis_values: np.ndarray) -> tuple[np.ndarray, ...]:
        out = []
        for ax in range(self.dim):
            shape = [1] * self.dim
            shape[ax] = self.n
            out.append(axis_values.reshape(shape))
        return tuple(out)

    @cached_property
    def position_meshes(self) -> tuple[np.ndarray, ...]:
        """Broadcastable position array per axis (sparse meshes)."""
        return self._spread(self.axis_positions)

    @cached_property
    def wavenumber_meshes(self) -> tuple[np.ndarray, ...]:
        return self._spread(self.axis_wavenumbers)

    @cached_property
    def k_squared(self) -> np.ndarray:
        ksq = np.zeros(self.shape)
        for km in self.wavenumber_meshes:
            ksq = ksq + km ** 2
        ksq.flags.writeable = False
        return ksq

    @cached_property
    def _center_signs(self) -> np.ndarray:
        # exp(-i k_m x_0) = (-1)^m per axis: relates the coordinate-referenced
        # transform to the index-referenced FFT.
        sign = np.ones(self.shape)
        per_axis = np.where(self.axis_modes.astype(int) % 2 == 0, 1.0, -1.0)
        for s in self._spread(per_axis):
            sign = sign * s
        sign.flags.writeable = False
        return sign

    def _check(self, field: np.ndarray) -> np.ndarray:
        field = np.asarray(field)
        if field.shape != self.shape:
            raise SizeMismatch(f"field shape {field.shape} does not match grid {self.shape}")
        return field.astype(complex, copy=False)

    def forward(self, field: np.ndarray) -> np.ndarray:
        field = self._check(field)
        return self._center_signs * np.fft.fftn(field, norm="ortho")

    def inverse(self, field: np.ndarray) -> np.ndarray:
        field = self._check(field)
        return np.fft.ifftn(self._center_signs * field, norm="ortho")


def forward_transform(field: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Unitary coordinate-referenced DFT of a grid field."""
    return grid.forward(field)


def inverse_transform(field: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Inverse of :func:`forward_transform`."""
    return grid.inverse(field)
