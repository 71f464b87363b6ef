"""Shared fixtures-adjacent helpers: standard scenario pieces and the
independent oracles (brute-force DFT, numpy-fft spectral centroid) used to
cross-check the package's own routines."""

import numpy as np

from wavefall import (
    EvolveConfig,
    PacketShape,
    ScenarioConfig,
    SpectralGrid,
    StepScheme,
    TidalMatrix,
    make_packet,
)

# the house scenario: 1D, L=20, sigma=1, mu=100, R=1e-4, x0=2, v0=0, dt=0.1
STD_L = 20.0
STD_MASS = 100.0
STD_R = 1e-4
STD_X0 = 2.0
STD_DT = 0.1
QUARTER_PERIOD_STEPS = 1570  # ~ pi / (2 sqrt(R) dt)


def std_grid(n=256, dim=1, extent=STD_L):
    return SpectralGrid(dim=dim, n=n, extent=extent)


def std_tidal(r=STD_R):
    return TidalMatrix([[r]])


def std_packet(grid, x0=STD_X0, v0=0.0, sigma=1.0, mass=STD_MASS):
    return make_packet(grid, PacketShape.gaussian(sigma),
                       [x0] * grid.dim, [v0] * grid.dim, mass)


def std_scenario(n=256, n_steps=QUARTER_PERIOD_STEPS, dt=STD_DT, record_every=1,
                 scheme=StepScheme.STRANG, mass=STD_MASS, x0=STD_X0, v0=0.0,
                 shape=None, masses=None, shapes=None, dt_list=None, r=STD_R):
    grid = std_grid(n)
    return ScenarioConfig(
        grid=grid,
        tidal=std_tidal(r),
        shape=shape or PacketShape.gaussian(1.0),
        x0=(x0,), v0=(v0,), mass=mass,
        evolve_cfg=EvolveConfig(dt=dt, n_steps=n_steps, record_every=record_every),
        scheme=StepScheme(scheme),
        masses=masses, shapes=shapes, dt_list=dt_list,
    )


def brute_dft(field, grid):
    """O(N^2)-per-axis direct summation DFT with the coordinate-referenced
    kernel; independent of the fft-backed implementation."""
    field = np.asarray(field, dtype=complex)
    kernel = np.exp(-1j * np.outer(grid.axis_wavenumbers, grid.axis_positions)) / np.sqrt(grid.n)
    out = field
    for axis in range(grid.dim):
        out = np.tensordot(kernel, out, axes=([1], [axis]))
        out = np.moveaxis(out, 0, axis)
    return out


def npfft_centroid(psi, grid):
    """Spectral centroid <k> via raw numpy fft calls (independent route)."""
    w = np.abs(np.fft.fftn(psi)) ** 2
    total = w.sum()
    out = []
    for axis in range(grid.dim):
        k = 2.0 * np.pi / grid.extent * (np.fft.fftfreq(grid.n) * grid.n)
        shape = [1] * grid.dim
        shape[axis] = grid.n
        out.append(float((k.reshape(shape) * w).sum()) / total)
    return np.asarray(out)


def random_field(grid, rng, normalized=True):
    psi = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    if normalized:
        psi /= np.sqrt((np.abs(psi) ** 2).sum() * grid.cell_volume)
    return psi
