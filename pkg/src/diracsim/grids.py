"""Uniform periodic grids and multi-component spinor fields.

Everything works in natural units (hbar = 1).  A grid of n points on
[x_min, x_max) carries the exact DFT-dual momentum lattice
p_k = 2*pi*k/(n*dx), k in [-n/2, n/2), stored in FFT order.

Fields are immutable: every operation returns a new field, so
independent fields may be processed concurrently without locking and
results never depend on evaluation order.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid1D",
    "SpinorField1D",
    "make_grid",
    "to_momentum",
    "to_position",
    "gaussian_spinor_field",
]

POSITION = "position"
MOMENTUM = "momentum"


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D position grid with its dual momentum lattice."""

    n_points: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if not isinstance(self.n_points, (int, np.integer)):
            raise ValueError("n_points must be an integer")
        if self.n_points < 8 or not _is_power_of_two(self.n_points):
            raise ValueError(
                f"n_points must be a power of two >= 8, got {self.n_points}"
            )
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_points

    @property
    def dp(self):
        return 2.0 * np.pi / (self.n_points * self.dx)

    @property
    def length(self):
        return self.x_max - self.x_min

    @property
    def center(self):
        return 0.5 * (self.x_min + self.x_max)

    @cached_property
    def x(self):
        x = self.x_min + self.dx * np.arange(self.n_points)
        x.flags.writeable = False
        return x

    @cached_property
    def p(self):
        """Momentum lattice in FFT order (0, dp, ..., -dp)."""
        p = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        p.flags.writeable = False
        return p

    @cached_property
    def p_sorted(self):
        p = np.sort(self.p)
        p.flags.writeable = False
        return p

    @property
    def p_max(self):
        return np.pi / self.dx


def make_grid(n_points, x_min, x_max):
    """Build a power-of-two grid with its dual momentum lattice."""
    return Grid1D(int(n_points), float(x_min), float(x_max))


class SpinorField1D:
    """Complex multi-component amplitudes on a Grid1D.

    values has shape (n_points, n_components); n_components is 2 for
    Pauli spinors and 4 for the two-particle spin space.  The
    representation tag records whether values sample psi(x) or the
    continuum-normalized psi(p) (momentum amplitudes on the dual
    lattice, sorted in FFT order).
    """

    def __init__(self, grid, values, rep=POSITION):
        values = np.asarray(values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != grid.n_points:
            raise ValueError(
                f"values have {values.shape[0]} rows for a {grid.n_points}-point grid"
            )
        if rep not in (POSITION, MOMENTUM):
            raise ValueError(f"unknown representation {rep!r}")
        self.grid = grid
        self.values = values
        self.rep = rep
        self.values.flags.writeable = False

    @property
    def n_components(self):
        return self.values.shape[1]

    def _weight(self):
        return self.grid.dx if self.rep == POSITION else self.grid.dp

    def density(self):
        """|psi|^2 summed over components (per unit length / momentum)."""
        return np.sum(np.abs(self.values) ** 2, axis=1)

    def norm(self):
        return float(np.sqrt(np.sum(self.density()) * self._weight()))

    def normalize(self):
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero field")
        return SpinorField1D(self.grid, self.values / n, self.rep)

    def mean_x(self):
        if self.rep != POSITION:
            raise ValueError("mean_x needs the position representation")
        rho = self.density()
        return float(np.sum(self.grid.x * rho) / np.sum(rho))

    def mean_p(self):
        f = to_momentum(self) if self.rep == POSITION else self
        rho = f.density()
        return float(np.sum(f.grid.p * rho) / np.sum(rho))

    def boundary_fraction(self, edge=0.05):
        """Probability weight inside the outer `edge` fraction of the box."""
        if self.rep != POSITION:
            raise ValueError("boundary_fraction needs the position representation")
        g = self.grid
        x = g.x
        lo = g.x_min + edge * g.length
        hi = g.x_max - edge * g.length
        rho = self.density()
        mask = (x < lo) | (x >= hi)
        total = np.sum(rho)
        if total == 0.0:
            return 0.0
        return float(np.sum(rho[mask]) / total)

    def overlap(self, other):
        """<self|other> with the representation's integration weight."""
        if self.rep != other.rep or self.grid != other.grid:
            raise ValueError("fields live on different grids/representations")
        return complex(np.sum(np.conj(self.values) * other.values) * self._weight())


def to_momentum(f):
    """Unitary change to the momentum representation.

    psi(p_k) = dx/sqrt(2 pi) * exp(-i p_k x_min) * sum_j psi(x_j) e^{-i p_k x_j'}
    so that sum |psi(p)|^2 dp = sum |psi(x)|^2 dx exactly (Parseval).
    """
    if f.rep != POSITION:
        raise ValueError("to_momentum expects a position-representation field")
    g = f.grid
    ft = np.fft.fft(f.values, axis=0)
    phase = np.exp(-1j * g.p * g.x_min)[:, None]
    vals = (g.dx / np.sqrt(2.0 * np.pi)) * phase * ft
    return SpinorField1D(g, vals, MOMENTUM)


def to_position(f):
    """Inverse of to_momentum; exact round trip."""
    if f.rep != MOMENTUM:
        raise ValueError("to_position expects a momentum-representation field")
    g = f.grid
    phased = f.values * np.exp(1j * g.p * g.x_min)[:, None]
    vals = (g.dp * g.n_points / np.sqrt(2.0 * np.pi)) * np.fft.ifft(phased, axis=0)
    return SpinorField1D(g, vals, POSITION)


def gaussian_spinor_field(grid, x0, sigma, p0, spinor, normalize=True):
    """Gaussian wavepacket times a constant spinor.

    sigma is the standard deviation of the probability density |psi|^2,
    so the momentum density has spread sigma_p = 1/(2 sigma).
    """
    spinor = np.asarray(spinor, dtype=complex)
    x = grid.x
    envelope = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * p0 * x)
    vals = envelope[:, None] * spinor[None, :]
    f = SpinorField1D(grid, vals, POSITION)
    return f.normalize() if normalize else f
