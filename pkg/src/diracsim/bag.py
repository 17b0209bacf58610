"""Two 1+1 Dirac particles bound by a quadratic potential (bag analogue).

In the relative coordinate x_r = x1 - x3 with the total momentum P_cm
entering as a conserved parameter,

    H = c (sx1 - sx3) p_r + c (sx1 + sx3) P_cm/2
        + m c^2 (sy1 + sy3) + V0 x_r^2,

on the 4-component spin space of particles 1 and 3.  The spin-kinetic
block is x-independent, so Strang stepping exponentiates it exactly per
momentum mode; the potential is a scalar phase in position.

Klein tunneling drains probability onto the runaway branch where
V0 x_r^2 - E keeps accelerating the pair apart.  On a finite spectral
grid that branch's local momentum grows without bound, so the potential
can optionally be flattened to a constant beyond |x_r| >= flat_radius:
this caps the momentum of escaped probability while leaving the
confined dynamics (turning radius well inside) untouched, and it keeps
the evolution exactly unitary, unlike an absorbing layer.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dirac import SimParams
from .grids import POSITION, SpinorField1D, gaussian_spinor_field
from .pauli import unitary_from_hermitian
from .splitting import LEAK_THRESHOLD, strang_evolve

__all__ = [
    "BagParams",
    "bag_spin_kinetic_block",
    "PI_OPERATOR",
    "prepare_initial",
    "evolve_bag",
    "evolve_bag_series",
    "bag_energy",
    "klein_tunneling_fraction",
    "pi_expectation",
    "density_trace",
    "tunneling_radius",
]

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)

SX1 = np.kron(_SX, _I2)
SX3 = np.kron(_I2, _SX)
SY1 = np.kron(_SY, _I2)
SY3 = np.kron(_I2, _SY)

# Pi = (sx1 - sx3)/2, spectrum {+1, 0, 0, -1}
PI_OPERATOR = 0.5 * (SX1 - SX3)


@dataclass(frozen=True)
class BagParams:
    base: SimParams
    V0: float
    P_cm: float = 0.0
    flat_radius: float = None

    def __post_init__(self):
        if self.V0 < 0:
            raise ValueError("V0 must be non-negative")
        if self.flat_radius is not None and self.flat_radius <= 0:
            raise ValueError("flat_radius must be positive when set")


def bag_spin_kinetic_block(p_r, bp):
    """x-independent 4x4 Hermitian block at relative momentum p_r."""
    c = bp.base.c
    return (
        c * (SX1 - SX3) * p_r
        + c * (SX1 + SX3) * (bp.P_cm / 2.0)
        + bp.base.mc2 * (SY1 + SY3)
    )


def _kinetic_stack(grid, bp):
    c = bp.base.c
    p = grid.p
    base = c * (SX1 + SX3) * (bp.P_cm / 2.0) + bp.base.mc2 * (SY1 + SY3)
    return c * p[:, None, None] * (SX1 - SX3)[None] + base[None]


def potential_values(grid, bp):
    """V0 x_r^2, optionally clamped to a constant beyond flat_radius."""
    x2 = grid.x**2
    if bp.flat_radius is not None:
        x2 = np.minimum(x2, bp.flat_radius**2)
    return bp.V0 * x2


def prepare_initial(x0, sigma, p_r0, pi_sign, grid):
    """Gaussian in x_r times the Pi = +-1 eigenspinor.

    The only +-1 eigenvectors of Pi are |sx=+->_1 ⊗ |sx=-+>_3; the
    degenerate Pi = 0 sector has no preferred state and is refused.
    """
    if pi_sign == +1:
        spinor = np.kron([1.0, 1.0], [1.0, -1.0]) / 2.0
    elif pi_sign == -1:
        spinor = np.kron([1.0, -1.0], [1.0, 1.0]) / 2.0
    else:
        raise ValueError("pi_sign must be +1 or -1 (the Pi = 0 sector is unsupported)")
    return gaussian_spinor_field(grid, x0, sigma, p_r0, spinor)


def bag_energy(values, grid, bp):
    """<H> of raw position-space values."""
    h = _kinetic_stack(grid, bp)
    fk = np.fft.fft(values, axis=0)
    w = grid.dx / grid.n_points
    kin = np.real(np.einsum("ka,kab,kb->", np.conj(fk), h, fk)) * w
    rho = np.sum(np.abs(values) ** 2, axis=1)
    pot = float(np.sum(potential_values(grid, bp) * rho) * grid.dx)
    return kin + pot


def evolve_bag(
    psi0, bp, dt, t, *, monitor=None, leak_threshold=LEAK_THRESHOLD
):
    """Strang evolution of the two-particle relative-coordinate state."""
    if t == 0.0:
        return psi0
    grid = psi0.grid
    n_steps = max(1, int(math.ceil(t / dt - 1e-12)))
    dt_actual = t / n_steps
    kin = unitary_from_hermitian(_kinetic_stack(grid, bp), dt_actual)
    pot_half = np.exp(-0.5j * potential_values(grid, bp) * dt_actual)
    energy = None
    if monitor is not None:
        energy = lambda vals: bag_energy(vals, grid, bp)
    return strang_evolve(
        psi0,
        kin,
        pot_half,
        n_steps,
        dt_actual,
        energy_fn=energy,
        monitor=monitor,
        leak_threshold=leak_threshold,
    )


def evolve_bag_series(psi0, bp, dt, times, **kwargs):
    """Snapshots at the requested (ascending) times, t = 0 allowed first."""
    out = []
    current, t_now = psi0, 0.0
    for t in times:
        if t < t_now:
            raise ValueError("times must be ascending")
        current = evolve_bag(current, bp, dt, t - t_now, **kwargs)
        t_now = t
        out.append(current)
    return out


def tunneling_radius(bp):
    """x* = sqrt(2 m c^2 / V0): beyond it the ramp exceeds the pair gap."""
    if bp.V0 == 0:
        raise ValueError("tunneling radius undefined for V0 = 0")
    return math.sqrt(2.0 * bp.base.mc2 / bp.V0)


def klein_tunneling_fraction(psi, bp):
    """Probability weight at |x_r| > x*."""
    x_star = tunneling_radius(bp)
    rho = psi.density()
    total = np.sum(rho)
    outside = np.sum(rho[np.abs(psi.grid.x) > x_star])
    return float(outside / total)


def pi_expectation(psi):
    """<Pi> of a four-component relative-coordinate field."""
    vals = psi.values
    num = np.real(np.einsum("ka,ab,kb->", np.conj(vals), PI_OPERATOR, vals))
    den = np.real(np.sum(np.conj(vals) * vals))
    return float(num / den)


def density_trace(fields):
    """Stack |psi(x_r)|^2 rows for a list of snapshots (heatmap data)."""
    if not fields:
        raise ValueError("need at least one snapshot")
    grid = fields[0].grid
    rows = np.stack([f.density() for f in fields])
    return grid.x.copy(), rows
