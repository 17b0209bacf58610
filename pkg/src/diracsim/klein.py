"""Klein dynamics against a linear potential V = alpha * x.

1+1: H = c sigma_x p_x + mc^2 sigma_z + alpha x.  A packet riding the
positive branch is swept through the band crossing; the transmitted
probability follows the Landau-Zener / Sauter law
T = exp(-pi m^2 c^4 / (c alpha)) per momentum mode.

2+1 with an x-only gradient: p_y is conserved, and for fixed p_y the
pair c sigma_y p_y + m c^2 sigma_z is one effective mass term
mtilde c^2 sigma_tilde with mtilde c^2 = sqrt(p_y^2 c^2 + m^2 c^4), so
the dynamics decomposes into independent 1+1 problems per p_y slice.
A direct 2D evolution of the same Hamiltonian is kept as an oracle for
that decomposition.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dirac import SimParams, dispersion
from .errors import GuardError, MeasurementError
from .grids import POSITION, Grid1D, SpinorField1D, gaussian_spinor_field
from .pauli import su2_phase_table
from .splitting import LEAK_THRESHOLD, EvolutionMonitor, strang_evolve
from . import dirac

__all__ = [
    "KleinParams",
    "EffectiveMass",
    "effective_mass",
    "transmission_formula",
    "group_velocity",
    "klein_packet",
    "evolve_klein_1p1",
    "evolve_klein_1p1_series",
    "klein_energy",
    "transmission_split_point",
    "measure_transmission",
    "SpinorSlices2D",
    "make_klein_slices",
    "evolve_klein_2p1_decomposed",
    "measure_slice_transmissions",
    "Field2D",
    "reconstruct_position_space",
    "slices_from_position_space",
    "evolve_klein_2p1_direct",
]


@dataclass(frozen=True)
class KleinParams:
    base: SimParams
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("potential gradient alpha must be positive")


@dataclass(frozen=True)
class EffectiveMass:
    """Effective mass and mass-axis direction for one p_y slice."""

    m_tilde: float
    n_y: float
    n_z: float
    c: float
    degenerate: bool = False

    @property
    def mc2(self):
        return self.m_tilde * self.c**2

    @property
    def axis(self):
        return (0.0, self.n_y, self.n_z)


def effective_mass(p_y, params):
    """mtilde c^2 = sqrt(p_y^2 c^2 + m^2 c^4), axis (0, p_y/(mtilde c), m/mtilde).

    The massless p_y = 0 point has no preferred direction; (0, 1) is
    returned by convention with the degenerate flag set.
    """
    c = params.c
    mc2 = np.sqrt(p_y**2 * c**2 + params.m**2 * c**4)
    if mc2 == 0.0:
        return EffectiveMass(0.0, 0.0, 1.0, c, degenerate=True)
    m_tilde = mc2 / c**2
    return EffectiveMass(float(m_tilde), float(p_y / (m_tilde * c)), float(params.m / m_tilde), c)


def transmission_formula(em, kp):
    """Mode transmission through the linear ramp: exp(-pi mtilde^2 c^4 / (c alpha))."""
    return math.exp(-math.pi * em.mc2**2 / (kp.base.c * kp.alpha))


def group_velocity(p_x, p_y, params):
    """v_g = c^2 p_x / sqrt(c^2 p_x^2 + mtilde(p_y)^2 c^4)."""
    em = effective_mass(p_y, params)
    return params.c**2 * p_x / np.sqrt(params.c**2 * p_x**2 + em.mc2**2)


def _effective_params(kp, em=None):
    if em is None:
        return kp.base.mc2, kp.base.mass_axis
    return em.mc2, em.axis


def _kinetic_matrices(grid, c, mc2, axis):
    """H(p) = c p sigma_x + mc2 axis.sigma as an (n, 2, 2) Hermitian stack."""
    p = grid.p
    nx, ny, nz = axis
    ax = c * p + mc2 * nx
    ay = np.full_like(p, mc2 * ny)
    az = np.full_like(p, mc2 * nz)
    h = np.empty((grid.n_points, 2, 2), dtype=complex)
    h[:, 0, 0] = az
    h[:, 0, 1] = ax - 1j * ay
    h[:, 1, 0] = ax + 1j * ay
    h[:, 1, 1] = -az
    return h


def klein_energy(values, grid, kp, mc2=None, axis=None, x_ref=None):
    """<H> of raw position-space values (kinetic in p, potential in x)."""
    if mc2 is None:
        mc2 = kp.base.mc2
    if axis is None:
        axis = kp.base.mass_axis
    if x_ref is None:
        x_ref = grid.center
    h = _kinetic_matrices(grid, kp.base.c, mc2, axis)
    fk = np.fft.fft(values, axis=0)
    # physical momentum amplitudes carry dx/sqrt(2 pi); with dp the
    # kinetic expectation weight reduces to dx/n
    w = grid.dx / grid.n_points
    kin = np.real(np.einsum("ka,kab,kb->", np.conj(fk), h, fk)) * w
    v = kp.alpha * (grid.x - x_ref)
    rho = np.sum(np.abs(values) ** 2, axis=1)
    pot = float(np.sum(v * rho) * grid.dx)
    return kin + pot


def klein_packet(grid, kp, x0, sigma, p0, em=None):
    """Positive-energy-projected Gaussian packet for a (possibly effective) mass."""
    mc2, axis = _effective_params(kp, em)
    params = SimParams(kp.base.c, mc2 / kp.base.c**2 if mc2 > 0 else 0.0, axis if mc2 > 0 else dirac.MASS_AXIS_Z)
    f = gaussian_spinor_field(grid, x0, sigma, p0, (1.0, 0.0))
    return dirac.project_positive_energy(f, params)


def _strang_phases(grid, kp, mc2, axis, x_ref, dt):
    h = _kinetic_matrices(grid, kp.base.c, mc2, axis)
    ax = np.real(h[:, 1, 0])
    ay = np.imag(h[:, 1, 0])
    az = np.real(h[:, 0, 0])
    kin = su2_phase_table(np.zeros_like(ax), ax, ay, az, dt)
    v = kp.alpha * (grid.x - x_ref)
    pot_half = np.exp(-0.5j * v * dt)
    return kin, pot_half


def evolve_klein_1p1(
    psi0,
    kp,
    dt,
    t,
    *,
    em=None,
    x_ref=None,
    monitor=None,
    leak_threshold=LEAK_THRESHOLD,
):
    """Strang evolution under c sigma_x p + mc2 sigma_axis + alpha (x - x_ref).

    The potential is recentered on the box center by default so the
    working window sits symmetrically around the turning region.  Pass
    em=EffectiveMass(...) to evolve one p_y slice of the 2+1 problem.
    """
    if t == 0.0:
        return psi0
    grid = psi0.grid
    if x_ref is None:
        x_ref = grid.center
    mc2, axis = _effective_params(kp, em)
    n_steps = max(1, int(math.ceil(t / dt - 1e-12)))
    dt_actual = t / n_steps
    kin, pot_half = _strang_phases(grid, kp, mc2, axis, x_ref, dt_actual)
    energy = None
    if monitor is not None:
        energy = lambda vals: klein_energy(vals, grid, kp, mc2, axis, x_ref)
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


def evolve_klein_1p1_series(psi0, kp, dt, times, **kwargs):
    """Snapshots of the 1+1 Klein evolution at the requested times."""
    times = list(times)
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("times must be strictly ascending")
    out = []
    current, t_now = psi0, 0.0
    for t in times:
        if t < 0:
            raise ValueError("times must be non-negative")
        current = evolve_klein_1p1(current, kp, dt, t - t_now, **kwargs)
        t_now = t
        out.append(current)
    return out


def transmission_split_point(psi0, kp, sigma, x_ref=None):
    """Classical turning point of the packet plus three packet widths.

    x_t = <H>/alpha locates the ramp height matching the mean energy;
    the 3 sigma offset keeps the split clear of the turning region.
    """
    grid = psi0.grid
    if x_ref is None:
        x_ref = grid.center
    e0 = klein_energy(psi0.values, grid, kp, x_ref=x_ref)
    return e0 / kp.alpha + x_ref + 3.0 * sigma


def measure_transmission(psi, x_split, window=None, overlap_limit=1e-2):
    """Probability weight beyond x_split, once the lobes have separated.

    Declares the measurement inconclusive when more than overlap_limit
    of the probability sits inside the split window (lobes still
    overlapping there).
    """
    if psi.rep != POSITION:
        raise ValueError("measure_transmission needs a position-space field")
    grid = psi.grid
    if window is None:
        window = 0.02 * grid.length
    rho = psi.density()
    total = np.sum(rho)
    in_window = np.sum(rho[np.abs(grid.x - x_split) <= window]) / total
    if in_window > overlap_limit:
        raise MeasurementError(
            f"inconclusive: {in_window:.3f} of the probability lies in the "
            f"split window around x = {x_split:g}"
        )
    return float(np.sum(rho[grid.x > x_split]) / total)


# ---------------------------------------------------------------------------
# 2+1 by p_y decomposition


class SpinorSlices2D:
    """psi(x, p_y, s): one 1+1 spinor field per conserved p_y value."""

    def __init__(self, grid, p_y, values):
        p_y = np.asarray(p_y, dtype=float)
        values = np.asarray(values, dtype=complex)
        if p_y.ndim != 1:
            raise ValueError("p_y must be a 1D lattice")
        if p_y.size > 1:
            d = np.diff(p_y)
            if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-9 * abs(d[0]):
                raise ValueError("p_y lattice must be uniform ascending")
        if values.shape != (p_y.size, grid.n_points, 2):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"({p_y.size}, {grid.n_points}, 2)"
            )
        self.grid = grid
        self.p_y = p_y
        self.values = values
        self.values.flags.writeable = False
        self.p_y.flags.writeable = False

    @property
    def n_slices(self):
        return self.p_y.size

    @property
    def dpy(self):
        return float(self.p_y[1] - self.p_y[0]) if self.p_y.size > 1 else 1.0

    def slice_field(self, index):
        return SpinorField1D(self.grid, self.values[index], POSITION)

    def slice_norms(self):
        rho = np.sum(np.abs(self.values) ** 2, axis=(1, 2)) * self.grid.dx
        return np.sqrt(rho)

    def global_norm(self):
        return float(np.sqrt(np.sum(self.slice_norms() ** 2) * self.dpy))

    def slice_densities(self, normalize_slices=False):
        """|psi(x, p_y)|^2 as an (n_slices, n_x) array."""
        rho = np.sum(np.abs(self.values) ** 2, axis=2)
        if normalize_slices:
            norms = np.sum(rho, axis=1, keepdims=True) * self.grid.dx
            norms[norms == 0.0] = 1.0
            rho = rho / norms
        return rho


def make_klein_slices(grid, kp, p_y, x0, sigma, p0, weights=None):
    """Initial 2+1 state: per-slice projected Gaussian, weighted in p_y.

    weights may be an explicit array or a Gaussian width sigma_py
    (float); slices are individually normalized in x, then scaled so the
    global norm is 1.
    """
    p_y = np.asarray(p_y, dtype=float)
    if weights is None:
        w = np.ones_like(p_y)
    elif np.isscalar(weights):
        w = np.exp(-(p_y**2) / (2.0 * float(weights) ** 2))
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != p_y.shape:
            raise ValueError("weights must match the p_y lattice")
    dpy = float(p_y[1] - p_y[0]) if p_y.size > 1 else 1.0
    amps = np.sqrt(w / (np.sum(w) * dpy))
    vals = np.empty((p_y.size, grid.n_points, 2), dtype=complex)
    for i, py in enumerate(p_y):
        em = effective_mass(py, kp.base)
        f = klein_packet(grid, kp, x0, sigma, p0, em=em)
        vals[i] = amps[i] * f.values
    return SpinorSlices2D(grid, p_y, vals)


def evolve_klein_2p1_decomposed(slices, kp, dt, t, *, x_ref=None, monitors=None, leak_threshold=LEAK_THRESHOLD):
    """Evolve every p_y slice independently ([H, p_y] = 0).

    monitors, when given, must be a list of EvolutionMonitor (one per
    slice).  Slices are independent, so this loop is trivially
    parallelizable; results do not depend on evaluation order.
    """
    out = np.empty_like(slices.values)
    for i, py in enumerate(slices.p_y):
        em = effective_mass(py, kp.base)
        mon = monitors[i] if monitors is not None else None
        f = SpinorField1D(slices.grid, slices.values[i], POSITION)
        f = evolve_klein_1p1(
            f, kp, dt, t, em=em, x_ref=x_ref, monitor=mon, leak_threshold=leak_threshold
        )
        out[i] = f.values
    return SpinorSlices2D(slices.grid, slices.p_y, out)


def measure_slice_transmissions(slices0, slices_t, kp, sigma, x_ref=None):
    """Per-slice measured and formula transmissions.

    Returns (p_y, T_measured, T_formula) arrays; the split point is the
    slice's own turning point plus 3 sigma.
    """
    grid = slices0.grid
    if x_ref is None:
        x_ref = grid.center
    t_meas = np.empty(slices0.n_slices)
    t_form = np.empty(slices0.n_slices)
    for i, py in enumerate(slices0.p_y):
        em = effective_mass(py, kp.base)
        e0 = klein_energy(slices0.values[i], grid, kp, em.mc2, em.axis, x_ref)
        norm2 = np.sum(np.abs(slices0.values[i]) ** 2) * grid.dx
        split = e0 / norm2 / kp.alpha + x_ref + 3.0 * sigma
        f = SpinorField1D(grid, slices_t.values[i], POSITION)
        t_meas[i] = measure_transmission(f, split)
        t_form[i] = transmission_formula(em, kp)
    return slices0.p_y.copy(), t_meas, t_form


# ---------------------------------------------------------------------------
# Direct 2D evolution (oracle for the decomposition)


class Field2D:
    """Two-component field on an (x, y) product grid."""

    def __init__(self, xgrid, ygrid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (xgrid.n_points, ygrid.n_points, 2):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"({xgrid.n_points}, {ygrid.n_points}, 2)"
            )
        self.xgrid = xgrid
        self.ygrid = ygrid
        self.values = values
        self.values.flags.writeable = False

    def density(self):
        return np.sum(np.abs(self.values) ** 2, axis=2)

    def norm(self):
        return float(
            np.sqrt(np.sum(self.density()) * self.xgrid.dx * self.ygrid.dx)
        )

    def l2_distance(self, other):
        d = np.sum(np.abs(self.values - other.values) ** 2)
        return float(np.sqrt(d * self.xgrid.dx * self.ygrid.dx))


def reconstruct_position_space(slices):
    """Inverse transform p_y -> y; the y grid is the exact DFT dual.

    psi(x, y_j) = dpy/sqrt(2 pi) * sum_l psi(x, p_l) e^{i p_l y_j}.
    Unitary for a uniform lattice, so the global norm is preserved.
    """
    n = slices.n_slices
    dpy = slices.dpy
    dy = 2.0 * np.pi / (n * dpy)
    ygrid = Grid1D(n, -0.5 * n * dy, 0.5 * n * dy)
    phase = np.exp(1j * np.outer(ygrid.x, slices.p_y))
    m = (dpy / np.sqrt(2.0 * np.pi)) * phase
    vals = np.einsum("jl,lxs->xjs", m, slices.values)
    return Field2D(slices.grid, ygrid, vals)


def slices_from_position_space(f2d):
    """Forward transform y -> p_y onto the sorted dual momentum lattice."""
    ygrid = f2d.ygrid
    p_y = ygrid.p_sorted
    phase = np.exp(-1j * np.outer(p_y, ygrid.x))
    m = (ygrid.dx / np.sqrt(2.0 * np.pi)) * phase
    vals = np.einsum("lj,xjs->lxs", m, f2d.values)
    return SpinorSlices2D(f2d.xgrid, p_y, vals)


def _kinetic_phase_2d(xgrid, ygrid, kp, dt):
    px = xgrid.p[:, None]
    py = ygrid.p[None, :]
    c = kp.base.c
    ax = np.broadcast_to(c * px, (xgrid.n_points, ygrid.n_points))
    ay = np.broadcast_to(c * py, ax.shape)
    az = np.full(ax.shape, kp.base.mc2)
    return su2_phase_table(np.zeros_like(ax), ax, ay, az, dt)


def evolve_klein_2p1_direct(
    f2d, kp, dt, t, *, x_ref=None, monitor=None, leak_threshold=LEAK_THRESHOLD
):
    """Full 2D Strang evolution of c sx px + c sy py + mc^2 sz + alpha x.

    Expensive path kept as the oracle for the p_y decomposition; grids
    above 512x512 are refused.  The leak monitor watches the potential
    axis only (y is free and periodic by construction).
    """
    nx, ny = f2d.xgrid.n_points, f2d.ygrid.n_points
    if nx * ny > 512 * 512:
        raise GuardError(f"2D grid {nx}x{ny} exceeds the 512x512 memory guard")
    if t == 0.0:
        return f2d
    if x_ref is None:
        x_ref = f2d.xgrid.center
    n_steps = max(1, int(math.ceil(t / dt - 1e-12)))
    dt_actual = t / n_steps
    kin = _kinetic_phase_2d(f2d.xgrid, f2d.ygrid, kp, dt_actual)
    v = kp.alpha * (f2d.xgrid.x - x_ref)
    pot_half = np.exp(-0.5j * v * dt_actual)[:, None] * np.ones(ny)[None, :]

    from .splitting import strang_step

    values = np.array(f2d.values)
    xgrid = f2d.xgrid

    def check(vals, step):
        rho_x = np.sum(np.abs(vals) ** 2, axis=(1, 2))
        lo = xgrid.x_min + 0.05 * xgrid.length
        hi = xgrid.x_max - 0.05 * xgrid.length
        mask = (xgrid.x < lo) | (xgrid.x >= hi)
        leak = float(rho_x[mask].sum() / rho_x.sum())
        if leak > leak_threshold:
            raise GuardError(
                f"boundary leak {leak:.2e} at step {step} exceeds {leak_threshold:.0e}"
            )
        if monitor is not None:
            norm = np.sqrt(rho_x.sum() * xgrid.dx * f2d.ygrid.dx)
            monitor.record(step * dt_actual, norm, np.nan, leak)

    check(values, 0)
    for step in range(1, n_steps + 1):
        values = strang_step(values, kin, pot_half)
        if step % 25 == 0 or step == n_steps:
            check(values, step)
    return Field2D(f2d.xgrid, f2d.ygrid, values)
