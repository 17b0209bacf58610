"""Free Dirac dynamics in 1+1 (grid) and 3+1 (single momentum mode).

The 1+1 Hamiltonian is H(p) = c sigma_x p + m c^2 (n . sigma) with a
unit mass axis n orthogonal to x-hat, so that the mass term
anticommutes with the kinetic one and E(p) = sqrt(c^2 p^2 + m^2 c^4).
Free evolution is exact: each momentum mode gets its closed-form SU(2)
phase, no time stepping involved.

Zitterbewegung: a packet with both energy branches populated shows an
oscillating <x>(t) at omega = 2 E(p0) with radius
R = (1/(2 m c)) (m c^2 / E)^2 (natural units).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError, MeasurementError
from .grids import MOMENTUM, POSITION, SpinorField1D, to_momentum, to_position
from .pauli import su2_phase_table, unitary_from_hermitian
from .splitting import LEAK_THRESHOLD

__all__ = [
    "SimParams",
    "MASS_AXIS_Y",
    "MASS_AXIS_Z",
    "dispersion",
    "dirac_kinetic_phase_1p1",
    "kinetic_coefficients",
    "evolve_free",
    "positive_energy_projector",
    "project_positive_energy",
    "mean_position_trace",
    "zb_frequency_estimate",
    "zb_amplitude_estimate",
    "measure_zb_from_trace",
    "dirac_hamiltonian_3p1",
    "evolve_free_3p1_mode",
    "alpha_matrices_3p1",
]

MASS_AXIS_Z = (0.0, 0.0, 1.0)
MASS_AXIS_Y = (0.0, 1.0, 0.0)


@dataclass(frozen=True)
class SimParams:
    """Simulated relativistic constants (hbar = 1).

    mass_axis picks the Pauli matrix multiplying m c^2; sigma_z is the
    scattering convention, sigma_y the ion-implementation one, and the
    2+1 reduction uses a tilted axis in the y-z plane.
    """

    c: float
    m: float
    mass_axis: tuple = field(default=MASS_AXIS_Z)

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("speed of light must be positive")
        if self.m < 0:
            raise ValueError("mass must be non-negative")
        axis = np.asarray(self.mass_axis, dtype=float)
        if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise ValueError("mass_axis must be a unit 3-vector")
        if self.m > 0 and abs(axis[0]) > 1e-12:
            raise ValueError(
                "mass_axis must be orthogonal to sigma_x for a Dirac mass term"
            )
        object.__setattr__(self, "mass_axis", tuple(axis))

    @property
    def mc2(self):
        return self.m * self.c**2


def dispersion(p, params):
    """E(p) = sqrt(c^2 p^2 + m^2 c^4)."""
    return np.sqrt(params.c**2 * np.asarray(p, dtype=float) ** 2 + params.mc2**2)


def kinetic_coefficients(p, params):
    """Pauli-vector components of H(p) = c p sigma_x + m c^2 n.sigma."""
    p = np.asarray(p, dtype=float)
    nx, ny, nz = params.mass_axis
    ax = params.c * p + params.mc2 * nx
    ay = np.full_like(p, params.mc2 * ny)
    az = np.full_like(p, params.mc2 * nz)
    return ax, ay, az


def dirac_kinetic_phase_1p1(grid, params, dt):
    """exp(-i dt H(p)) per momentum mode, FFT-ordered, shape (n, 2, 2)."""
    ax, ay, az = kinetic_coefficients(grid.p, params)
    return su2_phase_table(np.zeros_like(ax), ax, ay, az, dt)


def evolve_free(psi, params, t):
    """Exact free evolution: one closed-form phase per momentum mode."""
    f = to_momentum(psi) if psi.rep == POSITION else psi
    u = dirac_kinetic_phase_1p1(f.grid, params, t)
    vals = np.einsum("kab,kb->ka", u, f.values)
    out = SpinorField1D(f.grid, vals, MOMENTUM)
    return to_position(out) if psi.rep == POSITION else out


def positive_energy_projector(p, params):
    """Rank-1 projector onto the E = +sqrt(c^2 p^2 + m^2 c^4) eigenspace.

    P = (I + H(p)/E)/2.  At the degenerate point E = 0 (massless, p = 0)
    the split is undefined and I/2 is returned.
    """
    ax, ay, az = kinetic_coefficients(np.asarray(p, dtype=float), params)
    e = np.sqrt(ax**2 + ay**2 + az**2)
    safe = np.where(e > 0.0, e, 1.0)
    nx, ny, nz = ax / safe, ay / safe, az / safe
    zero = e <= 0.0
    nx, ny, nz = (np.where(zero, 0.0, v) for v in (nx, ny, nz))
    proj = np.empty(np.shape(e) + (2, 2), dtype=complex)
    proj[..., 0, 0] = 0.5 * (1.0 + nz)
    proj[..., 0, 1] = 0.5 * (nx - 1j * ny)
    proj[..., 1, 0] = 0.5 * (nx + 1j * ny)
    proj[..., 1, 1] = 0.5 * (1.0 - nz)
    return proj


def project_positive_energy(psi, params):
    """Project every momentum mode of a field onto the positive branch."""
    f = to_momentum(psi) if psi.rep == POSITION else psi
    proj = positive_energy_projector(f.grid.p, params)
    vals = np.einsum("kab,kb->ka", proj, f.values)
    out = SpinorField1D(f.grid, vals, MOMENTUM).normalize()
    return to_position(out) if psi.rep == POSITION else out


def mean_position_trace(psi0, params, times, leak_threshold=LEAK_THRESHOLD):
    """<x>(t) under exact free evolution, with norms, as arrays.

    Returns (mean_x, norms).  Aborts if any sample leaks more than
    leak_threshold into the outer 5% of the box.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly ascending")
    f0 = to_momentum(psi0) if psi0.rep == POSITION else psi0
    grid = f0.grid
    ax, ay, az = kinetic_coefficients(grid.p, params)
    mean_x = np.empty(times.shape)
    norms = np.empty(times.shape)
    for i, t in enumerate(times):
        u = su2_phase_table(np.zeros_like(ax), ax, ay, az, t)
        fk = SpinorField1D(grid, np.einsum("kab,kb->ka", u, f0.values), MOMENTUM)
        fx = to_position(fk)
        leak = fx.boundary_fraction()
        if leak > leak_threshold:
            raise GuardError(
                f"boundary leak {leak:.2e} at t={t:g} exceeds {leak_threshold:.0e}"
            )
        mean_x[i] = fx.mean_x()
        norms[i] = fx.norm()
    return mean_x, norms


def zb_frequency_estimate(p0, params):
    """omega_ZB = 2 E(p0), the interference frequency of the two branches."""
    return 2.0 * float(dispersion(p0, params))


def zb_amplitude_estimate(p0, params):
    """R_ZB = (1/(2 m c)) (m c^2 / E)^2; undefined for massless particles."""
    if params.m <= 0:
        raise ValueError("Zitterbewegung amplitude is undefined for m = 0")
    e = float(dispersion(p0, params))
    return (1.0 / (2.0 * params.m * params.c)) * (params.mc2 / e) ** 2


def measure_zb_from_trace(series, times, floor_factor=3.0, min_periods=5.0):
    """Extract (angular frequency, oscillation radius) from an <x>(t) trace.

    Removes a linear drift fit, takes the dominant peak of the windowed,
    zero-padded spectrum, refines it by quadratic interpolation, and
    reports the time-domain peak deviation as the amplitude.  Raises
    MeasurementError when no peak stands floor_factor above the spectral
    floor (or the signal is at rounding level), or when fewer than
    min_periods oscillation periods were sampled.
    """
    series = np.asarray(series, dtype=float)
    times = np.asarray(times, dtype=float)
    n = series.size
    if n < 64:
        raise ValueError("need at least 64 samples")
    dts = np.diff(times)
    dt = dts[0]
    if np.max(np.abs(dts - dt)) > 1e-9 * abs(dt):
        raise ValueError("times must be uniformly spaced")

    # drift removal
    a, b = np.polyfit(times, series, 1)
    resid = series - (a * times + b)
    amplitude = float(np.max(np.abs(resid)))

    span = float(np.max(series) - np.min(series))
    if amplitude < 1e-9 * (span + 1.0):
        raise MeasurementError("no oscillation detected (signal at rounding level)")

    pad = 8
    window = np.hanning(n)
    spec = np.abs(np.fft.rfft(resid * window, n=pad * n))
    freqs = np.fft.rfftfreq(pad * n, d=dt)
    # ignore components slower than one period over the record
    k_min = int(np.ceil(pad / (n * dt) / (freqs[1] if freqs[1] > 0 else 1.0)))
    k_min = max(k_min, pad)
    mag = spec[k_min:]
    if mag.size < 8:
        raise ValueError("record too short for spectral analysis")
    k_peak = int(np.argmax(mag)) + k_min
    floor = float(np.median(mag))
    if spec[k_peak] < floor_factor * floor:
        raise MeasurementError("no oscillation detected (peak below spectral floor)")

    # quadratic refinement on the magnitude
    if 0 < k_peak < spec.size - 1:
        y0, y1, y2 = spec[k_peak - 1], spec[k_peak], spec[k_peak + 1]
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0.0 else 0.0
    else:
        shift = 0.0
    f_peak = (k_peak + shift) / (pad * n * dt)
    omega = 2.0 * np.pi * f_peak

    if (times[-1] - times[0]) * f_peak < min_periods:
        raise MeasurementError(
            f"fewer than {min_periods:g} oscillation periods sampled"
        )
    return float(omega), amplitude


# ---------------------------------------------------------------------------
# 3+1 dimensions, single momentum mode

_SIGMA = [
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
]


def dirac_hamiltonian_3p1(p_vec, params):
    """4x4 free Dirac Hamiltonian in the supersymmetric representation:

        [[0, c sigma.p - i m c^2], [c sigma.p + i m c^2, 0]].
    """
    p_vec = np.asarray(p_vec, dtype=float)
    if p_vec.shape != (3,):
        raise ValueError("p_vec must be a 3-vector")
    sp = sum(p_vec[i] * _SIGMA[i] for i in range(3))
    h = np.zeros((4, 4), dtype=complex)
    h[:2, 2:] = params.c * sp - 1j * params.mc2 * np.eye(2)
    h[2:, :2] = params.c * sp + 1j * params.mc2 * np.eye(2)
    return h


def alpha_matrices_3p1():
    """Velocity operators alpha_i = off-diag(sigma_i, sigma_i)."""
    out = []
    for s in _SIGMA:
        a = np.zeros((4, 4), dtype=complex)
        a[:2, 2:] = s
        a[2:, :2] = s
        out.append(a)
    return out


def evolve_free_3p1_mode(spinor, p_vec, params, t):
    """Evolve a single-momentum 4-spinor: exp(-i t H(p)) s."""
    spinor = np.asarray(spinor, dtype=complex)
    if spinor.shape != (4,):
        raise ValueError("spinor must have 4 components")
    h = dirac_hamiltonian_3p1(p_vec, params)
    u = unitary_from_hermitian(h, t)
    return u @ spinor
