"""Matrix-valued Wigner functions, pseudospin fields and winding numbers.

The spinor Wigner function is

    W_ab(x, p) = (1/2 pi) ∫ ds  psi_a(x + s/2) psi_b*(x - s/2) e^{-i s p},

computed as a DFT of the shifted autocorrelation along s on shifts of
2 dx (so every sample stays on the grid).  Its momentum lattice has
spacing pi/(n dx), half the field's own, and the marginals reproduce
the position / momentum spin density matrices exactly on shared points.

The pseudospin field s(x, p) = Tr{W sigma} / ||Tr{W sigma}|| maps phase
space onto the Bloch sphere; its degree is evaluated as a discrete sum
of signed spherical-triangle solid angles over a triangulated grid,
compactified by fanning the boundary ring to a single averaged pole.
Counting |solid angle| instead of the signed sum gives the absolute
number of sphere coverings, which is the quantity that survives when
successive layers alternate orientation.
"""

import math
from typing import NamedTuple

import numpy as np

from .errors import MeasurementError
from .grids import POSITION, Grid1D

__all__ = [
    "WignerField",
    "wigner_spinor",
    "wigner_from_density",
    "phase_space_window",
    "PseudospinField",
    "pseudospin_field",
    "dephasing_map",
    "WindingReport",
    "winding_number",
]


class WignerField:
    """2x2 Hermitian matrix per phase-space point (x, p)."""

    def __init__(self, x, p, values):
        self.x = np.asarray(x, dtype=float)
        self.p = np.asarray(p, dtype=float)
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.x.size, self.p.size, 2, 2):
            raise ValueError(f"values shape {values.shape} inconsistent with axes")
        self.values = values
        for a in (self.x, self.p, self.values):
            a.flags.writeable = False

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def dp(self):
        return float(self.p[1] - self.p[0])

    def trace(self):
        return np.real(self.values[..., 0, 0] + self.values[..., 1, 1])

    def total(self):
        return float(np.sum(self.trace()) * self.dx * self.dp)

    def marginal_x(self):
        """∫ W dp: the position-space spin density matrix rho(x)."""
        return np.sum(self.values, axis=1) * self.dp

    def marginal_p(self):
        return np.sum(self.values, axis=0) * self.dx

    def hermiticity_defect(self):
        return float(
            np.max(np.abs(self.values - np.conj(np.swapaxes(self.values, -1, -2))))
        )

    def crop_centered(self, n_x, n_p=None):
        """Centered sub-window, e.g. to get a balanced 128x128 grid."""
        if n_p is None:
            n_p = n_x
        if n_x > self.x.size or n_p > self.p.size:
            raise ValueError("crop larger than the field")
        i0 = self.x.size // 2 - n_x // 2
        j0 = self.p.size // 2 - n_p // 2
        return WignerField(
            self.x[i0 : i0 + n_x],
            self.p[j0 : j0 + n_p],
            self.values[i0 : i0 + n_x, j0 : j0 + n_p],
        )


def wigner_spinor(psi):
    """Spinor Wigner function of a position-space field via FFT.

    The field should vanish well inside the box (support of at least
    ~8 sigma recommended); the autocorrelation wraps periodically.
    """
    if psi.rep != POSITION:
        raise ValueError("wigner_spinor needs a position-space field")
    grid = psi.grid
    n = grid.n_points
    vals = psi.values  # (n, 2)
    j = np.arange(n)
    m = np.arange(n)
    plus = (j[:, None] + m[None, :]) % n
    minus = (j[:, None] - m[None, :]) % n
    # A[j, m, a, b] = psi_a(x_j + s_m/2) psi_b*(x_j - s_m/2), s_m = 2 m dx
    a = vals[plus][:, :, :, None] * np.conj(vals[minus])[:, :, None, :]
    w = (grid.dx / np.pi) * np.fft.fft(a, axis=1)
    # dual lattice of the s-shifts: spacing pi/(n dx), half the field's own
    p = 2.0 * np.pi * np.fft.fftfreq(n, d=2.0 * grid.dx)
    order = np.argsort(p)
    return WignerField(grid.x, p[order], w[:, order])


def wigner_from_density(state, grid, cutoff=1e-14):
    """Mixed-state Wigner matrix: spectral mixture of pure-state Wigners.

    Reproduces wigner_spinor exactly for a pure state.
    """
    total = None
    for weight, field in state.spectral_fields(grid, cutoff=cutoff):
        w = wigner_spinor(field)
        contrib = weight * w.values
        if total is None:
            x, p = w.x, w.p
            total = contrib
        else:
            total = total + contrib
    if total is None:
        raise ValueError("density matrix has no weight above the cutoff")
    return WignerField(x, p, total)


def phase_space_window(n_out=128, half_width=3.6):
    """Grid whose Wigner transform has square cells covering a window.

    Square cells need pi/(n dx) = dx, so dx = sqrt(pi/n) and the
    achievable n_out-point window half-widths are quantized by the
    power-of-two grid sizes; the closest one to half_width is chosen.
    Returns (grid, actual_half_width).
    """
    best = None
    n = max(128, 2 * n_out)
    while n <= 2**16:
        hw = 0.5 * n_out * math.sqrt(np.pi / n)
        if best is None or abs(hw - half_width) < abs(best[1] - half_width):
            best = (n, hw)
        n *= 2
    n, hw = best
    dx = math.sqrt(np.pi / n)
    half_box = 0.5 * n * dx
    return Grid1D(n, -half_box, half_box), hw


def level_winding(params, level, sign=+1, n_out=128, windows=(2.5, 3.6, 5.0)):
    """Winding report of a dressed Landau level, with window auto-scan.

    Small windows may cut through the outermost polar sweep of the
    level (its last equator crossing grows with the index), large ones
    push the boundary ring below the validity threshold.  The candidate
    windows are tried in order; the first whose compactification
    succeeds with near-integer signed degree (quality < 0.05) and
    negligible excluded solid angle wins.
    """
    from .landau import landau_eigenstate

    last_error = None
    for hw in windows:
        grid, actual_hw = phase_space_window(n_out, hw)
        psi = landau_eigenstate(level, sign, params, grid)
        w = wigner_spinor(psi).crop_centered(n_out)
        ps = pseudospin_field(w)
        try:
            rep = winding_number(ps)
        except MeasurementError as exc:
            last_error = exc
            continue
        if rep.quality < 0.05 and rep.excluded_solid_angle < 0.01:
            return rep, ps, w, actual_hw
        last_error = MeasurementError(
            f"window {hw:g}: quality {rep.quality:.3f} too poor"
        )
    raise MeasurementError(
        f"no candidate window gave a clean winding for level {level}: {last_error}"
    )


class PseudospinField:
    """Unit Bloch vectors on a phase-space grid.

    Stored as (zcomp, azimuth, magnitude, mask): zcomp is the unit
    vector's z component, azimuth = atan2(v_y, v_x) its transverse
    angle, magnitude the raw ||Tr{W sigma}|| before normalization and
    mask flags points above the validity threshold.  Keeping the angle
    explicit makes transverse-only rescalings (dephasing) leave it
    bit-for-bit unchanged.
    """

    def __init__(self, x, p, zcomp, azimuth, magnitude, mask, threshold):
        self.x = np.asarray(x, dtype=float)
        self.p = np.asarray(p, dtype=float)
        self.zcomp = zcomp
        self.azimuth = azimuth
        self.magnitude = magnitude
        self.mask = mask
        self.threshold = float(threshold)
        for a in (self.zcomp, self.azimuth, self.magnitude, self.mask):
            a.flags.writeable = False

    @property
    def vectors(self):
        """(nx, np, 3) unit vectors; NaN where invalid."""
        zt = np.clip(self.zcomp, -1.0, 1.0)
        t = np.sqrt(np.maximum(0.0, 1.0 - zt**2))
        v = np.stack(
            [t * np.cos(self.azimuth), t * np.sin(self.azimuth), zt], axis=-1
        )
        v[~self.mask] = np.nan
        return v


def pseudospin_field(wigner, threshold=None):
    """s(x, p) = Tr{W sigma}/N, masked where ||Tr{W sigma}|| < threshold.

    Default threshold: 1e-6 of the largest vector magnitude.
    """
    w = wigner.values
    vx = np.real(w[..., 0, 1] + w[..., 1, 0])
    vy = np.real(1j * (w[..., 0, 1] - w[..., 1, 0]))
    vz = np.real(w[..., 0, 0] - w[..., 1, 1])
    mag = np.sqrt(vx**2 + vy**2 + vz**2)
    if threshold is None:
        threshold = 1e-6 * float(mag.max())
    mask = mag >= threshold
    safe = np.where(mag > 0.0, mag, 1.0)
    zcomp = np.where(mag > 0.0, vz / safe, np.nan)
    azimuth = np.where(mag > 0.0, np.arctan2(vy, vx), np.nan)
    return PseudospinField(wigner.x, wigner.p, zcomp, azimuth, mag, mask, threshold)


def dephasing_map(ps, gamma_t):
    """Shrink the transverse components by e^{-gamma t} and renormalize.

    The azimuth array is copied verbatim (both transverse components
    scale by the same factor), so the polar-angle field is exactly
    unchanged; points whose shrunken vector drops below the stored
    threshold fall out of the valid mask.
    """
    if gamma_t < 0:
        raise ValueError("gamma_t must be non-negative")
    f = np.exp(-gamma_t)
    zt = np.clip(ps.zcomp, -1.0, 1.0)
    vz = zt * ps.magnitude
    vt = np.sqrt(np.maximum(0.0, 1.0 - zt**2)) * ps.magnitude * f
    mag = np.sqrt(vz**2 + vt**2)
    safe = np.where(mag > 0.0, mag, 1.0)
    zcomp = np.where(mag > 0.0, vz / safe, np.nan)
    mask = mag >= ps.threshold
    return PseudospinField(
        ps.x, ps.p, zcomp, ps.azimuth.copy(), mag, mask, ps.threshold
    )


class WindingReport(NamedTuple):
    signed: float
    coverings: float
    excluded_solid_angle: float
    quality: float
    excluded_triangles: int
    boundary_angle: float


def _solid_angles(a, b, c):
    """Signed spherical-triangle solid angles of unit-vector triples."""
    triple = np.einsum("...i,...i->...", a, np.cross(b, c))
    denom = (
        1.0
        + np.einsum("...i,...i->...", a, b)
        + np.einsum("...i,...i->...", b, c)
        + np.einsum("...i,...i->...", c, a)
    )
    return 2.0 * np.arctan2(triple, denom)


def _perimeter_indices(nx, ny):
    """Boundary pixel (i, j) pairs in counterclockwise order."""
    idx = []
    idx += [(i, 0) for i in range(nx)]
    idx += [(nx - 1, j) for j in range(1, ny)]
    idx += [(i, ny - 1) for i in range(nx - 2, -1, -1)]
    idx += [(0, j) for j in range(ny - 2, 0, -1)]
    return np.array(idx)


def winding_number(ps, boundary_spread_max=1.5, clamp_radius=None):
    """Discrete degree of the pseudospin map and its absolute coverings.

    Phase space is compactified by its constant direction at large
    radius: outside the inscribed circle (radius clamp_radius, default
    the largest circle fitting the window) the field is replaced by the
    averaged direction of the annulus just inside, the grid boundary
    ring then maps to that single pole, and a closing fan completes the
    sphere.  This is exact whenever the tail beyond the circle is
    structureless; for the dressed oscillator levels the transverse
    fraction decays monotonically (though only like 1/r, so the annulus
    sits on a wide cone rather than at the pole itself).  The annulus
    must be valid and confined to a cone of half-angle
    boundary_spread_max around its mean, otherwise the field is
    reported as non-compact; the measured cone angle is returned so
    callers can judge how much solid angle the closure contributed.
    Triangles touching invalid interior points are excluded from the
    sums; their estimated solid angle (from the sub-threshold
    directions, where defined) is reported separately.
    """
    nx, ny = ps.zcomp.shape
    # directions everywhere the raw vector is nonzero, valid or not
    zt = np.clip(ps.zcomp, -1.0, 1.0)
    t = np.sqrt(np.maximum(0.0, 1.0 - zt**2))
    vec = np.stack([t * np.cos(ps.azimuth), t * np.sin(ps.azimuth), zt], axis=-1)
    defined = np.isfinite(vec).all(axis=-1)
    vec = np.where(defined[..., None], vec, 0.0)
    mask = ps.mask

    rr = np.hypot(ps.x[:, None], ps.p[None, :])
    if clamp_radius is None:
        clamp_radius = min(
            abs(ps.x[0]), abs(ps.x[-1]), abs(ps.p[0]), abs(ps.p[-1])
        )
    band_width = 2.0 * max(
        ps.x[1] - ps.x[0] if nx > 1 else 1.0, ps.p[1] - ps.p[0] if ny > 1 else 1.0
    )
    band = (rr < clamp_radius) & (rr >= clamp_radius - band_width)
    if not band.any():
        raise MeasurementError("non-compact field: no annulus inside the clamp radius")
    if not mask[band].all():
        raise MeasurementError(
            "non-compact field: compactification annulus has invalid points"
        )
    bvec = vec[band]
    pole = bvec.mean(axis=0)
    pn = np.linalg.norm(pole)
    if pn == 0.0:
        raise MeasurementError(
            "non-compact field: compactification annulus has no mean direction"
        )
    pole = pole / pn
    spread = float(np.max(np.arccos(np.clip(bvec @ pole, -1.0, 1.0))))
    if spread >= boundary_spread_max:
        raise MeasurementError(
            f"non-compact field: boundary cone angle {spread:.3f} rad "
            f"exceeds {boundary_spread_max:g} (annulus does not surround one pole)"
        )

    outside = rr >= clamp_radius
    vec = np.where(outside[..., None], pole[None, None, :], vec)
    mask = mask | outside

    v00 = vec[:-1, :-1]
    v10 = vec[1:, :-1]
    v01 = vec[:-1, 1:]
    v11 = vec[1:, 1:]
    m00 = mask[:-1, :-1]
    m10 = mask[1:, :-1]
    m01 = mask[:-1, 1:]
    m11 = mask[1:, 1:]
    dfn = defined | outside
    d00 = dfn[:-1, :-1]
    d10 = dfn[1:, :-1]
    d01 = dfn[:-1, 1:]
    d11 = dfn[1:, 1:]

    omega1 = _solid_angles(v00, v10, v11)
    omega2 = _solid_angles(v00, v11, v01)
    ok1 = m00 & m10 & m11
    ok2 = m00 & m11 & m01
    est1 = (~ok1) & d00 & d10 & d11
    est2 = (~ok2) & d00 & d11 & d01

    signed = omega1[ok1].sum() + omega2[ok2].sum()
    absolute = np.abs(omega1[ok1]).sum() + np.abs(omega2[ok2]).sum()
    excluded = np.abs(omega1[est1]).sum() + np.abs(omega2[est2]).sum()
    n_excluded = int((~ok1).sum() + (~ok2).sum())

    # the grid boundary ring is constant (= pole) after clamping, so the
    # closing fan contributes nothing, but it keeps the surface closed
    # and the signed sum an exact multiple of 4 pi
    ring = _perimeter_indices(nx, ny)
    bring = vec[ring[:, 0], ring[:, 1]]
    b_next = np.roll(bring, -1, axis=0)
    fan = _solid_angles(b_next, bring, np.broadcast_to(pole, bring.shape))
    signed += fan.sum()
    absolute += np.abs(fan).sum()

    four_pi = 4.0 * np.pi
    signed /= four_pi
    coverings = absolute / four_pi
    quality = abs(signed - round(signed))
    return WindingReport(
        float(signed),
        float(coverings),
        float(excluded / four_pi),
        float(quality),
        n_excluded,
        spread,
    )
