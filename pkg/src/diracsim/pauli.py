"""Pauli algebra helpers and exact small-matrix exponentials."""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "IDENTITY_2",
    "PauliCoeffs",
    "pauli_exponential",
    "su2_phase_table",
    "matrix_exponential_4",
    "unitary_from_hermitian",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class PauliCoeffs:
    """Real coefficients of a0*I + ax*sx + ay*sy + az*sz."""

    a0: float = 0.0
    ax: float = 0.0
    ay: float = 0.0
    az: float = 0.0

    def __post_init__(self):
        for name in ("a0", "ax", "ay", "az"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def matrix(self):
        return (
            self.a0 * IDENTITY_2
            + self.ax * SIGMA_X
            + self.ay * SIGMA_Y
            + self.az * SIGMA_Z
        )


def su2_phase_table(a0, ax, ay, az, theta):
    """exp(-i theta (a0 I + a.sigma)) for broadcastable coefficient arrays.

    Closed form: e^{-i theta a0} (cos(theta|a|) I - i sin(theta|a|) ahat.sigma),
    with the |a| -> 0 limit handled exactly.  Returns shape (..., 2, 2).
    """
    a0, ax, ay, az = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (a0, ax, ay, az))
    )
    r = np.sqrt(ax**2 + ay**2 + az**2)
    ang = theta * r
    c = np.cos(ang)
    # sin(theta r)/r, smooth at r = 0
    sinc = np.where(r > 0.0, np.sin(ang) / np.where(r > 0.0, r, 1.0), theta)
    global_phase = np.exp(-1j * theta * a0)
    u = np.empty(r.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c - 1j * sinc * az
    u[..., 0, 1] = -1j * sinc * (ax - 1j * ay)
    u[..., 1, 0] = -1j * sinc * (ax + 1j * ay)
    u[..., 1, 1] = c + 1j * sinc * az
    return global_phase[..., None, None] * u


def pauli_exponential(coeffs, theta):
    """exp(-i theta (a0 I + a.sigma)) as an exact 2x2 unitary."""
    return su2_phase_table(coeffs.a0, coeffs.ax, coeffs.ay, coeffs.az, theta)


def _hermiticity_defect(h):
    scale = max(1.0, float(np.max(np.abs(h))))
    return float(np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2))))) / scale


def matrix_exponential_4(h, theta):
    """exp(-i theta H) for a 4x4 Hermitian H, via eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {h.shape}")
    if _hermiticity_defect(h) > 1e-12:
        raise ValueError("matrix is not Hermitian within 1e-12")
    return unitary_from_hermitian(h, theta)


def unitary_from_hermitian(h, theta):
    """exp(-i theta H) for (stacks of) Hermitian matrices, no validation."""
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * theta * w)
    return np.einsum("...ab,...b,...cb->...ac", v, phases, np.conj(v))
