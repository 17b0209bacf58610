"""Landau levels of a 2D Dirac particle as a detuned Jaynes-Cummings model.

In units eB = hbar = 1 the Hamiltonian is

    H = c sqrt(2) (sigma+ a + a† sigma-) + m c^2 sigma_z,

acting on spin ⊗ truncated Fock space.  Spin component 0 is the state
lowered by sigma- (the "down" level), so |down, 0> is annihilated by the
coupling and sits at -m c^2, while each n >= 1 sector pairs |down, n>
with |up, n-1> into a 2x2 block with eigenvalues +-c sqrt(m^2 c^2 + 2n).
Rendered on a position grid the sector-n eigenstates read
(alpha phi_n(x), beta phi_{n-1}(x)) with phi_n the n-th oscillator
eigenfunction.
"""

from dataclasses import dataclass

import numpy as np

from .grids import POSITION, SpinorField1D

__all__ = [
    "JCParams",
    "jc_hamiltonian",
    "landau_energy",
    "hermite_function",
    "landau_block",
    "landau_eigenstate_fock",
    "landau_eigenstate",
    "SpinOscillatorState",
    "amplitude_damping",
    "dephasing_channel",
]


@dataclass(frozen=True)
class JCParams:
    """Couplings of the detuned JC model; n_max truncates the Fock ladder.

    Keep n_max at least 4x the largest Landau index you plan to request;
    requests beyond n_max/2 are refused outright.
    """

    c: float
    m: float
    n_max: int

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.n_max < 4:
            raise ValueError("n_max must be at least 4")

    @property
    def mc2(self):
        return self.m * self.c**2

    @property
    def dim(self):
        return 2 * (self.n_max + 1)


def _index(s, n, n_max):
    return s * (n_max + 1) + n


def jc_hamiltonian(params):
    """Dense spin ⊗ Fock matrix of the detuned JC Hamiltonian.

    Basis ordering: |s=0 (down), n>, then |s=1 (up), n>.  The matrix is
    block diagonal over excitation sectors {|down, n>, |up, n-1>}.
    """
    nm = params.n_max
    dim = params.dim
    h = np.zeros((dim, dim), dtype=complex)
    for n in range(nm + 1):
        h[_index(0, n, nm), _index(0, n, nm)] = -params.mc2
        h[_index(1, n, nm), _index(1, n, nm)] = +params.mc2
    g = params.c * np.sqrt(2.0)
    for n in range(1, nm + 1):
        # sigma+ a : |down, n> -> sqrt(n) |up, n-1>
        h[_index(1, n - 1, nm), _index(0, n, nm)] = g * np.sqrt(n)
        h[_index(0, n, nm), _index(1, n - 1, nm)] = g * np.sqrt(n)
    return h


def landau_block(n, params):
    """2x2 sector-n block over (|down, n>, |up, n-1>)."""
    if n < 1:
        raise ValueError("sector blocks exist for n >= 1")
    g = params.c * np.sqrt(2.0 * n)
    return np.array([[-params.mc2, g], [g, params.mc2]], dtype=complex)


def landau_energy(n, sign, params):
    """Level energies: -mc^2 for n = 0, else sign * c sqrt(m^2 c^2 + 2 n)."""
    if n < 0:
        raise ValueError("Landau index must be non-negative")
    if n == 0:
        return -params.mc2
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * params.c * np.sqrt(params.m**2 * params.c**2 + 2.0 * n)


def hermite_function(n, x):
    """Orthonormal harmonic-oscillator eigenfunction phi_n(x).

    Stable three-term recurrence on the normalized functions:
    phi_{k+1} = sqrt(2/(k+1)) x phi_k - sqrt(k/(k+1)) phi_{k-1}.
    """
    if n < 0 or n > 200:
        raise ValueError("n must be in [0, 200]")
    x = np.asarray(x, dtype=float)
    phi_prev = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if n == 0:
        return phi_prev
    phi = np.sqrt(2.0) * x * phi_prev
    for k in range(1, n):
        phi, phi_prev = (
            np.sqrt(2.0 / (k + 1.0)) * x * phi - np.sqrt(k / (k + 1.0)) * phi_prev,
            phi,
        )
    return phi


def landau_eigenstate_fock(n, sign, params):
    """Eigenvector of the truncated JC matrix for sector n, as a dense vector."""
    if n > params.n_max // 2:
        raise ValueError(
            f"requested Landau index {n} exceeds n_max/2 = {params.n_max // 2}; "
            "raise the truncation"
        )
    nm = params.n_max
    vec = np.zeros(params.dim, dtype=complex)
    if n == 0:
        vec[_index(0, 0, nm)] = 1.0
        return vec
    w, v = np.linalg.eigh(landau_block(n, params))
    col = 1 if sign > 0 else 0
    alpha, beta = v[0, col], v[1, col]
    vec[_index(0, n, nm)] = alpha
    vec[_index(1, n - 1, nm)] = beta
    return vec


def landau_eigenstate(n, sign, params, grid):
    """Sector-n eigenstate rendered on a position grid.

    Component 0 (down) carries phi_n, component 1 (up) phi_{n-1}; the
    n = 0 level is the uncoupled (phi_0, 0) state at energy -m c^2.
    """
    vec = landau_eigenstate_fock(n, sign, params)
    return fock_vector_to_field(vec, params, grid)


def fock_vector_to_field(vec, params, grid):
    """Render a spin ⊗ Fock vector as a two-component position field."""
    nm = params.n_max
    vec = np.asarray(vec, dtype=complex)
    occupied = np.nonzero(np.abs(vec) > 0)[0]
    vals = np.zeros((grid.n_points, 2), dtype=complex)
    for idx in occupied:
        s, n = divmod(int(idx), nm + 1)
        vals[:, s] += vec[idx] * hermite_function(n, grid.x)
    return SpinorField1D(grid, vals, POSITION)


class SpinOscillatorState:
    """Density matrix over spin ⊗ Fock(n_max + 1)."""

    def __init__(self, rho, params, atol=1e-10):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (params.dim, params.dim):
            raise ValueError(f"rho must be {params.dim}x{params.dim}")
        if np.max(np.abs(rho - rho.conj().T)) > atol:
            raise ValueError("rho is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > atol:
            raise ValueError("rho must have unit trace")
        w = np.linalg.eigvalsh(rho)
        if w.min() < -atol:
            raise ValueError("rho is not positive semidefinite")
        self.rho = rho
        self.params = params
        self.rho.flags.writeable = False

    @classmethod
    def pure(cls, vec, params):
        vec = np.asarray(vec, dtype=complex)
        vec = vec / np.linalg.norm(vec)
        return cls(np.outer(vec, vec.conj()), params)

    def spectral_fields(self, grid, cutoff=1e-14):
        """(weight, SpinorField1D) pairs of the eigen-decomposition."""
        w, v = np.linalg.eigh(self.rho)
        out = []
        for k in range(w.size):
            if w[k] > cutoff:
                out.append((float(w[k]), fock_vector_to_field(v[:, k], self.params, grid)))
        return out


def _spin_kraus(params, k_matrix):
    return np.kron(k_matrix, np.eye(params.n_max + 1))


def amplitude_damping(state, p_damp):
    """Spontaneous-emission channel on the spin: up decays to down.

    Kraus pair K0 = diag(1, sqrt(1-p)), K1 = sqrt(p) |down><up| in the
    (down, up) ordering; p_damp = 1 - e^{-Gamma t} for a decay run of
    length t.  Trace preserving and completely positive.
    """
    if not 0.0 <= p_damp <= 1.0:
        raise ValueError("p_damp must lie in [0, 1]")
    params = state.params
    k0 = _spin_kraus(params, np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p_damp)]]))
    k1 = _spin_kraus(params, np.array([[0.0, np.sqrt(p_damp)], [0.0, 0.0]]))
    rho = k0 @ state.rho @ k0.conj().T + k1 @ state.rho @ k1.conj().T
    return SpinOscillatorState(rho, params)


def dephasing_channel(state, gamma_t):
    """Pure spin dephasing along z for a time gamma_t (in 1/gamma units).

    Scales the spin-off-diagonal blocks by e^{-gamma t}; equivalently
    rho -> (1-q) rho + q Z rho Z with q = (1 - e^{-gamma t})/2.
    """
    if gamma_t < 0:
        raise ValueError("gamma_t must be non-negative")
    params = state.params
    q = 0.5 * (1.0 - np.exp(-gamma_t))
    z = _spin_kraus(params, np.diag([1.0, -1.0]))
    rho = (1.0 - q) * state.rho + q * (z @ state.rho @ z)
    return SpinOscillatorState(rho, params)
