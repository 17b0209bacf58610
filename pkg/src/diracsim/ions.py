"""Bidirectional mapping between lab trapped-ion and simulated Dirac parameters.

The sideband/carrier dictionary is

    c = 2 eta Delta Omega_tilde,        m c^2 = hbar Omega,

with eta the Lamb-Dicke parameter, Delta the motional ground-state
spread and Omega_tilde / Omega the sideband / carrier couplings.  The
linear-potential and quadratic-potential strengths follow

    alpha = hbar eta Omega_tilde0 / Delta,
    V0 = (hbar eta Omega_3 / Delta)^2 / (hbar Delta_3),

the latter valid in the dispersive limit Delta_3 >> eta Omega_3 <a+a†>.
hbar is carried explicitly on the lab side (default 1 so that lab rates
are already in simulation energy units).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dirac import SimParams

__all__ = [
    "IonParams",
    "ValidityReport",
    "sim_from_ion",
    "ion_from_sim",
    "zb_ion_frequency",
    "validity_check",
    "IonTerm",
    "build_ion_hamiltonian",
    "effective_target_coefficients",
    "target_coefficients_from_sim",
    "NORMAL_MODE_MATRIX",
    "normal_modes_3ions",
]


@dataclass(frozen=True)
class IonParams:
    """Lab-side drive and trap parameters.

    Per-mode overrides (eta_cm, Delta_st, ...) default to the base
    values; Omega_0 drives the linear potential, Omega_3/Delta_3 the
    dispersive quadratic one, nu is the axial trap frequency.
    """

    eta: float
    Delta: float
    Omega_tilde: float
    Omega: float = 0.0
    nu: float = None
    Omega_0: float = None
    Omega_3: float = None
    Delta_3: float = None
    hbar: float = 1.0
    eta_cm: float = None
    Delta_cm: float = None
    Omega_tilde_cm: float = None
    eta_st: float = None
    Delta_st: float = None
    Omega_tilde_st: float = None
    eta_r: float = None
    Delta_r: float = None
    Omega_tilde_r: float = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.Delta > 0:
            raise ValueError("Delta must be positive")
        for name in ("Omega_tilde", "Omega", "Omega_0", "Omega_3", "Delta_3"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")

    def mode(self, name):
        """(eta, Delta, Omega_tilde) for a named mode, with fallbacks."""
        eta = getattr(self, f"eta_{name}", None)
        delta = getattr(self, f"Delta_{name}", None)
        om = getattr(self, f"Omega_tilde_{name}", None)
        return (
            eta if eta is not None else self.eta,
            delta if delta is not None else self.Delta,
            om if om is not None else self.Omega_tilde,
        )


@dataclass(frozen=True)
class ValidityReport:
    lamb_dicke_ok: bool
    lamb_dicke_value: float
    dispersive_ratio: float
    dispersive_ok: bool
    notes: tuple = field(default_factory=tuple)

    def __str__(self):
        lines = [
            f"lamb_dicke_ok={self.lamb_dicke_ok} (eta={self.lamb_dicke_value:g})",
            f"dispersive_ratio={self.dispersive_ratio:g} ok={self.dispersive_ok}",
        ]
        lines += list(self.notes)
        return "\n".join(lines)


def sim_from_ion(ip):
    """SimParams from lab couplings: c = 2 eta Delta Omega_tilde, mc^2 = hbar Omega."""
    c = 2.0 * ip.eta * ip.Delta * ip.Omega_tilde
    if c <= 0:
        raise ValueError("c = 2 eta Delta Omega_tilde must be positive")
    mc2 = ip.hbar * ip.Omega
    return SimParams(c=c, m=mc2 / c**2)


def ion_from_sim(target, fixed, alpha=None, V0=None, omega_tilde_max=None):
    """Invert the dictionary for given hardware-geometry values.

    target: SimParams; fixed: dict with eta, Delta (and Delta_3 when V0
    is requested, hbar optional).  The inversion is exact:
    sim_from_ion(ion_from_sim(s)) == s.  An omega_tilde_max bound, when
    given, turns an over-ambitious c into an infeasibility error.
    """
    eta = fixed["eta"]
    delta = fixed["Delta"]
    hbar = fixed.get("hbar", 1.0)
    omega_tilde = target.c / (2.0 * eta * delta)
    if omega_tilde_max is not None and omega_tilde > omega_tilde_max:
        raise ValueError(
            f"infeasible: required Omega_tilde = {omega_tilde:g} exceeds "
            f"the stated maximum {omega_tilde_max:g}"
        )
    omega = target.mc2 / hbar
    kwargs = dict(
        eta=eta, Delta=delta, Omega_tilde=omega_tilde, Omega=omega, hbar=hbar
    )
    if alpha is not None:
        # alpha = hbar eta Omega_tilde0 / Delta
        kwargs["Omega_0"] = alpha * delta / (hbar * eta)
    if V0 is not None:
        if "Delta_3" not in fixed:
            raise ValueError("inverting V0 needs a fixed Delta_3")
        delta3 = fixed["Delta_3"]
        kwargs["Delta_3"] = delta3
        # V0 = (hbar eta Omega_3 / Delta)^2 / (hbar Delta_3)
        kwargs["Omega_3"] = (delta / (hbar * eta)) * math.sqrt(hbar * V0 * delta3)
    return IonParams(**kwargs)


def zb_ion_frequency(n_phonons, ip):
    """Zitterbewegung frequency in lab units: 2 sqrt(N eta^2 Omega_tilde^2 + Omega^2)."""
    if n_phonons < 0:
        raise ValueError("phonon number must be non-negative")
    return 2.0 * math.sqrt(
        n_phonons * ip.eta**2 * ip.Omega_tilde**2 + ip.Omega**2
    )


def validity_check(ip, n_max_phonons, lamb_dicke_max=0.1, dispersive_min=10.0):
    """Lamb-Dicke and dispersive-limit sanity checks.

    The dispersive ratio bounds <a + a†> by its coherent-state worst
    case 2 sqrt(n_max) at the stated phonon budget.
    """
    if n_max_phonons < 1:
        raise ValueError("n_max_phonons must be at least 1")
    ld_ok = ip.eta <= lamb_dicke_max
    notes = []
    if not ld_ok:
        notes.append(
            f"eta={ip.eta:g} violates the Lamb-Dicke regime (<= {lamb_dicke_max:g})"
        )
    if ip.Omega_3 and ip.Delta_3:
        ratio = ip.Delta_3 / (ip.eta * ip.Omega_3 * 2.0 * math.sqrt(n_max_phonons))
    else:
        ratio = math.inf
    disp_ok = ratio >= dispersive_min
    if not disp_ok:
        notes.append(
            f"dispersive ratio {ratio:.3g} < {dispersive_min:g}: raise Delta_3 "
            "or lower Omega_3 / the phonon budget"
        )
    return ValidityReport(ld_ok, ip.eta, float(ratio), disp_ok, tuple(notes))


@dataclass(frozen=True)
class IonTerm:
    """One drive term: spin structure x mode operator x coefficient."""

    spin: str
    mode_op: str
    coefficient: float


def build_ion_hamiltonian(kind, ip):
    """Coefficient table of the drive Hamiltonian for a simulation kind.

    Substituting the coupling dictionary into these tables must
    reproduce the target Dirac Hamiltonians term by term; see
    effective_target_coefficients.
    """
    if kind == "dirac3p1":
        c = 2.0 * ip.eta * ip.Delta * ip.Omega_tilde
        return [
            IonTerm("sigma_x(ad) + sigma_x(bc)", "p_x", c),
            IonTerm("sigma_y(ad) - sigma_y(bc)", "p_y", c),
            IonTerm("sigma_x(ac) - sigma_x(bd)", "p_z", c),
            IonTerm("sigma_y(ac) + sigma_y(bd)", "1", ip.hbar * ip.Omega),
        ]
    if kind == "klein2p1":
        eta_cm, d_cm, om_cm = ip.mode("cm")
        eta_st, d_st, om_st = ip.mode("st")
        if ip.Omega_0 is None:
            raise ValueError("klein2p1 needs Omega_0 for the linear potential")
        return [
            IonTerm("sigma_x,1", "p_cm", 2.0 * eta_cm * d_cm * om_cm),
            IonTerm("sigma_y,1", "p_st", 2.0 * eta_st * d_st * om_st),
            IonTerm("sigma_z,1", "1", ip.hbar * ip.Omega),
            # requires ion 2 prepared in the + eigenstate of sigma_x,2
            IonTerm("sigma_x,2", "x_cm", ip.hbar * eta_cm * ip.Omega_0 / d_cm),
        ]
    if kind == "bag":
        eta_cm, d_cm, om_cm = ip.mode("cm")
        eta_r, d_r, om_r = ip.mode("r")
        if ip.Omega_3 is None or ip.Delta_3 is None:
            raise ValueError("bag needs Omega_3 and Delta_3 for the dispersive potential")
        return [
            IonTerm("sigma_x,1 - sigma_x,3", "P_cm", 2.0 * eta_cm * d_cm * om_cm),
            IonTerm("sigma_x,1 + sigma_x,3", "p_r", 2.0 * eta_r * d_r * om_r),
            IonTerm("sigma_y,1", "1", ip.hbar * ip.Omega),
            IonTerm("sigma_y,3", "1", ip.hbar * ip.Omega),
            # requires ion 2 prepared in the + eigenstate of sigma_z,2
            IonTerm("sigma_x,2", "Q_cm", ip.hbar * eta_cm * ip.Omega_3 / d_cm),
            IonTerm("sigma_z,2", "1", ip.hbar * ip.Delta_3),
        ]
    raise ValueError(f"unknown Hamiltonian kind {kind!r}")


def effective_target_coefficients(kind, ip):
    """Target-Hamiltonian coefficients implied by a drive table.

    For the bag the mode substitutions P_cm <-> p_r, p_r <-> P_cm/2,
    Q_cm <-> x_r are applied and the dispersive reduction turns the
    (sigma_x,2 Q_cm, Delta_3) pair into V0 x_r^2.
    """
    terms = {t.mode_op + "|" + t.spin: t.coefficient for t in build_ion_hamiltonian(kind, ip)}
    if kind == "dirac3p1":
        return {
            "c_px": terms["p_x|sigma_x(ad) + sigma_x(bc)"],
            "c_py": terms["p_y|sigma_y(ad) - sigma_y(bc)"],
            "c_pz": terms["p_z|sigma_x(ac) - sigma_x(bd)"],
            "mc2": terms["1|sigma_y(ac) + sigma_y(bd)"],
        }
    if kind == "klein2p1":
        return {
            "c_px": terms["p_cm|sigma_x,1"],
            "c_py": terms["p_st|sigma_y,1"],
            "mc2": terms["1|sigma_z,1"],
            "alpha": terms["x_cm|sigma_x,2"],
        }
    if kind == "bag":
        g = terms["Q_cm|sigma_x,2"]
        return {
            "c_pr": terms["P_cm|sigma_x,1 - sigma_x,3"],
            "c_Pcm_half": terms["p_r|sigma_x,1 + sigma_x,3"],
            "mc2_1": terms["1|sigma_y,1"],
            "mc2_3": terms["1|sigma_y,3"],
            "V0": g**2 / (ip.hbar * ip.Delta_3),
        }
    raise ValueError(f"unknown Hamiltonian kind {kind!r}")


def target_coefficients_from_sim(kind, params, alpha=None, V0=None):
    """The same coefficient names, straight from simulated constants."""
    if kind == "dirac3p1":
        return {"c_px": params.c, "c_py": params.c, "c_pz": params.c, "mc2": params.mc2}
    if kind == "klein2p1":
        if alpha is None:
            raise ValueError("klein2p1 target needs alpha")
        return {"c_px": params.c, "c_py": params.c, "mc2": params.mc2, "alpha": alpha}
    if kind == "bag":
        if V0 is None:
            raise ValueError("bag target needs V0")
        return {
            "c_pr": params.c,
            "c_Pcm_half": params.c,
            "mc2_1": params.mc2,
            "mc2_3": params.mc2,
            "V0": V0,
        }
    raise ValueError(f"unknown Hamiltonian kind {kind!r}")


# Rows: (Q_cm, Q_r, Q_3); the same matrix transforms momenta.
NORMAL_MODE_MATRIX = np.array(
    [
        [1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)],
        [-1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0)],
        [1.0 / math.sqrt(6.0), -2.0 / math.sqrt(6.0), 1.0 / math.sqrt(6.0)],
    ]
)


def normal_modes_3ions(positions, momenta):
    """Normal-mode coordinates of three equal ions.

    Q_cm = (x1+x2+x3)/sqrt(3), Q_r = -(x1-x3)/sqrt(2),
    Q_3 = (x1-2x2+x3)/sqrt(6); momenta transform identically.  Returns
    ((Q_cm, Q_r, Q_3), (P_cm, p_r, P_3)).
    """
    positions = np.asarray(positions, dtype=float)
    momenta = np.asarray(momenta, dtype=float)
    if positions.shape != (3,) or momenta.shape != (3,):
        raise ValueError("need 3 positions and 3 momenta")
    return NORMAL_MODE_MATRIX @ positions, NORMAL_MODE_MATRIX @ momenta
