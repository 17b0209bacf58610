"""diracsim: spectral simulator for relativistic quantum mechanics models
proposed for trapped-ion quantum simulation.

Subpackages:
    grids, pauli, splitting   -- spectral grids, SU(2)/4x4 exponentials, Strang stepping
    dirac                     -- free Dirac evolution and Zitterbewegung diagnostics
    klein                     -- 1+1 and 2+1 Klein scattering on a linear ramp
    landau, wigner            -- Landau/Jaynes-Cummings levels, Wigner functions, winding numbers
    bag                       -- two Dirac particles in a quadratic confining potential
    ions                      -- lab <-> simulation parameter dictionary
    config, experiments, cli  -- reproducible experiment runs and the diracsim CLI
"""

from .grids import (
    Grid1D,
    SpinorField1D,
    gaussian_spinor_field,
    make_grid,
    to_momentum,
    to_position,
)
from .pauli import PauliCoeffs, matrix_exponential_4, pauli_exponential
from .splitting import EvolutionMonitor, stable_dt, strang_step
from .dirac import (
    SimParams,
    dispersion,
    evolve_free,
    evolve_free_3p1_mode,
    mean_position_trace,
    measure_zb_from_trace,
    positive_energy_projector,
    zb_amplitude_estimate,
    zb_frequency_estimate,
)
from .klein import (
    EffectiveMass,
    Field2D,
    KleinParams,
    SpinorSlices2D,
    effective_mass,
    evolve_klein_1p1,
    evolve_klein_2p1_decomposed,
    evolve_klein_2p1_direct,
    group_velocity,
    measure_transmission,
    reconstruct_position_space,
    transmission_formula,
)
from .landau import (
    JCParams,
    SpinOscillatorState,
    amplitude_damping,
    dephasing_channel,
    hermite_function,
    jc_hamiltonian,
    landau_eigenstate,
    landau_energy,
)
from .wigner import (
    PseudospinField,
    WignerField,
    dephasing_map,
    pseudospin_field,
    wigner_from_density,
    wigner_spinor,
    winding_number,
)
from .bag import (
    BagParams,
    bag_spin_kinetic_block,
    density_trace,
    evolve_bag,
    klein_tunneling_fraction,
    pi_expectation,
    prepare_initial,
)
from .ions import (
    IonParams,
    ValidityReport,
    build_ion_hamiltonian,
    ion_from_sim,
    normal_modes_3ions,
    sim_from_ion,
    validity_check,
    zb_ion_frequency,
)
from .errors import ConfigError, GuardError, MeasurementError

__version__ = "0.1.0"
