"""Driven Jaynes-Cummings(-Rabi) quasienergies, numerically and in closed form."""
from .model import (
    CRITICAL_TOL,
    FieldConfig,
    ModelParams,
    Regime,
    RegimeError,
    classify_fields,
    classify_regime,
    critical_drive,
    displaced_critical_drive,
    drive_ratio,
    fields_to_optics,
    invariant_length,
    optics_to_fields,
    squeeze_parameter,
)
from .fock import (
    BasisSpec,
    TruncatedOperator,
    build_h0,
    build_h_eta,
    build_squeeze,
    gauge_to_real,
    verify_squeeze_identity,
)
from .eigen import (
    ConvergenceCertificate,
    Spectrum,
    converged_spectrum,
    eig_hermitian,
    eig_real_symmetric,
)
from .special import PcfRangeError, hermite_psi, pcf_d, pcf_d_on_ray
from .analytic import (
    LorentzFactors,
    Polarization,
    dirac_energy_discrete,
    dirac_energy_privileged,
    lorentz_factors,
    polarization,
    quasienergy_jc,
    quasienergy_rabi,
    spinor_continuous,
    spinor_discrete,
    zero_mode_discrete,
)

__version__ = "0.1.0"
