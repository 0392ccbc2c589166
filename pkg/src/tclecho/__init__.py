"""
tclecho
=======

Electron-spin Hahn-echo decay from nuclear spin pairs.

- :mod:`tclecho.spin_model` - spins, couplings, pair parameters
- :mod:`tclecho.tcl_engine` - closed-form TCL2/TCL4 pair-product envelopes
- :mod:`tclecho.exact_engine` - dense few-spin propagator and fidelities
- :mod:`tclecho.hetero_engine` - heteronuclear pair exponents
- :mod:`tclecho.bath_builder` - random solvent proton baths
- :mod:`tclecho.fileio`, :mod:`tclecho.fitting`, :mod:`tclecho.cli` - I/O, T2 fits, command line

Time arguments are pulse delays in seconds: the pi pulse is applied after a
delay ``t`` and the echo is read out at ``2 t``.
"""

from .bath_builder import BathConfig, generate_bath, point_dipole_Azz, site_count
from .errors import (
    BathGenerationError,
    ConfigError,
    DimensionError,
    DomainError,
    FitError,
    GridMismatchError,
    ParseError,
    TCLEchoError,
)
from .exact_engine import (
    ElectronDensityMatrix,
    ExactEcho,
    SpinSystem,
    build_hamiltonian,
    echo_density_matrix,
    fidelity,
    fidelity_sweep,
    hahn_echo_coherence,
    tcl_density_matrix,
)
from .fitting import FitResult, fit_stretched_exp
from .hetero_engine import HeteroPair, hetero_hamiltonian, table1_report, w_hetero
from .spin_model import (
    FieldConfig,
    NuclearSpin,
    PairParams,
    build_pairs,
    dipolar_coupling,
    pair_amplitude,
    pair_delta,
    pair_frequency,
)
from .tcl_engine import (
    EchoProtocol,
    EchoSeries,
    add_external_w,
    echo_envelope,
    revival_time,
    w_tcl2,
    w_tcl4_exponent,
)

__version__ = "0.1.0"
