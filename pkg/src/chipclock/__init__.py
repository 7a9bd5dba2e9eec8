"""Frequency shifts, operating point and servo-loop stability of magic-field
trapped-atom microwave clocks."""

from .allan import AllanResult, allan_deviation
from .clock import (
    ClockDivergence,
    ClockLoopConfig,
    ReadoutModel,
    RunRecord,
    dick_penalty_scan,
    run_clock,
    sql_stability,
)
from .constants import CODATA, PhysicalConstants
from .noise import LoNoiseSpec, synthesize_lo_noise
from .shifts import (
    Ensemble,
    ShiftBreakdown,
    ShiftModelWarning,
    TrapConfig,
    accuracy_from_atom_number_control,
    bec_critical_temperature,
    mean_collision_shift,
    mean_density,
    mean_zeeman_shift,
    rms_cloud_size,
    total_shift,
    zero_shift_temperature,
)
from .species import RB87, ClockSpecies, derive_chi, derive_zeta, shift_per_density
from .units import UnitValue

__version__ = "0.1.0"
