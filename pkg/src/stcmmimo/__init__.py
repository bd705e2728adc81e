"""STCM-MIMO downlink simulator with dipole-array mutual coupling."""

from .channel import (
    ChannelRealization,
    SubArrayAssignment,
    SubArrayStyle,
    apply_coupling,
    draw_channel,
    partition,
    scatter,
)
from .coupling import (
    CouplingMatrix,
    DipoleArraySpec,
    SingularCouplingError,
    UnsupportedGeometryError,
    coupling_matrix,
    impedance_matrix,
    mutual_impedance,
    self_impedance,
)
from .modulation import ModulationScheme, demodulate, modulate
from .optimizer import SearchSpec, SearchTrace, candidate_objective, optimal_antenna_count
from .simulator import (
    BerResult,
    SimConfig,
    ber_confidence,
    noise_variance,
    simulate_ber,
)
from .specfun import cosine_integral, sine_integral
from .stcm import CombinedPair, ReceivedPair, combine, detect, precoding_weights, transmit_pair

__version__ = "0.1.0"
