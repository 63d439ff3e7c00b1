"""Tri-hybrid MIMO link-level simulator.

Channel generation, precoder design for seven transmitter architectures,
their power/loss models and spectral/energy efficiency metrics.
"""

from .architecture import ALL_ARCHITECTURES, Architecture, ArchitectureSpec, equal_aperture_spec, radiating_elements
from .channel import (
    ArrayGeometry,
    ChannelRealization,
    PathComponent,
    PulseShape,
    expected_pulse_power,
    generate_channel,
    pulse_freq_response,
    random_channel,
    rx_steering_vector,
    sample_paths,
    tx_upa_steering_vector,
)
from .config import ConfigError, ExperimentConfig, load_config
from .experiment import SweepResult, SweepRow, emit_results, read_results, run_sweep
from .metrics import LinkResult, energy_efficiency, spectral_efficiency
from .power import (
    ComponentCatalog,
    PowerBreakdown,
    component_loss,
    divider_loss,
    power_consumption,
    transmit_power_from_input,
)
from .precoding import (
    AnalogPrecoder,
    DmaModel,
    DmaPrecoder,
    TriHybridPrecoder,
    assemble_dma_precoder,
    design_analog_fully_connected,
    design_analog_partially_connected,
    design_digital_precoder,
    design_precoders,
    enforce_power_constraint,
    lorentzian_map,
    lorentzian_weight,
    principal_eigenvector,
    subarray_covariance,
    waterfill,
    waveguide_coefficients,
)

__version__ = "0.1.0"
