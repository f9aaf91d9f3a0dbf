"""Storage needs of a wind-solar-only grid under surplus generation and smart-meter demand shifting."""

__version__ = "0.1.0"

from .decomposition import (
    Decomposition,
    EnergySeries,
    decompose,
    format_energy,
    integrate,
    passive_storage_requirement,
    scale_to_demand,
    storage_fluctuation,
)
from .smartmeter import (
    ScenarioConfig,
    SimulationResult,
    passive_equivalence_check,
    prepare_inputs,
    simulate,
    wasted_power_stats,
)
from .surplus import SurplusModel, low_output_power, step_generation
from .sweep import (
    FleetSpec,
    SweepGrid,
    cost_factor,
    demand_rescale_preview,
    fleet_size,
    invert_tau,
    sweep_surface,
)
from .timeseries import (
    ChannelSpec,
    Dataset,
    PowerSeries,
    SyntheticSpec,
    export_dataset,
    parse_dataset,
    synthesize,
    total_volatile,
)
