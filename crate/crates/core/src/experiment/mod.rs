//! End-to-end two-slit scenario: entangled source, slits at L and R,
//! coincidence post-selection and free flight to the detectors. Also the
//! Collett–Loudon comparison and the sharp-correlation probe.

pub mod clicks;
mod collett_loudon;
mod epr;
mod scenario;

pub use clicks::{sample_coincidences, ClickHistogram, ClickSettings, ClickSummary};
pub use collett_loudon::{
    collett_loudon_delta_l, collett_loudon_minimizer, mapped_config, quoted_threshold, refute_collett_loudon,
    CollettLoudonComparison, CollettLoudonParams, CollettLoudonRow, DIVERGENCE_PREDICTION_CHANGE,
    DIVERGENCE_SIMULATION_CHANGE, MAPPING,
};
pub use epr::{epr_auto_grid, epr_limit_probe, strictly_increasing, EprPoint};
pub use scenario::{
    first_minima_width, popper_sweep_configs, run_popper, run_sweep, GridSettings, ScenarioConfig, ScenarioReport,
    FRAUNHOFER_V_MAX, R_EDGE_TOLERANCE,
};
