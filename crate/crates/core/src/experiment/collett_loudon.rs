use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::scenario::{run_popper, GridSettings, ScenarioConfig};
use crate::error::{ensure, Result};
use crate::output;

/// A pair of sweep points diverges when the prediction moves by more than
/// this fraction...
pub const DIVERGENCE_PREDICTION_CHANGE: f64 = 0.5;
/// ...while the simulated L spread moves by less than this one.
pub const DIVERGENCE_SIMULATION_CHANGE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollettLoudonParams {
    pub s_r: f64,
    /// Source-to-slit distance.
    pub d_src: f64,
    /// Slit-to-detector distance.
    pub r: f64,
    pub lambda: f64,
}

impl CollettLoudonParams {
    pub fn new(s_r: f64, d_src: f64, r: f64, lambda: f64) -> Result<Self> {
        for (name, x) in [("s_r", s_r), ("d_src", d_src), ("r", r), ("lambda", lambda)] {
            ensure(x > 0.0 && x.is_finite(), || format!("{name} must be positive, got {x}"))?;
        }
        Ok(Self { s_r, d_src, r, lambda })
    }

    pub fn with_s_r(self, s_r: f64) -> Result<Self> {
        Self::new(s_r, self.d_src, self.r, self.lambda)
    }
}

/// `√(((d+r)/d·s_R)² + (rλ/(4π s_R))²)`.
pub fn collett_loudon_delta_l(cl: &CollettLoudonParams) -> f64 {
    let geometric = (cl.d_src + cl.r) / cl.d_src * cl.s_r;
    let diffractive = cl.r * cl.lambda / (4.0 * PI * cl.s_r);
    geometric.hypot(diffractive)
}

/// `s_R` at which the two terms are equal and the prediction is smallest.
pub fn collett_loudon_minimizer(d_src: f64, r: f64, lambda: f64) -> f64 {
    (r * lambda * d_src / (4.0 * PI * (d_src + r))).sqrt()
}

/// `√(r/(d+r))`, the dominance condition in the form it is usually quoted.
/// It carries no `λ`, so it is reported next to the true crossover only.
pub fn quoted_threshold(d_src: f64, r: f64) -> f64 {
    (r / (d_src + r)).sqrt()
}

/// `s_R` is half the R aperture width.
pub fn mapped_config(base: &ScenarioConfig, s_r: f64) -> ScenarioConfig {
    let grid = match base.grid {
        GridSettings::Auto { .. } => GridSettings::Auto { resolve_r_pattern: false },
        explicit => explicit,
    };
    ScenarioConfig { slit_r_width: 2.0 * s_r, n: None, grid, ..*base }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollettLoudonRow {
    pub s_r: f64,
    pub slit_r_width: f64,
    pub predicted_delta_l: f64,
    pub simulated_l_stdev: f64,
    pub pass_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollettLoudonComparison {
    pub mapping: String,
    pub rows: Vec<CollettLoudonRow>,
    pub minimizer: f64,
    pub quoted_threshold: f64,
    /// max/min of the predicted column.
    pub prediction_ratio: f64,
    /// max/min of the simulated column.
    pub simulation_ratio: f64,
    /// Some pair of rows has the prediction moving by more than
    /// [`DIVERGENCE_PREDICTION_CHANGE`] and the simulation by less than
    /// [`DIVERGENCE_SIMULATION_CHANGE`].
    pub divergence: bool,
    /// The sampled `s_R` values lie on both sides of the minimizer.
    pub minimizer_bracketed: bool,
}

pub const MAPPING: &str = "slit_r_width = 2 * s_r";

pub fn refute_collett_loudon(
    geometry: &CollettLoudonParams,
    s_r_values: &[f64],
    base: &ScenarioConfig,
) -> Result<CollettLoudonComparison> {
    ensure(!s_r_values.is_empty(), || "s_r sweep is empty".into())?;
    let mut rows = Vec::with_capacity(s_r_values.len());
    for &s_r in s_r_values {
        let cl = geometry.with_s_r(s_r)?;
        let config = mapped_config(base, s_r);
        let report = run_popper(&config)?;
        rows.push(CollettLoudonRow {
            s_r,
            slit_r_width: config.slit_r_width,
            predicted_delta_l: collett_loudon_delta_l(&cl),
            simulated_l_stdev: report.l_conditional_stdev,
            pass_probability: report.pass_probability,
        });
    }
    let ratio = |f: fn(&CollettLoudonRow) -> f64| {
        let (lo, hi) = rows.iter().map(f).fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
        hi / lo
    };
    let prediction_ratio = ratio(|r| r.predicted_delta_l);
    let simulation_ratio = ratio(|r| r.simulated_l_stdev);
    let divergence = rows.iter().any(|a| {
        rows.iter().any(|b| {
            a.predicted_delta_l / b.predicted_delta_l - 1.0 > DIVERGENCE_PREDICTION_CHANGE
                && (a.simulated_l_stdev / b.simulated_l_stdev - 1.0).abs() < DIVERGENCE_SIMULATION_CHANGE
        })
    });
    let minimizer = collett_loudon_minimizer(geometry.d_src, geometry.r, geometry.lambda);
    let minimizer_bracketed = rows.iter().any(|r| r.s_r <= minimizer) && rows.iter().any(|r| r.s_r >= minimizer);
    Ok(CollettLoudonComparison {
        mapping: MAPPING.into(),
        rows,
        minimizer,
        quoted_threshold: quoted_threshold(geometry.d_src, geometry.r),
        prediction_ratio,
        simulation_ratio,
        divergence,
        minimizer_bracketed,
    })
}

impl CollettLoudonComparison {
    pub const CSV_COLUMNS: [&'static str; 5] =
        ["s_r", "slit_r_width", "predicted_delta_l", "simulated_l_stdev", "pass_probability"];

    pub fn write_csv<W: Write>(&self, w: W, metadata: &[(String, String)]) -> Result<()> {
        let mut meta = metadata.to_vec();
        meta.extend([
            ("mapping".to_string(), self.mapping.clone()),
            ("minimizer".into(), output::format_number(self.minimizer)),
            ("quoted_threshold".into(), output::format_number(self.quoted_threshold)),
            ("prediction_ratio".into(), output::format_number(self.prediction_ratio)),
            ("simulation_ratio".into(), output::format_number(self.simulation_ratio)),
            ("divergence".into(), self.divergence.to_string()),
            ("minimizer_bracketed".into(), self.minimizer_bracketed.to_string()),
        ]);
        let rows = self
            .rows
            .iter()
            .map(|r| [r.s_r, r.slit_r_width, r.predicted_delta_l, r.simulated_l_stdev, r.pass_probability]);
        output::write_numeric_csv(w, &meta, &Self::CSV_COLUMNS, rows)
    }
}
