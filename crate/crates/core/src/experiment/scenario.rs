use serde::{Deserialize, Serialize};

use super::clicks::{self, ClickSettings, ClickSummary};
use crate::diffraction::{fraunhofer_width, SlitEvolutionParams};
use crate::error::{ensure, Result};
use crate::gaussian::{optimal_sigma, spread_after_time, PhysicalParams, PopperState};
use crate::gridprop::{
    apply_aperture, condition_on_coincidence, discretize_2d, Aperture, Axis, EdgeGuard, FreeEvolution, Grid1D,
    SampledDensity, DEFAULT_EDGE_POINTS, DEFAULT_EDGE_TOLERANCE,
};

/// First minima are only looked for when the R slit has `v` below this.
pub const FRAUNHOFER_V_MAX: f64 = 0.5;

/// Edge tolerance on the R axis. A hard slit leaves `1/y²` density tails
/// that no finite periodic grid contains at the default `1e-6`.
pub const R_EDGE_TOLERANCE: f64 = 1e-3;

/// Relative tolerance on `slit_r_width = sigma/n`.
const WIDTH_MATCH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridSettings {
    /// Sized from the scenario. With `resolve_r_pattern` the R axis reaches
    /// twice the far-field first zero so the first minima are on the grid.
    Auto {
        resolve_r_pattern: bool,
    },
    Explicit {
        l: Grid1D,
        r: Grid1D,
        r_edge_tolerance: Option<f64>,
    },
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings::Auto { resolve_r_pattern: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub alpha: f64,
    pub sigma: f64,
    pub slit_l_width: f64,
    pub slit_r_width: f64,
    pub n: Option<u32>,
    pub t: f64,
    pub p: PhysicalParams,
    pub grid: GridSettings,
    pub clicks: Option<ClickSettings>,
}

impl ScenarioConfig {
    /// `σ` optimal for `t`, `α = 8σ`, `Δ = 2(α + 5σ)` and a `6σ` R slit.
    pub fn baseline(t: f64, p: PhysicalParams) -> Result<Self> {
        let sigma = optimal_sigma(t, &p)?;
        Ok(Self::with_sigma(sigma, t, p))
    }

    pub fn with_sigma(sigma: f64, t: f64, p: PhysicalParams) -> Self {
        let alpha = 8.0 * sigma;
        Self {
            alpha,
            sigma,
            slit_l_width: 2.0 * (alpha + 5.0 * sigma),
            slit_r_width: 6.0 * sigma,
            n: None,
            t,
            p,
            grid: GridSettings::default(),
            clicks: None,
        }
    }

    /// Baseline with the R slit narrowed to `σ/n`.
    pub fn narrowed(t: f64, p: PhysicalParams, n: u32) -> Result<Self> {
        Self::baseline(t, p)?.with_n(n)
    }

    pub fn with_n(mut self, n: u32) -> Result<Self> {
        ensure(n > 0, || "n must be at least 1".into())?;
        self.n = Some(n);
        self.slit_r_width = self.sigma / n as f64;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("alpha", self.alpha),
            ("sigma", self.sigma),
            ("slit_l_width", self.slit_l_width),
            ("slit_r_width", self.slit_r_width),
            ("t", self.t),
        ] {
            ensure(x > 0.0 && x.is_finite(), || format!("{name} must be positive, got {x}"))?;
        }
        ensure(self.slit_l_width > 2.0 * (self.alpha + self.sigma), || {
            format!(
                "slit_l_width {} must exceed 2(alpha + sigma) = {}",
                self.slit_l_width,
                2.0 * (self.alpha + self.sigma)
            )
        })?;
        if let Some(n) = self.n {
            ensure(n > 0, || "n must be at least 1".into())?;
            let want = self.sigma / n as f64;
            ensure((self.slit_r_width - want).abs() <= WIDTH_MATCH * want, || {
                format!("slit_r_width {} must equal sigma/n = {want}", self.slit_r_width)
            })?;
        }
        if let Some(c) = self.clicks {
            ensure(c.count > 0, || "click count must be positive".into())?;
        }
        Ok(())
    }

    pub fn sigma_bar(&self) -> Result<f64> {
        spread_after_time(self.sigma, self.t, &self.p)
    }

    pub fn slit_params(&self) -> Result<SlitEvolutionParams> {
        SlitEvolutionParams::new(self.slit_r_width, self.t, self.p)
    }

    pub fn in_fraunhofer_regime(&self) -> Result<bool> {
        Ok(self.slit_params()?.v() < FRAUNHOFER_V_MAX)
    }

    /// `(L grid, R grid, edge guard)` used by [`run_popper`].
    pub fn grids(&self) -> Result<(Grid1D, Grid1D, EdgeGuard)> {
        let (resolve, explicit) = match self.grid {
            GridSettings::Auto { resolve_r_pattern } => (resolve_r_pattern, None),
            GridSettings::Explicit { l, r, r_edge_tolerance } => (false, Some((l, r, r_edge_tolerance))),
        };
        if let Some((l, r, tol)) = explicit {
            let guard = EdgeGuard { edge_points: DEFAULT_EDGE_POINTS, axis1: Some(DEFAULT_EDGE_TOLERANCE), axis2: tol };
            return Ok((l, r, guard));
        }
        let sigma_bar = self.sigma_bar()?;
        let reach = self.alpha + 10.0 * sigma_bar;

        let half_l = reach.max(0.5 * self.slit_l_width + 5.0 * sigma_bar);
        let l_points = points_for(2.0 * half_l, self.sigma / 5.0);
        let l = Grid1D::symmetric(half_l, l_points)?;

        // Slit edges fall on cell boundaries: the slit spans a whole number
        // of cells whenever its width is a multiple of σ/4 or σ/n.
        let dx_r = self.sigma.min(self.slit_r_width) / 4.0;
        let fraunhofer = self.in_fraunhofer_regime()?;
        let mut half_r = reach;
        if resolve && fraunhofer {
            half_r = half_r.max(2.0 * self.slit_params()?.first_zero());
        }
        let r = Grid1D::with_spacing(dx_r, points_for(2.0 * half_r, dx_r))?;
        let axis2 = resolve.then_some(R_EDGE_TOLERANCE);
        let guard = EdgeGuard { edge_points: DEFAULT_EDGE_POINTS, axis1: Some(DEFAULT_EDGE_TOLERANCE), axis2 };
        Ok((l, r, guard))
    }
}

fn points_for(extent: f64, spacing: f64) -> usize {
    ((extent / spacing).ceil() as usize).next_power_of_two().max(crate::gridprop::MIN_GRID_POINTS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub n: Option<u32>,
    pub slit_r_width: f64,
    /// Fresnel parameter `v` of the R slit.
    pub v: f64,
    pub sigma_bar: f64,
    pub pass_probability: f64,
    pub l_conditional_stdev: f64,
    pub r_conditional_stdev: f64,
    /// Sup-norm between passed+absorbed and no-R-slit L marginals at time `t`.
    pub l_unconditional_marginal_distance: f64,
    pub r_width_firstminima: Option<f64>,
    /// `4πħt/(m·slit_r_width)`.
    pub predicted_width: f64,
    /// `predicted_width / 6σ̄`.
    pub predicted_ratio: f64,
    /// `r_width_firstminima / 6σ̄`.
    pub measured_ratio: Option<f64>,
    pub l_points: usize,
    pub r_points: usize,
    pub clicks: Option<ClickSummary>,
}

impl ScenarioReport {
    pub const CSV_COLUMNS: [&'static str; 14] = [
        "n",
        "slit_r_width",
        "v",
        "sigma_bar",
        "pass_probability",
        "l_conditional_stdev",
        "r_conditional_stdev",
        "l_unconditional_marginal_distance",
        "r_width_firstminima",
        "predicted_width",
        "predicted_ratio",
        "measured_ratio",
        "click_l_stdev",
        "click_r_stdev",
    ];

    /// One CSV row in [`Self::CSV_COLUMNS`] order; absent values are `None`.
    pub fn csv_row(&self) -> Vec<Option<f64>> {
        vec![
            self.n.map(f64::from),
            Some(self.slit_r_width),
            Some(self.v),
            Some(self.sigma_bar),
            Some(self.pass_probability),
            Some(self.l_conditional_stdev),
            Some(self.r_conditional_stdev),
            Some(self.l_unconditional_marginal_distance),
            self.r_width_firstminima,
            Some(self.predicted_width),
            Some(self.predicted_ratio),
            self.measured_ratio,
            self.clicks.as_ref().map(|c| c.l_stdev),
            self.clicks.as_ref().map(|c| c.r_stdev),
        ]
    }
}

/// Both slits at `t = 0`, free evolution for `t`, coincidence post-selection.
pub fn run_popper(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let (gl, gr, guard) = config.grids()?;
    let (t, p) = (config.t, &config.p);
    let sigma_bar = config.sigma_bar()?;
    let slit = config.slit_params()?;

    let state = PopperState::new(config.alpha, config.sigma)?;
    let psi = discretize_2d(&state, &gl, &gr)?;
    let total = psi.norm_tracked;
    let after_l = apply_aperture(&psi, Axis::One, &Aperture::centered(config.slit_l_width)?)?.passed;
    drop(psi);
    let split = apply_aperture(&after_l, Axis::Two, &Aperture::centered(config.slit_r_width)?)?;
    let pass_probability = split.pass_probability / total;

    let mut no_r_slit = after_l;
    no_r_slit.propagate_in_place(t, p, &guard)?;
    let baseline_l = no_r_slit.marginal(Axis::One);
    drop(no_r_slit);

    let mut absorbed = split.absorbed;
    absorbed.propagate_in_place(t, p, &guard)?;
    let absorbed_l = absorbed.marginal(Axis::One);
    drop(absorbed);

    let passed_mass = split.passed.discrete_norm();
    let mut conditioned = condition_on_coincidence(split.passed)?;
    conditioned.propagate_in_place(t, p, &guard)?;
    let cond_l = conditioned.marginal(Axis::One);
    let cond_r = conditioned.marginal(Axis::Two);

    let l_unconditional_marginal_distance = cond_l
        .values
        .iter()
        .zip(&absorbed_l.values)
        .zip(&baseline_l.values)
        .map(|((c, a), b)| (passed_mass * c + a - b).abs())
        .fold(0.0, f64::max);

    let unresolved = config.grid == GridSettings::Auto { resolve_r_pattern: false };
    let r_width_firstminima =
        if slit.v() < FRAUNHOFER_V_MAX && !unresolved { first_minima_width(&cond_r) } else { None };
    let predicted_width = fraunhofer_width(&slit);
    let clicks = config.clicks.map(|c| clicks::summarize(&conditioned, &c, sigma_bar)).transpose()?;

    Ok(ScenarioReport {
        n: config.n,
        slit_r_width: config.slit_r_width,
        v: slit.v(),
        sigma_bar,
        pass_probability,
        l_conditional_stdev: cond_l.stdev()?,
        r_conditional_stdev: cond_r.stdev()?,
        l_unconditional_marginal_distance,
        r_width_firstminima,
        predicted_width,
        predicted_ratio: predicted_width / (6.0 * sigma_bar),
        measured_ratio: r_width_firstminima.map(|w| w / (6.0 * sigma_bar)),
        l_points: gl.len(),
        r_points: gr.len(),
        clicks,
    })
}

/// Runs scenarios one after another; each run already uses every core and
/// the largest grids need a sizeable share of memory.
pub fn run_sweep(configs: &[ScenarioConfig]) -> Result<Vec<ScenarioReport>> {
    configs.iter().map(run_popper).collect()
}

/// `base` as the baseline row (its own R width, `n` cleared) followed by one
/// narrowed scenario per `n`.
pub fn popper_sweep_configs(base: &ScenarioConfig, n_list: &[u32]) -> Result<Vec<ScenarioConfig>> {
    let mut out = vec![ScenarioConfig { n: None, ..*base }];
    for &n in n_list {
        out.push(base.with_n(n)?);
    }
    Ok(out)
}

/// Distance between the first local minima either side of the central
/// maximum, each refined by a parabola through three samples.
pub fn first_minima_width(density: &SampledDensity) -> Option<f64> {
    let v = &density.values;
    let peak = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?.0;
    let mut hi = peak;
    while hi + 1 < v.len() && v[hi + 1] <= v[hi] {
        hi += 1;
    }
    let mut lo = peak;
    while lo > 0 && v[lo - 1] <= v[lo] {
        lo -= 1;
    }
    if hi + 1 >= v.len() || lo == 0 || hi == peak || lo == peak {
        return None;
    }
    let g = &density.grid;
    Some(
        refine(g.node(hi), g.spacing(), v[hi - 1], v[hi], v[hi + 1])
            - refine(g.node(lo), g.spacing(), v[lo - 1], v[lo], v[lo + 1]),
    )
}

fn refine(y: f64, h: f64, left: f64, mid: f64, right: f64) -> f64 {
    let curv = left - 2.0 * mid + right;
    if curv <= 0.0 {
        return y;
    }
    y + 0.5 * h * (left - right) / curv
}
