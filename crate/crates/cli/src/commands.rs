use std::path::PathBuf;

use popper_core::diffraction::{fraunhofer_width, write_curve_csv, SlitEvolutionParams};
use popper_core::experiment::{
    epr_limit_probe, popper_sweep_configs, refute_collett_loudon, run_sweep, strictly_increasing, ClickSettings,
    CollettLoudonParams, GridSettings, ScenarioConfig, ScenarioReport,
};
use popper_core::finite_qm::no_signaling_audit;
use popper_core::gaussian::{optimal_sigma, spread_after_time, GaussianMode};
use popper_core::gridprop::{discretize_1d, Analytic1D, FreeEvolution, Grid1D, MIN_GRID_POINTS};
use popper_core::output::{self, format_number};
use popper_core::PhysicalParams;

use crate::config::{Effective, RunConfig};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_T: f64 = 2.0;
/// Locality is asserted at this sup-norm.
pub const LOCALITY_TOLERANCE: f64 = 1e-10;

/// What a command produced: the bytes to write and an optional failed
/// assertion to report through the exit code.
pub struct Produced {
    pub bytes: Vec<u8>,
    pub failure: Option<String>,
}

impl Produced {
    fn ok(bytes: Vec<u8>) -> Self {
        Self { bytes, failure: None }
    }
}

pub fn out_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.raw("out").map(PathBuf::from)
}

fn seed(cfg: &RunConfig, eff: &mut Effective) -> Result<u64, CliError> {
    let s = cfg.get::<u64>("seed")?.unwrap_or(DEFAULT_SEED);
    eff.push("seed", s);
    Ok(s)
}

fn physics(cfg: &RunConfig, eff: &mut Effective) -> Result<(f64, PhysicalParams), CliError> {
    let t = cfg.positive("t")?.unwrap_or(DEFAULT_T);
    let hbar = cfg.positive("hbar")?.unwrap_or(1.0);
    let mass = cfg.positive("mass")?.unwrap_or(1.0);
    eff.num("t", t);
    eff.num("hbar", hbar);
    eff.num("mass", mass);
    Ok((t, PhysicalParams::new(hbar, mass)?))
}

fn require(cfg: &RunConfig, key: &str) -> Result<f64, CliError> {
    cfg.positive(key)?.ok_or_else(|| CliError::Config(format!("`{key}` is required with grid = explicit")))
}

fn power_of_two(cfg: &RunConfig, key: &str) -> Result<usize, CliError> {
    let n =
        cfg.get::<usize>(key)?.ok_or_else(|| CliError::Config(format!("`{key}` is required with grid = explicit")))?;
    if n < MIN_GRID_POINTS || !n.is_power_of_two() {
        return Err(CliError::Config(format!("`{key}` must be a power of two >= {MIN_GRID_POINTS}, got {n}")));
    }
    Ok(n)
}

const SCENARIO_KEYS: &[&str] = &[
    "alpha",
    "sigma",
    "slit_l_width",
    "slit_r_width",
    "t",
    "hbar",
    "mass",
    "grid",
    "grid_l_half_extent",
    "grid_l_points",
    "grid_r_spacing",
    "grid_r_points",
    "r_edge_tolerance",
    "clicks",
    "seed",
    "out",
];

fn scenario(cfg: &RunConfig, eff: &mut Effective) -> Result<ScenarioConfig, CliError> {
    let (t, p) = physics(cfg, eff)?;
    let sigma = match cfg.positive("sigma")? {
        Some(s) => s,
        None => optimal_sigma(t, &p)?,
    };
    let mut c = ScenarioConfig::with_sigma(sigma, t, p);
    c.alpha = cfg.positive("alpha")?.unwrap_or(c.alpha);
    c.slit_l_width = cfg.positive("slit_l_width")?.unwrap_or(2.0 * (c.alpha + 5.0 * sigma));
    c.slit_r_width = cfg.positive("slit_r_width")?.unwrap_or(c.slit_r_width);
    eff.num("sigma", c.sigma);
    eff.num("alpha", c.alpha);
    eff.num("slit_l_width", c.slit_l_width);
    eff.num("slit_r_width", c.slit_r_width);

    let mode = cfg.raw("grid").unwrap_or("auto");
    eff.push("grid", mode);
    c.grid = match mode {
        "auto" => GridSettings::Auto { resolve_r_pattern: true },
        "unresolved" => GridSettings::Auto { resolve_r_pattern: false },
        "explicit" => {
            let lh = require(cfg, "grid_l_half_extent")?;
            let ln = power_of_two(cfg, "grid_l_points")?;
            let rs = require(cfg, "grid_r_spacing")?;
            let rn = power_of_two(cfg, "grid_r_points")?;
            let tol = match cfg.raw("r_edge_tolerance") {
                Some("off") => None,
                Some(_) => cfg.positive("r_edge_tolerance")?,
                None => Some(popper_core::experiment::R_EDGE_TOLERANCE),
            };
            eff.num("grid_l_half_extent", lh);
            eff.push("grid_l_points", ln);
            eff.num("grid_r_spacing", rs);
            eff.push("grid_r_points", rn);
            eff.push("r_edge_tolerance", tol.map(format_number).unwrap_or_else(|| "off".into()));
            GridSettings::Explicit {
                l: Grid1D::symmetric(lh, ln)?,
                r: Grid1D::with_spacing(rs, rn)?,
                r_edge_tolerance: tol,
            }
        }
        other => {
            return Err(CliError::Config(format!("`grid` must be auto, unresolved or explicit, got `{other}`")));
        }
    };
    if mode != "explicit" {
        for k in ["grid_l_half_extent", "grid_l_points", "grid_r_spacing", "grid_r_points", "r_edge_tolerance"] {
            if cfg.raw(k).is_some() {
                return Err(CliError::Config(format!("`{k}` needs grid = explicit")));
            }
        }
    }
    let clicks = cfg.get::<usize>("clicks")?.unwrap_or(0);
    eff.push("clicks", clicks);
    let s = seed(cfg, eff)?;
    c.clicks = (clicks > 0).then_some(ClickSettings { count: clicks, seed: s });
    c.validate()?;
    Ok(c)
}

pub fn nosig(cfg: &RunConfig) -> Result<Produced, CliError> {
    cfg.only(&["trials", "dims", "seed", "out"])?;
    let mut eff = Effective::default();
    let trials = cfg.get::<usize>("trials")?.unwrap_or(100);
    let dims = cfg.get_list::<usize>("dims")?.unwrap_or_else(|| vec![2, 2]);
    if trials == 0 {
        return Err(CliError::Config("`trials` must be at least 1".into()));
    }
    let &[d1, d2] = dims.as_slice() else {
        return Err(CliError::Config(format!("`dims` needs two values, got {}", dims.len())));
    };
    if d1 < 2 || d2 < 2 {
        return Err(CliError::Config(format!("`dims` must both be at least 2, got ({d1}, {d2})")));
    }
    eff.push("trials", trials);
    eff.list("dims", &dims);
    let s = seed(cfg, &mut eff)?;
    let report = no_signaling_audit(trials, (d1, d2), s)?;
    let doc = serde_json::json!({ "command": "nosig", "config": eff.as_json(), "report": report });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Config(e.to_string()))?;
    bytes.push(b'\n');
    let failure = (!report.passed()).then(|| {
        format!(
            "max deviation {:e}; failing trials (stream ids of seed {s}): {:?}",
            report.max_deviation, report.failures
        )
    });
    Ok(Produced { bytes, failure })
}

pub fn spread(cfg: &RunConfig) -> Result<Produced, CliError> {
    cfg.only(&["t", "hbar", "mass", "sigmas", "seed", "out"])?;
    let mut eff = Effective::default();
    let (t, p) = physics(cfg, &mut eff)?;
    let opt = optimal_sigma(t, &p)?;
    let sigmas = cfg.get_list::<f64>("sigmas")?.unwrap_or_else(|| [0.25, 0.5, 1.0, 2.0, 4.0].map(|f| f * opt).to_vec());
    if let Some(bad) = sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(CliError::Config(format!("`sigmas` must be positive, got {bad}")));
    }
    eff.num_list("sigmas", &sigmas);
    seed(cfg, &mut eff)?;
    let mut rows = Vec::new();
    for &sigma in &sigmas {
        let sb = spread_after_time(sigma, t, &p)?;
        let half = 10.0 * sb.max(sigma);
        let points = ((2.0 * half * 8.0 / sigma).ceil() as usize).next_power_of_two().max(MIN_GRID_POINTS);
        let g = Grid1D::symmetric(half, points)?;
        let psi = discretize_1d(&Analytic1D::Gaussian(GaussianMode::new(0.0, sigma)?), &g)?;
        let grid_sd = psi.propagate_free(t, &p)?.density().stdev()?;
        rows.push([sigma, sb, grid_sd]);
    }
    let mut meta = eff.metadata();
    meta.push(("optimal_sigma".into(), format_number(opt)));
    meta.push(("minimum_sigma_bar".into(), format_number(spread_after_time(opt, t, &p)?)));
    let mut bytes = Vec::new();
    output::write_numeric_csv(&mut bytes, &meta, &["sigma", "sigma_bar", "sigma_bar_grid"], rows)?;
    Ok(Produced::ok(bytes))
}

pub fn diffraction(cfg: &RunConfig) -> Result<Produced, CliError> {
    cfg.only(&["d", "t", "hbar", "mass", "samples", "half_range", "seed", "out"])?;
    let mut eff = Effective::default();
    let d = cfg.positive("d")?.unwrap_or(1.0);
    eff.num("d", d);
    let t = cfg.positive("t")?.unwrap_or(1.0);
    let hbar = cfg.positive("hbar")?.unwrap_or(1.0);
    let mass = cfg.positive("mass")?.unwrap_or(1.0);
    eff.num("t", t);
    eff.num("hbar", hbar);
    eff.num("mass", mass);
    let sp = SlitEvolutionParams::new(d, t, PhysicalParams::new(hbar, mass)?)?;
    let samples = cfg.get::<usize>("samples")?.unwrap_or(2001);
    let half_range = cfg.positive("half_range")?.unwrap_or_else(|| fraunhofer_width(&sp));
    eff.push("samples", samples);
    eff.num("half_range", half_range);
    seed(cfg, &mut eff)?;
    let mut bytes = Vec::new();
    write_curve_csv(&mut bytes, &sp, half_range, samples, &eff.metadata())?;
    Ok(Produced::ok(bytes))
}

pub fn popper(cfg: &RunConfig) -> Result<Produced, CliError> {
    cfg.only(&[SCENARIO_KEYS, &["n_list"]].concat())?;
    let mut eff = Effective::default();
    let base = scenario(cfg, &mut eff)?;
    let n_list = cfg.get_list::<u32>("n_list")?.unwrap_or_else(|| vec![2, 4, 8]);
    if n_list.contains(&0) {
        return Err(CliError::Config("`n_list` entries must be at least 1".into()));
    }
    eff.list("n_list", &n_list);
    let reports = run_sweep(&popper_sweep_configs(&base, &n_list)?)?;
    let worst = reports.iter().map(|r| r.l_unconditional_marginal_distance).fold(0.0, f64::max);
    let mut bytes = Vec::new();
    output::write_optional_csv(
        &mut bytes,
        &eff.metadata(),
        &ScenarioReport::CSV_COLUMNS,
        reports.iter().map(ScenarioReport::csv_row),
    )?;
    let failure = (worst >= LOCALITY_TOLERANCE)
        .then(|| format!("unconditional L marginal moved by {worst:e} (tolerance {LOCALITY_TOLERANCE:e})"));
    Ok(Produced { bytes, failure })
}

pub fn collett_loudon(cfg: &RunConfig) -> Result<Produced, CliError> {
    cfg.only(&[SCENARIO_KEYS, &["d_src", "r", "lambda", "s_r_list"]].concat())?;
    let mut eff = Effective::default();
    let base = scenario(cfg, &mut eff)?;
    let d_src = cfg.positive("d_src")?.unwrap_or(1.0);
    let r = cfg.positive("r")?.unwrap_or(1.0);
    let lambda = cfg.positive("lambda")?.unwrap_or(1.0);
    let s_r =
        cfg.get_list::<f64>("s_r_list")?.unwrap_or_else(|| (0..5).map(|i| 0.05 * 10f64.powf(i as f64 / 4.0)).collect());
    eff.num("d_src", d_src);
    eff.num("r", r);
    eff.num("lambda", lambda);
    eff.num_list("s_r_list", &s_r);
    let geometry = CollettLoudonParams::new(s_r.first().copied().unwrap_or(1.0), d_src, r, lambda)?;
    let cmp = refute_collett_loudon(&geometry, &s_r, &base)?;
    let mut bytes = Vec::new();
    cmp.write_csv(&mut bytes, &eff.metadata())?;
    Ok(Produced::ok(bytes))
}

pub fn epr_limit(cfg: &RunConfig) -> Result<Produced, CliError> {
    cfg.only(&[
        "widths",
        "t",
        "hbar",
        "mass",
        "broad_width",
        "epr_grid_half_extent",
        "epr_grid_points",
        "seed",
        "out",
    ])?;
    let mut eff = Effective::default();
    let (t, p) = physics(cfg, &mut eff)?;
    let opt = optimal_sigma(t, &p)?;
    let widths = cfg.get_list::<f64>("widths")?.unwrap_or_else(|| vec![opt, opt / 2.0, opt / 4.0]);
    let broad = cfg.positive("broad_width")?.unwrap_or(opt);
    eff.num_list("widths", &widths);
    eff.num("broad_width", broad);
    let grid = match (cfg.positive("epr_grid_half_extent")?, cfg.get::<usize>("epr_grid_points")?) {
        (None, None) => None,
        (Some(h), Some(n)) => {
            eff.num("epr_grid_half_extent", h);
            eff.push("epr_grid_points", n);
            Some(Grid1D::symmetric(h, n)?)
        }
        _ => {
            return Err(CliError::Config("`epr_grid_half_extent` and `epr_grid_points` go together".into()));
        }
    };
    seed(cfg, &mut eff)?;
    let points = epr_limit_probe(&widths, broad, t, &p, grid)?;
    let mut bytes = Vec::new();
    output::write_numeric_csv(
        &mut bytes,
        &eff.metadata(),
        &["width", "marginal_stdev", "predicted_stdev"],
        points.iter().map(|pt| [pt.width, pt.marginal_stdev, pt.predicted_stdev]),
    )?;
    let flag = strictly_increasing(&points);
    if let Some(f) = flag {
        output::write_metadata(&mut bytes, &[("strictly_increasing".into(), f.to_string())])?;
    }
    let failure = (flag == Some(false)).then(|| "marginal spread is not strictly increasing".to_string());
    Ok(Produced { bytes, failure })
}
