use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fresnel_cs;
use crate::error::{Error, Result};
use crate::gaussian::{optimal_sigma, spread_after_time, PhysicalParams};
use crate::output;

/// `2√(2π)`: with `σ = √(ħt/2m)`, `v ≪ 1` reads `d ≪ 2√(2π)·σ ≈ 5.01σ`.
pub const REGIME_CONSTANT: f64 = 5.013_256_549_262_001;

/// Below this `|mdy/2ħt|` the far-field density uses its Taylor series.
pub const FRAUNHOFER_SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitEvolutionParams {
    pub d: f64,
    pub t: f64,
    pub p: PhysicalParams,
}

impl SlitEvolutionParams {
    pub fn new(d: f64, t: f64, p: PhysicalParams) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("slit width must be positive, got {d}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
        }
        Ok(Self { d, t, p })
    }

    /// `√(m/πħt)`, the Fresnel scale factor.
    fn scale(&self) -> f64 {
        (self.p.mass / (PI * self.p.hbar * self.t)).sqrt()
    }

    pub fn u(&self, y2: f64) -> f64 {
        y2 * self.scale()
    }

    pub fn v(&self) -> f64 {
        0.5 * self.d * self.scale()
    }

    /// `2πħt/md`, position of the first far-field zero.
    pub fn first_zero(&self) -> f64 {
        2.0 * PI * self.p.hbar * self.t / (self.p.mass * self.d)
    }
}

/// Exact density of the evolved slit state.
pub fn slit_density_exact(y2: f64, sp: &SlitEvolutionParams) -> f64 {
    let (u, v) = (sp.u(y2), sp.v());
    let (cp, sp_) = fresnel_cs(u + v);
    let (cm, sm) = fresnel_cs(u - v);
    ((cp - cm).powi(2) + (sp_ - sm).powi(2)) / (2.0 * sp.d)
}

/// Far-field (`v ≪ 1`) density. Evaluated for any `v`; the caller decides
/// whether the regime applies.
pub fn slit_density_fraunhofer(y2: f64, sp: &SlitEvolutionParams) -> f64 {
    let (hbar, m) = (sp.p.hbar, sp.p.mass);
    let k = m * sp.d / (2.0 * hbar * sp.t);
    let x = k * y2;
    if x.abs() < FRAUNHOFER_SERIES_CUTOFF {
        // sin²x/x² = 1 − x²/3 + O(x⁴)
        m * sp.d / (2.0 * PI * hbar * sp.t) * (1.0 - x * x / 3.0)
    } else {
        2.0 * hbar * sp.t / (m * sp.d * PI) * x.sin().powi(2) / (y2 * y2)
    }
}

/// Distance between the two first far-field minima, `4πħt/md`.
pub fn fraunhofer_width(sp: &SlitEvolutionParams) -> f64 {
    4.0 * PI * sp.p.hbar * sp.t / (sp.p.mass * sp.d)
}

/// Locates the first minima of the exact density on either side of the
/// centre by golden-section search around the far-field zeros.
pub fn exact_first_minima(sp: &SlitEvolutionParams) -> (f64, f64) {
    let y0 = sp.first_zero();
    let f = |y: f64| slit_density_exact(y, sp);
    let plus = golden_min(&f, 0.5 * y0, 1.5 * y0, 1e-12 * y0);
    // The exact density is even in y.
    (-plus, plus)
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `Δy₂/(6σ̄)` for `σ = √(ħt/2m)`, `d = σ/n` and `σ̄` the spread of `σ`.
pub fn scatter_ratio(n: u32, t: f64, p: &PhysicalParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let sigma = optimal_sigma(t, p)?;
    let sigma_bar = spread_after_time(sigma, t, p)?;
    let sp = SlitEvolutionParams::new(sigma / n as f64, t, *p)?;
    Ok(fraunhofer_width(&sp) / (6.0 * sigma_bar))
}

/// `4πn/(3√2)`, the simplified form of [`scatter_ratio`].
pub fn scatter_ratio_closed_form(n: u32) -> f64 {
    4.0 * PI * n as f64 / (3.0 * 2f64.sqrt())
}

/// Writes `(y2, exact_density, fraunhofer_density)` rows for `y2` in
/// `[-half_range, half_range]`, with `v` and the far-field width in the header.
pub fn write_curve_csv<W: Write>(
    w: W,
    sp: &SlitEvolutionParams,
    half_range: f64,
    samples: usize,
    metadata: &[(String, String)],
) -> Result<()> {
    if samples < 2 || !(half_range > 0.0) {
        return Err(Error::InvalidParameter("curve needs at least two samples over a positive range".into()));
    }
    let mut meta = metadata.to_vec();
    meta.push(("v".into(), sp.v().to_string()));
    meta.push(("fraunhofer_width".into(), fraunhofer_width(sp).to_string()));
    let step = 2.0 * half_range / (samples - 1) as f64;
    let rows = (0..samples).map(|i| {
        let y = -half_range + i as f64 * step;
        vec![y, slit_density_exact(y, sp), slit_density_fraunhofer(y, sp)]
    });
    output::write_numeric_csv(w, &meta, &["y2", "exact_density", "fraunhofer_density"], rows)
}
