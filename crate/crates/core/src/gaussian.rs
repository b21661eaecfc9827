//! Closed-form Gaussian packet algebra.
//!
//! `ψ_{β,σ}(y) = (2πσ²)^{-1/4} exp(-(y-β)²/4σ²)` has `|ψ|²` equal to the
//! normal density with mean `β` and standard deviation `σ`. A zero-momentum
//! packet keeps its mean under free evolution and widens to
//! `σ̄ = σ √(1 + ħ²t²/(4m²σ⁴))`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Smallest allowed branch separation `α/σ` for [`PopperState`].
pub const MIN_SEPARATION: f64 = 8.0;

/// Allowed deviation of the three-branch state's squared norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Conditioning events below this probability are rejected.
pub const CONDITIONAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite() && mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar and mass must be positive, got {hbar}, {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    /// `ħ = m = 1`.
    pub fn natural() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }

    /// `ħt/m`, the squared length scale set by free evolution over `t`.
    pub fn diffusion_length_sq(&self, t: f64) -> f64 {
        self.hbar * t / self.mass
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::natural()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMode {
    pub mean: f64,
    pub sigma: f64,
}

impl GaussianMode {
    pub fn new(mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mean.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian mode needs finite mean and sigma > 0, got {mean}, {sigma}"
            )));
        }
        Ok(Self { mean, sigma })
    }

    pub fn amplitude(&self, y: f64) -> f64 {
        let z = y - self.mean;
        (2.0 * PI * self.sigma * self.sigma).powf(-0.25) * (-z * z / (4.0 * self.sigma * self.sigma)).exp()
    }

    pub fn density(&self, y: f64) -> f64 {
        normal_pdf(y, self.mean, self.sigma)
    }

    /// `⟨ψ_{β,σ}|ψ_{γ,σ}⟩ = exp(-(β-γ)²/8σ²)` for equal widths.
    pub fn overlap(&self, other: &GaussianMode) -> f64 {
        debug_assert!((self.sigma - other.sigma).abs() <= 1e-12 * self.sigma);
        let d = self.mean - other.mean;
        (-d * d / (8.0 * self.sigma * self.sigma)).exp()
    }
}

pub(crate) fn normal_pdf(y: f64, mean: f64, sd: f64) -> f64 {
    let z = (y - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

/// `P(lo < Y < hi)` for `Y ~ N(mean, sd²)`, infinite bounds allowed.
fn normal_interval(mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    // Each tail through erfc keeps precision on both sides of the mean.
    let above = |x: f64| -> f64 {
        if x == f64::INFINITY {
            0.0
        } else if x == f64::NEG_INFINITY {
            1.0
        } else {
            0.5 * erfc((x - mean) / (sd * SQRT_2))
        }
    };
    let below = |x: f64| -> f64 {
        if x == f64::NEG_INFINITY {
            0.0
        } else if x == f64::INFINITY {
            1.0
        } else {
            0.5 * erfc((mean - x) / (sd * SQRT_2))
        }
    };
    let p = if lo >= mean {
        above(lo) - above(hi)
    } else if hi <= mean {
        below(hi) - below(lo)
    } else {
        1.0 - above(hi) - below(lo)
    };
    p.clamp(0.0, 1.0)
}

/// `ψ_{β,σ}(y)` as a complex amplitude (real at `t = 0`).
pub fn gaussian_amplitude(mode: &GaussianMode, y: f64) -> Complex64 {
    Complex64::new(mode.amplitude(y), 0.0)
}

/// Width after free evolution for time `t`.
pub fn spread_after_time(sigma: f64, t: f64, p: &PhysicalParams) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let x = p.hbar * t / (2.0 * p.mass * sigma * sigma);
    Ok(sigma * (1.0 + x * x).sqrt())
}

/// `√(ħt/2m)`, the initial width that minimizes the width at time `t`.
pub fn optimal_sigma(t: f64, p: &PhysicalParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    Ok((p.hbar * t / (2.0 * p.mass)).sqrt())
}

/// Position density of the freely evolved packet: normal with mean `β` and
/// width [`spread_after_time`].
pub fn evolved_gaussian_density(mode: &GaussianMode, t: f64, p: &PhysicalParams, y: f64) -> Result<f64> {
    let sd = spread_after_time(mode.sigma, t, p)?;
    Ok(normal_pdf(y, mode.mean, sd))
}

/// `∫_a^b |ψ|² dy`. Infinite bounds are allowed.
pub fn interval_probability(mode: &GaussianMode, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("interval needs a < b, got [{a}, {b}]")));
    }
    Ok(normal_interval(mode.mean, mode.sigma, a, b))
}

/// Closed interval on one axis; `lo` may be `-∞` and `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidParameter(format!("interval needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn whole_line() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn centered(center: f64, width: f64) -> Result<Self> {
        Self::new(center - 0.5 * width, center + 0.5 * width)
    }
}

/// The exchange-symmetric three-branch source state
///
/// `(1/√3)[ψ_{α}(y1)ψ_{-α}(y2) + ψ_{0}(y1)ψ_{0}(y2) + ψ_{-α}(y1)ψ_{α}(y2)]`
///
/// with every factor of width `σ`. Branch weights are fixed at `1/√3`; the
/// squared norm exceeds 1 by the small cross-branch overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopperState {
    pub alpha: f64,
    pub sigma: f64,
}

impl PopperState {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && sigma > 0.0 && alpha.is_finite() && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha and sigma must be positive, got {alpha}, {sigma}")));
        }
        if alpha < MIN_SEPARATION * sigma {
            return Err(Error::InvalidParameter(format!(
                "branch separation alpha = {alpha} is below {MIN_SEPARATION} sigma = {}",
                MIN_SEPARATION * sigma
            )));
        }
        let state = Self { alpha, sigma };
        let excess = (state.norm_squared() - 1.0).abs();
        if excess > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!("state norm deviates from 1 by {excess:.3e}")));
        }
        Ok(state)
    }

    pub const BRANCH_WEIGHT: f64 = 0.577_350_269_189_625_8; // 1/√3

    /// `(mode on axis 1, mode on axis 2)` for each branch.
    pub fn branches(&self) -> [(GaussianMode, GaussianMode); 3] {
        let g = |m: f64| GaussianMode { mean: m, sigma: self.sigma };
        [(g(self.alpha), g(-self.alpha)), (g(0.0), g(0.0)), (g(-self.alpha), g(self.alpha))]
    }

    pub fn amplitude(&self, y1: f64, y2: f64) -> f64 {
        Self::BRANCH_WEIGHT * self.branches().iter().map(|(m1, m2)| m1.amplitude(y1) * m2.amplitude(y2)).sum::<f64>()
    }

    /// `1 + (2/3)(2e^{-α²/4σ²} + e^{-α²/σ²})`.
    pub fn norm_squared(&self) -> f64 {
        let r = (self.alpha / self.sigma).powi(2);
        1.0 + (2.0 / 3.0) * (2.0 * (-r / 4.0).exp() + (-r).exp())
    }

    /// `∫_{band1}∫_{band2} |ψ|²`, cross terms included.
    pub fn joint_band_probability(&self, band1: &Interval, band2: &Interval) -> f64 {
        let branches = self.branches();
        let mut total = 0.0;
        for (a1, a2) in &branches {
            for (b1, b2) in &branches {
                total += band_overlap(a1, b1, band1) * band_overlap(a2, b2, band2);
            }
        }
        total / 3.0
    }
}

// ∫_band ψ_β ψ_γ dy = ⟨ψ_β|ψ_γ⟩ · P(N((β+γ)/2, σ) ∈ band)
fn band_overlap(a: &GaussianMode, b: &GaussianMode, band: &Interval) -> f64 {
    a.overlap(b) * normal_interval(0.5 * (a.mean + b.mean), a.sigma, band.lo, band.hi)
}

/// `(1/√3)[ψ_{α}(y1)ψ_{-α}(y2) + ψ_{0}(y1)ψ_{0}(y2) + ψ_{-α}(y1)ψ_{α}(y2)]`.
pub fn popper_state_amplitude(state: &PopperState, y1: f64, y2: f64) -> Complex64 {
    Complex64::new(state.amplitude(y1, y2), 0.0)
}

/// `P(y2 ∈ band2 | y1 ∈ band1)` under the three-branch state.
pub fn conditional_band_probability(state: &PopperState, band1: &Interval, band2: &Interval) -> Result<f64> {
    let marginal = state.joint_band_probability(band1, &Interval::whole_line());
    if marginal < CONDITIONAL_FLOOR {
        return Err(Error::UndefinedConditional(marginal));
    }
    Ok((state.joint_band_probability(band1, band2) / marginal).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Composite Simpson rule, the quadrature oracle for this module's tests.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn amplitude_peak_and_translation() {
        let m = GaussianMode::new(0.0, 1.0).unwrap();
        let peak = gaussian_amplitude(&m, 0.0).re;
        assert!((peak - (2.0 * PI).powf(-0.25)).abs() < 1e-15);
        assert!((peak - 0.631_62).abs() < 1e-5);
        let shifted = GaussianMode::new(2.0, 1.0).unwrap();
        assert_eq!(gaussian_amplitude(&shifted, 2.0).re, peak);
        // σ/50 steps over ±12σ
        let norm = simpson(|y| m.amplitude(y).powi(2), -12.0, 12.0, 1200);
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spread_values() {
        let p = PhysicalParams::natural();
        assert_eq!(spread_after_time(1.0, 0.0, &p).unwrap(), 1.0);
        assert!((spread_after_time(1.0, 2.0, &p).unwrap() - SQRT_2).abs() < 1e-15);
        let s = optimal_sigma(2.0, &p).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!((spread_after_time(s, 2.0, &p).unwrap() - s * SQRT_2).abs() < 1e-15);
        assert!(spread_after_time(0.0, 1.0, &p).is_err());
        assert!(optimal_sigma(0.0, &p).is_err());
        assert!(optimal_sigma(-1.0, &p).is_err());
    }

    #[test]
    fn optimal_sigma_is_the_sampled_minimum() {
        let p = PhysicalParams::new(1.3, 0.7).unwrap();
        let t = 3.1;
        let opt = optimal_sigma(t, &p).unwrap();
        let at = |s: f64| spread_after_time(s, t, &p).unwrap();
        assert!(at(opt) < at(0.5 * opt) && at(opt) < at(2.0 * opt));
        // Brute-force scan over a σ grid.
        let best =
            (1..4000).map(|i| 0.001 * i as f64 * opt).min_by(|a, b| at(*a).partial_cmp(&at(*b)).unwrap()).unwrap();
        assert!((best / opt - 1.0).abs() < 2e-3);
        // Strictly decreasing below the optimum and increasing above it.
        let xs: Vec<f64> = (1..200).map(|i| opt * i as f64 / 100.0).collect();
        for w in xs.windows(2) {
            if w[1] <= opt {
                assert!(at(w[1]) < at(w[0]));
            } else if w[0] >= opt {
                assert!(at(w[1]) > at(w[0]));
            }
        }
        let mut prev = 0.0;
        for t in [0.5, 1.0, 2.0, 4.0] {
            let s = optimal_sigma(t, &p).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn evolved_density_moments() {
        let p = PhysicalParams::natural();
        let m = GaussianMode::new(0.7, 1.0).unwrap();
        assert!((evolved_gaussian_density(&m, 0.0, &p, 1.3).unwrap() - m.amplitude(1.3).powi(2)).abs() < 1e-15);
        let t = 2.0;
        let sb = spread_after_time(1.0, t, &p).unwrap();
        let f = |y: f64| evolved_gaussian_density(&m, t, &p, y).unwrap();
        let (a, b) = (0.7 - 12.0 * sb, 0.7 + 12.0 * sb);
        let mass = simpson(f, a, b, 4000);
        let mean = simpson(|y| y * f(y), a, b, 4000);
        let var = simpson(|y| (y - mean).powi(2) * f(y), a, b, 4000);
        assert!((mass - 1.0).abs() < 1e-10);
        assert!((mean - 0.7).abs() < 1e-10);
        assert!((var - sb * sb).abs() < 1e-8);
    }

    #[test]
    fn interval_probabilities() {
        let m = GaussianMode::new(0.0, 1.0).unwrap();
        let p3 = interval_probability(&m, -3.0, 3.0).unwrap();
        assert!((p3 - 0.9973).abs() < 5e-5, "{p3}");
        assert!((interval_probability(&m, -12.0, 12.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((interval_probability(&m, 0.0, 12.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((interval_probability(&m, 0.0, f64::INFINITY).unwrap() - 0.5).abs() < 1e-15);
        assert!(interval_probability(&m, 1.0, 1.0).is_err());
        let oracle = simpson(|y| m.density(y), 0.4, 2.2, 2000);
        assert!((interval_probability(&m, 0.4, 2.2).unwrap() - oracle).abs() < 1e-12);
        let far = GaussianMode::new(5.0, 1.0).unwrap();
        let oracle = simpson(|y| far.density(y), -1.0, 0.0, 2000);
        assert!((interval_probability(&far, -1.0, 0.0).unwrap() / oracle - 1.0).abs() < 1e-9);
    }

    #[test]
    fn popper_state_validation() {
        assert!(PopperState::new(7.9, 1.0).is_err());
        assert!(PopperState::new(8.0, 0.0).is_err());
        let s = PopperState::new(8.0, 1.0).unwrap();
        assert!((s.norm_squared() - 1.0).abs() < 1e-6);
        // "almost orthogonal" branches
        let [(a, _), (o, _), _] = s.branches();
        assert!(o.overlap(&a) < 1e-3);
        assert!((o.overlap(&a) - (-8.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn popper_amplitude_properties() {
        let s = PopperState::new(8.0, 1.0).unwrap();
        let v = popper_state_amplitude(&s, 8.0, -8.0).re;
        let dominant = PopperState::BRANCH_WEIGHT / (2.0 * PI).sqrt();
        // Other branches contribute at most ~ψ(0)ψ(8)·2 ~ e^{-16}.
        assert!((v - dominant).abs() < 1e-6 * dominant);
        for (y1, y2) in [(0.3, -2.1), (7.5, -8.8), (1.0, 1.0)] {
            assert_eq!(s.amplitude(y1, y2), s.amplitude(y2, y1));
        }
        // Product Simpson rule over ±(α + 12σ), step σ/50.
        let lim = 20.0;
        let n = 2000;
        let norm = simpson(|y1| simpson(|y2| s.amplitude(y1, y2).powi(2), -lim, lim, n), -lim, lim, n);
        assert!((norm - 1.0).abs() < 1e-6, "{norm}");
        assert!((norm - s.norm_squared()).abs() < 1e-9);
    }

    #[test]
    fn band_probabilities() {
        let s = PopperState::new(8.0, 1.0).unwrap();
        let b1 = Interval::new(6.0, 10.0).unwrap();
        let opposite = Interval::new(-10.0, -6.0).unwrap();
        let same = Interval::new(6.0, 10.0).unwrap();
        let p = conditional_band_probability(&s, &b1, &opposite).unwrap();
        assert!(p >= 0.95);
        // Quadrature oracle of the same conditional.
        let joint = |l1: f64, h1: f64, l2: f64, h2: f64| {
            simpson(|y1| simpson(|y2| s.amplitude(y1, y2).powi(2), l2, h2, 400), l1, h1, 400)
        };
        let oracle = joint(6.0, 10.0, -10.0, -6.0) / joint(6.0, 10.0, -20.0, 20.0);
        assert!((p - oracle).abs() < 1e-8, "{p} vs {oracle}");
        assert!((p - 0.954_499_736).abs() < 1e-6);
        assert!(conditional_band_probability(&s, &b1, &same).unwrap() <= 1e-6);
        let band2 = Interval::new(-1.0, 2.0).unwrap();
        let uncond = conditional_band_probability(&s, &Interval::whole_line(), &band2).unwrap();
        let direct = s.joint_band_probability(&Interval::whole_line(), &band2) / s.norm_squared();
        assert!((uncond - direct).abs() < 1e-15);
        let far = Interval::new(100.0, 101.0).unwrap();
        assert!(matches!(conditional_band_probability(&s, &far, &band2), Err(Error::UndefinedConditional(_))));
    }
}
