use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Axis, Grid1D, SampledWavefunction2D};
use crate::error::{Error, Result};
use crate::par;

/// Renormalization is refused below this pass probability.
pub const POST_SELECTION_FLOOR: f64 = 1e-12;

/// Hard slit: transmits `[center − width/2, center + width/2)` and absorbs
/// everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aperture {
    pub center: f64,
    pub width: f64,
}

impl Aperture {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(Error::InvalidParameter(format!("aperture needs width > 0, got {width}")));
        }
        Ok(Self { center, width })
    }

    pub fn centered(width: f64) -> Result<Self> {
        Self::new(0.0, width)
    }

    pub fn transmits(&self, y: f64) -> bool {
        y >= self.center - 0.5 * self.width && y < self.center + 0.5 * self.width
    }

    fn check_fits(&self, grid: &Grid1D) -> Result<()> {
        if self.center - 0.5 * self.width < grid.y_min() || self.center + 0.5 * self.width > grid.y_max() {
            return Err(Error::GridTooSmall(format!(
                "aperture of width {} at {} does not fit in [{}, {}]",
                self.width,
                self.center,
                grid.y_min(),
                grid.y_max()
            )));
        }
        Ok(())
    }
}

/// Both branches of a hard aperture, left unnormalized.
#[derive(Debug, Clone)]
pub struct ApertureOutcome {
    pub passed: SampledWavefunction2D,
    pub pass_probability: f64,
    pub absorbed: SampledWavefunction2D,
}

/// Splits `psi` into the part inside the aperture on `axis` and the part
/// absorbed by the walls.
pub fn apply_aperture(psi: &SampledWavefunction2D, axis: Axis, ap: &Aperture) -> Result<ApertureOutcome> {
    let (grid, n2) = match axis {
        Axis::One => (psi.grid1, psi.grid2.len()),
        Axis::Two => (psi.grid2, psi.grid2.len()),
    };
    ap.check_fits(&grid)?;
    let mask: Vec<bool> = grid.nodes().into_iter().map(|y| ap.transmits(y)).collect();
    let zero = Complex64::new(0.0, 0.0);
    let mut passed = psi.amplitudes.clone();
    let mut absorbed = psi.amplitudes.clone();
    let keep = |i1: usize, i2: usize| match axis {
        Axis::One => mask[i1],
        Axis::Two => mask[i2],
    };
    par::for_each_chunk_mut(&mut passed, n2, |i1, row| {
        for (i2, z) in row.iter_mut().enumerate() {
            if !keep(i1, i2) {
                *z = zero;
            }
        }
    });
    par::for_each_chunk_mut(&mut absorbed, n2, |i1, row| {
        for (i2, z) in row.iter_mut().enumerate() {
            if keep(i1, i2) {
                *z = zero;
            }
        }
    });
    let passed = SampledWavefunction2D::from_samples(psi.grid1, psi.grid2, passed)?;
    let absorbed = SampledWavefunction2D::from_samples(psi.grid1, psi.grid2, absorbed)?;
    Ok(ApertureOutcome { pass_probability: passed.norm_tracked, passed, absorbed })
}

/// Renormalizes the both-passed branch: the state seen by coincidence-wired
/// detectors.
pub fn condition_on_coincidence(passed: SampledWavefunction2D) -> Result<SampledWavefunction2D> {
    let norm = passed.discrete_norm();
    if !(norm > POST_SELECTION_FLOOR) {
        return Err(Error::EmptyPostSelection(norm));
    }
    let mut out = passed.scaled(norm.sqrt().recip());
    out.norm_tracked = 1.0;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{interval_probability, GaussianMode, PopperState};
    use crate::gridprop::discretize_2d;

    fn popper(grid: &Grid1D) -> (PopperState, SampledWavefunction2D) {
        let s = PopperState::new(8.0, 1.0).unwrap();
        (s, discretize_2d(&s, grid, grid).unwrap())
    }

    #[test]
    fn wide_aperture_passes_everything() {
        let g = Grid1D::with_spacing(0.125, 512).unwrap();
        let (_, psi) = popper(&g);
        let out = apply_aperture(&psi, Axis::Two, &Aperture::centered(g.extent()).unwrap()).unwrap();
        assert!(out.passed.amplitudes == psi.amplitudes);
        assert!((out.pass_probability - psi.norm_tracked).abs() < 1e-10);
        assert_eq!(out.absorbed.discrete_norm(), 0.0);
        let cond = condition_on_coincidence(out.passed).unwrap();
        assert!((cond.discrete_norm() - 1.0).abs() < 1e-10);
        assert!(cond.trace_distance(&psi).unwrap() < 1e-7);
    }

    #[test]
    fn central_slit_pass_probability() {
        let g = Grid1D::with_spacing(0.125, 512).unwrap();
        let (s, psi) = popper(&g);
        let out = apply_aperture(&psi, Axis::Two, &Aperture::centered(6.0).unwrap()).unwrap();
        let central = GaussianMode::new(0.0, s.sigma).unwrap();
        let oracle = interval_probability(&central, -3.0, 3.0).unwrap() / 3.0;
        assert!((out.pass_probability - oracle).abs() < 1e-3, "{}", out.pass_probability);
        assert!((out.pass_probability - 0.3324).abs() < 2e-3);
        let total = out.passed.discrete_norm() + out.absorbed.discrete_norm();
        assert!((total - psi.discrete_norm()).abs() < 1e-10);

        // Post-selected state ≈ ψ_0(y1)ψ_0(y2), truncated to the slit on axis 2.
        let cond = condition_on_coincidence(out.passed).unwrap();
        let product = |truncate: bool| {
            crate::gridprop::SampledWavefunction2D::from_fn(g, g, move |y1, y2| {
                let inside = !truncate || (-3.0..3.0).contains(&y2);
                Complex64::new(if inside { central.amplitude(y1) * central.amplitude(y2) } else { 0.0 }, 0.0)
            })
        };
        let dist = cond.trace_distance(&product(true)).unwrap();
        assert!(dist < 1e-3, "{dist}");
        // Against the untruncated product the distance is set by the 0.27% cut.
        let dist = cond.trace_distance(&product(false)).unwrap();
        let expected = (1.0 - interval_probability(&central, -3.0, 3.0).unwrap()).sqrt();
        assert!((dist - expected).abs() < 1e-3, "{dist} vs {expected}");
    }

    #[test]
    fn vanishing_aperture() {
        let g = Grid1D::with_spacing(0.125, 512).unwrap();
        let (_, psi) = popper(&g);
        let out = apply_aperture(&psi, Axis::Two, &Aperture::centered(1e-6).unwrap()).unwrap();
        assert_eq!(out.pass_probability, 0.0);
        assert!(matches!(condition_on_coincidence(out.passed), Err(Error::EmptyPostSelection(_))));
        assert!(Aperture::centered(0.0).is_err());
        assert!(apply_aperture(&psi, Axis::One, &Aperture::centered(100.0).unwrap()).is_err());
    }
}
