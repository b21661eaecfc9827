use num_complex::Complex64;

use super::{Axis, Grid1D, SampledDensity};
use crate::error::{Error, Result};
use crate::gaussian::{interval_probability, GaussianMode, PopperState};
use crate::par;

/// Largest analytic probability mass allowed outside a grid at sampling time.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

/// Analytic one-particle states that can be sampled onto a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analytic1D {
    Gaussian(GaussianMode),
    /// Normalized characteristic function `1/√width` on `[center − width/2, center + width/2)`.
    Slit {
        center: f64,
        width: f64,
    },
}

impl Analytic1D {
    pub fn amplitude(&self, y: f64) -> Complex64 {
        match *self {
            Analytic1D::Gaussian(m) => Complex64::new(m.amplitude(y), 0.0),
            Analytic1D::Slit { center, width } => {
                let inside = y >= center - 0.5 * width && y < center + 0.5 * width;
                Complex64::new(if inside { width.powf(-0.5) } else { 0.0 }, 0.0)
            }
        }
    }
}

fn gaussian_mass_outside(m: &GaussianMode, grid: &Grid1D) -> f64 {
    let below = interval_probability(m, f64::NEG_INFINITY, grid.y_min()).unwrap_or(0.0);
    let above = interval_probability(m, grid.y_max(), f64::INFINITY).unwrap_or(0.0);
    below + above
}

fn sum_sq(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction1D {
    pub grid: Grid1D,
    pub amplitudes: Vec<Complex64>,
    /// Expected value of `Σ|ψ|²·spacing`, carried through every operation.
    pub norm_tracked: f64,
}

impl SampledWavefunction1D {
    pub fn from_samples(grid: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples on a {}-point grid",
                amplitudes.len(),
                grid.len()
            )));
        }
        let norm_tracked = sum_sq(&amplitudes) * grid.spacing();
        Ok(Self { grid, amplitudes, norm_tracked })
    }

    pub fn discrete_norm(&self) -> f64 {
        sum_sq(&self.amplitudes) * self.grid.spacing()
    }

    pub fn norm_drift(&self) -> f64 {
        (self.discrete_norm() - self.norm_tracked).abs()
    }

    pub fn density(&self) -> SampledDensity {
        SampledDensity { grid: self.grid, values: self.amplitudes.iter().map(|z| z.norm_sqr()).collect() }
    }
}

/// Samples an analytic state at the grid nodes and rescales to unit norm.
pub fn discretize_1d(analytic: &Analytic1D, grid: &Grid1D) -> Result<SampledWavefunction1D> {
    match analytic {
        Analytic1D::Gaussian(m) => {
            let outside = gaussian_mass_outside(m, grid);
            if outside > SUPPORT_TOLERANCE {
                return Err(Error::GridTooSmall(format!("{outside:.3e} of the packet lies outside the grid")));
            }
        }
        Analytic1D::Slit { center, width } => {
            if !(*width > 0.0) {
                return Err(Error::InvalidParameter(format!("slit width must be positive, got {width}")));
            }
            if center - 0.5 * width < grid.y_min() || center + 0.5 * width > grid.y_max() {
                return Err(Error::GridTooSmall("slit extends past the grid".into()));
            }
        }
    }
    let mut amplitudes: Vec<Complex64> = grid.nodes().iter().map(|&y| analytic.amplitude(y)).collect();
    let norm = sum_sq(&amplitudes) * grid.spacing();
    if !(norm > 0.0) {
        return Err(Error::GridTooSmall("state is not resolved by any grid node".into()));
    }
    let scale = norm.sqrt().recip();
    amplitudes.iter_mut().for_each(|z| *z *= scale);
    SampledWavefunction1D::from_samples(*grid, amplitudes)
}

/// Two-particle amplitudes, row-major with axis 1 as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction2D {
    pub grid1: Grid1D,
    pub grid2: Grid1D,
    pub amplitudes: Vec<Complex64>,
    pub norm_tracked: f64,
}

impl SampledWavefunction2D {
    pub fn from_samples(grid1: Grid1D, grid2: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid1.len() * grid2.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples on a {}x{} grid",
                amplitudes.len(),
                grid1.len(),
                grid2.len()
            )));
        }
        let mut psi = Self { grid1, grid2, amplitudes, norm_tracked: 0.0 };
        psi.norm_tracked = psi.discrete_norm();
        Ok(psi)
    }

    /// Evaluates `f(y1, y2)` at every node, rows in parallel.
    pub fn from_fn<F>(grid1: Grid1D, grid2: Grid1D, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Sync + Send,
    {
        let n2 = grid2.len();
        let nodes2 = grid2.nodes();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); grid1.len() * n2];
        par::for_each_chunk_mut(&mut amplitudes, n2, |i1, row| {
            let y1 = grid1.node(i1);
            for (z, &y2) in row.iter_mut().zip(&nodes2) {
                *z = f(y1, y2);
            }
        });
        let mut psi = Self { grid1, grid2, amplitudes, norm_tracked: 0.0 };
        psi.norm_tracked = psi.discrete_norm();
        psi
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid1.len(), self.grid2.len())
    }

    pub fn cell_area(&self) -> f64 {
        self.grid1.spacing() * self.grid2.spacing()
    }

    pub fn get(&self, i1: usize, i2: usize) -> Complex64 {
        self.amplitudes[i1 * self.grid2.len() + i2]
    }

    pub(crate) fn row_masses(&self) -> Vec<f64> {
        par::map_chunks(&self.amplitudes, self.grid2.len(), sum_sq)
    }

    pub fn discrete_norm(&self) -> f64 {
        self.row_masses().iter().sum::<f64>() * self.cell_area()
    }

    pub fn norm_drift(&self) -> f64 {
        (self.discrete_norm() - self.norm_tracked).abs()
    }

    /// `⟨self|other⟩` on a shared grid.
    pub fn inner(&self, other: &SampledWavefunction2D) -> Result<Complex64> {
        if self.grid1 != other.grid1 || self.grid2 != other.grid2 {
            return Err(Error::DimensionMismatch("wavefunctions live on different grids".into()));
        }
        let n2 = self.grid2.len();
        let partial = par::map_range(self.grid1.len(), |i1| {
            let r = i1 * n2..(i1 + 1) * n2;
            self.amplitudes[r.clone()].iter().zip(&other.amplitudes[r]).map(|(a, b)| a.conj() * b).sum::<Complex64>()
        });
        Ok(partial.into_iter().sum::<Complex64>() * self.cell_area())
    }

    /// Trace distance `√(1 − |⟨a|b⟩|²)` between the normalized pure states.
    pub fn trace_distance(&self, other: &SampledWavefunction2D) -> Result<f64> {
        let overlap = self.inner(other)?.norm_sqr() / (self.discrete_norm() * other.discrete_norm());
        Ok((1.0 - overlap).max(0.0).sqrt())
    }

    pub fn marginal(&self, axis: Axis) -> SampledDensity {
        let (n1, n2) = self.shape();
        match axis {
            Axis::One => {
                let dx2 = self.grid2.spacing();
                let values = self.row_masses().into_iter().map(|m| m * dx2).collect();
                SampledDensity { grid: self.grid1, values }
            }
            Axis::Two => {
                let dx1 = self.grid1.spacing();
                const BLOCK: usize = 256;
                let blocks = n2.div_ceil(BLOCK);
                let sums = par::map_range(blocks, |b| {
                    let cols = b * BLOCK..((b + 1) * BLOCK).min(n2);
                    let mut acc = vec![0.0; cols.len()];
                    for i1 in 0..n1 {
                        let row = &self.amplitudes[i1 * n2 + cols.start..i1 * n2 + cols.end];
                        for (a, z) in acc.iter_mut().zip(row) {
                            *a += z.norm_sqr();
                        }
                    }
                    acc
                });
                let values = sums.into_iter().flatten().map(|m| m * dx1).collect();
                SampledDensity { grid: self.grid2, values }
            }
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amplitudes.iter_mut().for_each(|z| *z *= factor);
        self.norm_tracked *= factor * factor;
        self
    }
}

/// Samples the three-branch state and rescales to its analytic norm.
pub fn discretize_2d(state: &PopperState, grid1: &Grid1D, grid2: &Grid1D) -> Result<SampledWavefunction2D> {
    for (m1, m2) in state.branches() {
        let outside = gaussian_mass_outside(&m1, grid1).max(gaussian_mass_outside(&m2, grid2));
        if outside > SUPPORT_TOLERANCE {
            return Err(Error::GridTooSmall(format!("{outside:.3e} of a branch lies outside the grid")));
        }
    }
    let psi = SampledWavefunction2D::from_fn(*grid1, *grid2, |y1, y2| Complex64::new(state.amplitude(y1, y2), 0.0));
    let scale = (state.norm_squared() / psi.norm_tracked).sqrt();
    let mut psi = psi.scaled(scale);
    psi.norm_tracked = state.norm_squared();
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{GaussianMode, PopperState};

    #[test]
    fn gaussian_sampling() {
        let g = Grid1D::symmetric(16.0, 1024).unwrap();
        let m = GaussianMode::new(0.0, 1.0).unwrap();
        let psi = discretize_1d(&Analytic1D::Gaussian(m), &g).unwrap();
        assert!((psi.discrete_norm() - 1.0).abs() < 1e-10);
        assert!(psi.norm_drift() < 1e-12);
        for j in [0, 100, 511, 512, 900] {
            let exact = m.amplitude(g.node(j));
            assert!((psi.amplitudes[j].re - exact).abs() <= 1e-12 * exact.max(1e-300));
        }
        let narrow = Grid1D::symmetric(4.0, 64).unwrap();
        assert!(matches!(discretize_1d(&Analytic1D::Gaussian(m), &narrow), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn slit_sampling() {
        let g = Grid1D::with_spacing(0.125, 256).unwrap();
        let psi = discretize_1d(&Analytic1D::Slit { center: 0.0, width: 1.0 }, &g).unwrap();
        assert!((psi.discrete_norm() - 1.0).abs() < 1e-14);
        // Aligned slit: exactly width / spacing nodes, each at the analytic height.
        let lit: Vec<_> = psi.amplitudes.iter().filter(|z| z.re > 0.0).collect();
        assert_eq!(lit.len(), 8);
        assert!(lit.iter().all(|z| (z.re - 1.0).abs() < 1e-14));
        assert!(discretize_1d(&Analytic1D::Slit { center: 15.9, width: 1.0 }, &g).is_err());
        assert!(discretize_1d(&Analytic1D::Slit { center: 0.0, width: 0.01 }, &g).is_err());
    }

    #[test]
    fn popper_state_sampling() {
        let s = PopperState::new(8.0, 1.0).unwrap();
        // Cell edges fall on multiples of 1/8, so the windows below align with them.
        let g = Grid1D::with_spacing(0.125, 512).unwrap();
        let psi = discretize_2d(&s, &g, &g).unwrap();
        assert!((psi.discrete_norm() - 1.0).abs() < 1e-6);
        assert!(psi.norm_drift() < 1e-12);
        let n = g.len();
        for (i, j) in [(10, 300), (200, 311), (256, 255)] {
            assert_eq!(psi.get(i, j), psi.get(j, i));
        }
        // Axis-1 marginal: three bumps of mass 1/3 each. Windows split at the
        // midpoints, so the expected window mass includes the neighbours' tails.
        let m1 = psi.marginal(Axis::One);
        for (lo, hi) in [(-32.0, -4.0), (-4.0, 4.0), (4.0, 32.0)] {
            let got =
                (0..n).filter(|&j| g.node(j) >= lo && g.node(j) < hi).map(|j| m1.values[j]).sum::<f64>() * g.spacing();
            let expected: f64 = s
                .branches()
                .iter()
                .map(|(a, _)| crate::gaussian::interval_probability(a, lo, hi).unwrap())
                .sum::<f64>()
                / 3.0;
            assert!((got - expected).abs() < 1e-6, "[{lo}, {hi}]: {got} vs {expected}");
            assert!((got - 1.0 / 3.0).abs() < 1e-4);
        }
        // Analytic marginal: (1/3) Σ_k N(y; β_k, σ) plus cross terms of order e^{-16}.
        for j in (0..n).step_by(37) {
            let y = g.node(j);
            let analytic: f64 = s.branches().iter().map(|(a, _)| a.density(y)).sum::<f64>() / 3.0;
            assert!((m1.values[j] - analytic).abs() < 1e-6);
        }
        assert!((m1.mass() - psi.discrete_norm()).abs() < 1e-12);
        let small = Grid1D::symmetric(12.0, 256).unwrap();
        assert!(discretize_2d(&s, &small, &g).is_err());
    }

    #[test]
    fn product_marginal_is_factor_density() {
        let g1 = Grid1D::symmetric(10.0, 128).unwrap();
        let g2 = Grid1D::symmetric(12.0, 256).unwrap();
        let a = GaussianMode::new(1.0, 1.0).unwrap();
        let b = GaussianMode::new(-2.0, 1.5).unwrap();
        let psi =
            SampledWavefunction2D::from_fn(g1, g2, |y1, y2| Complex64::new(a.amplitude(y1) * b.amplitude(y2), 0.0));
        let m1 = psi.marginal(Axis::One);
        let m2 = psi.marginal(Axis::Two);
        for j in 0..128 {
            assert!((m1.values[j] - a.density(g1.node(j))).abs() < 1e-10);
        }
        for j in 0..256 {
            assert!((m2.values[j] - b.density(g2.node(j))).abs() < 1e-10);
        }
        assert!(psi.trace_distance(&psi).unwrap() < 1e-7);
    }
}
