//! Monte Carlo detector clicks drawn from the post-selected joint density.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridprop::SampledWavefunction2D;
use crate::par;

/// Events per RNG stream. Each chunk owns stream `chunk_index`, so the
/// sample does not depend on how chunks are scheduled.
pub const CLICK_CHUNK: usize = 4096;

/// Bin width as a fraction of the `6σ̄` counter interval.
pub const BINS_PER_COUNTER_WIDTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickSettings {
    pub count: usize,
    pub seed: u64,
}

/// Coincidence events `(y1, y2)` with positions jittered uniformly inside
/// the sampled cell.
pub fn sample_coincidences(psi: &SampledWavefunction2D, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let weights: Vec<f64> = psi.amplitudes.iter().map(|z| z.norm_sqr()).collect();
    let index = WeightedIndex::new(&weights).map_err(|_| Error::ZeroMass)?;
    drop(weights);
    let (g1, g2) = (psi.grid1, psi.grid2);
    let n2 = g2.len();
    let chunks = count.div_ceil(CLICK_CHUNK);
    let parts = par::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let len = CLICK_CHUNK.min(count - c * CLICK_CHUNK);
        (0..len)
            .map(|_| {
                let k = index.sample(&mut rng);
                let j1 = rng.random_range(-0.5..0.5);
                let j2 = rng.random_range(-0.5..0.5);
                (g1.node(k / n2) + j1 * g1.spacing(), g2.node(k % n2) + j2 * g2.spacing())
            })
            .collect::<Vec<_>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Counts in bins of `bin_width` centred on multiples of `bin_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickHistogram {
    pub bin_width: f64,
    /// Index of the first bin; bin `i` is centred at `(first_bin + i)·bin_width`.
    pub first_bin: i64,
    pub counts: Vec<u64>,
}

impl ClickHistogram {
    pub fn from_positions(positions: impl IntoIterator<Item = f64>, bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("bin width must be positive, got {bin_width}")));
        }
        let bins: Vec<i64> = positions.into_iter().map(|y| (y / bin_width).round() as i64).collect();
        let (Some(&lo), Some(&hi)) = (bins.iter().min(), bins.iter().max()) else {
            return Ok(Self { bin_width, first_bin: 0, counts: Vec::new() });
        };
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for b in bins {
            counts[(b - lo) as usize] += 1;
        }
        Ok(Self { bin_width, first_bin: lo, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn center(&self, i: usize) -> f64 {
        (self.first_bin + i as i64) as f64 * self.bin_width
    }

    /// Spread of the bin centres weighted by counts.
    pub fn stdev(&self) -> Result<f64> {
        let total = self.total() as f64;
        if total == 0.0 {
            return Err(Error::ZeroMass);
        }
        let mean = self.counts.iter().enumerate().map(|(i, &c)| c as f64 * self.center(i)).sum::<f64>() / total;
        let var = self.counts.iter().enumerate().map(|(i, &c)| c as f64 * (self.center(i) - mean).powi(2)).sum::<f64>()
            / total;
        Ok(var.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickSummary {
    pub count: usize,
    pub seed: u64,
    pub bin_width: f64,
    pub l_stdev: f64,
    pub r_stdev: f64,
}

pub(crate) fn summarize(psi: &SampledWavefunction2D, settings: &ClickSettings, sigma_bar: f64) -> Result<ClickSummary> {
    let events = sample_coincidences(psi, settings.count, settings.seed)?;
    let bin_width = 6.0 * sigma_bar / BINS_PER_COUNTER_WIDTH;
    let l = ClickHistogram::from_positions(events.iter().map(|e| e.0), bin_width)?;
    let r = ClickHistogram::from_positions(events.iter().map(|e| e.1), bin_width)?;
    Ok(ClickSummary { count: settings.count, seed: settings.seed, bin_width, l_stdev: l.stdev()?, r_stdev: r.stdev()? })
}
