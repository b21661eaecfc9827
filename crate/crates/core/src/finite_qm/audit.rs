//! Randomized check that local operations on side 2 leave side-1 statistics
//! untouched.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    apply_local_unitary, marginal_distribution, measure_nonselective, partial_trace_second, random_decomposition,
    random_mixed, random_pure, random_unitary, BipartiteDensityOperator, CMatrix, ComplexOperator,
    ObservableDecomposition,
};
use crate::error::{Error, Result};
use crate::par;

/// Largest deviation a trial may show and still count as passing.
pub const AUDIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub trials: usize,
    pub dims: (usize, usize),
    pub seed: u64,
    pub max_deviation: f64,
    /// Indices of trials that exceeded [`AUDIT_TOLERANCE`] or hit an invalid
    /// intermediate state. Trial `i` is reproduced by stream `i` of the seed.
    pub failures: Vec<usize>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.max_deviation < AUDIT_TOLERANCE
    }
}

/// Maximum deviation over the three no-signaling identities for one sample:
///
/// 1. reduced side-1 state is unchanged by the local unitary `u`;
/// 2. `Σ_j p_j Pr(a_r | collapsed_j) = Pr(a_r)` for every outcome `r`;
/// 3. the `p_j`-weighted remix of collapsed states has the original reduction.
pub fn audit_trial(
    rho: &BipartiteDensityOperator,
    a: &ObservableDecomposition,
    b: &ObservableDecomposition,
    u: &ComplexOperator,
) -> Result<f64> {
    let before = partial_trace_second(rho);
    let after = partial_trace_second(&apply_local_unitary(rho, u)?);
    let unitary_dev = after.max_distance(&before);

    let direct = marginal_distribution(rho, a)?;
    let branches = measure_nonselective(rho, b)?;
    let mut mixed = vec![0.0; direct.len()];
    let d1 = rho.dims().0;
    let mut remixed = CMatrix::zeros(d1, d1);
    for br in &branches {
        if let Some(state) = &br.collapsed {
            for (acc, p) in mixed.iter_mut().zip(marginal_distribution(state, a)?) {
                *acc += br.probability * p;
            }
            remixed += partial_trace_second(state).entries() * Complex64::from(br.probability);
        }
    }
    let measure_dev = mixed.iter().zip(&direct).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let remix_dev = (remixed - before.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(unitary_dev.max(measure_dev).max(remix_dev))
}

fn run_trial(seed: u64, trial: usize, d1: usize, d2: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    // Even trials use pure states, odd trials mixtures, so both are always hit.
    let rho = if trial.is_multiple_of(2) {
        random_pure(&mut rng, d1, d2)
    } else {
        let rank = rng.random_range(2..=d1 * d2);
        random_mixed(&mut rng, d1, d2, rank)
    };
    let a = random_decomposition(&mut rng, d1);
    let b = random_decomposition(&mut rng, d2);
    let u = random_unitary(&mut rng, d2);
    audit_trial(&rho, &a, &b, &u)
}

pub fn no_signaling_audit(trials: usize, dims: (usize, usize), seed: u64) -> Result<AuditReport> {
    let (d1, d2) = dims;
    if trials == 0 {
        return Err(Error::InvalidParameter("audit needs at least one trial".into()));
    }
    if d1 < 2 || d2 < 2 {
        return Err(Error::InvalidParameter(format!("audit dims must be at least 2, got ({d1}, {d2})")));
    }
    let outcomes = par::map_range(trials, |i| run_trial(seed, i, d1, d2));
    let mut max_deviation: f64 = 0.0;
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(dev) => {
                max_deviation = max_deviation.max(dev);
                if !(dev < AUDIT_TOLERANCE) {
                    failures.push(i);
                }
            }
            Err(_) => failures.push(i),
        }
    }
    Ok(AuditReport { trials, dims, seed, max_deviation, failures })
}
