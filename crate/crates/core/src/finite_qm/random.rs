//! Random states, unitaries and observables for property testing.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{BipartiteDensityOperator, CMatrix, ComplexOperator, ObservableDecomposition};

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| gaussian_complex(rng));
    let norm = v.norm();
    v / Complex64::from(norm)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexOperator {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { Complex64::from(1.0) };
        col *= phase;
    }
    ComplexOperator::new(q).expect("QR factor is square and finite")
}

/// Pure state from a normalized complex Gaussian vector.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d1: usize, d2: usize) -> BipartiteDensityOperator {
    let v = gaussian_vector(rng, d1 * d2);
    BipartiteDensityOperator::pure(v.as_slice(), d1, d2).expect("normalized projector is a valid state")
}

/// Mixture of `rank` random pure states with flat-Dirichlet weights.
pub fn random_mixed<R: Rng + ?Sized>(rng: &mut R, d1: usize, d2: usize, rank: usize) -> BipartiteDensityOperator {
    let d = d1 * d2;
    let raw: Vec<f64> = (0..rank.max(1)).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let mut m = CMatrix::zeros(d, d);
    for w in raw {
        let v = gaussian_vector(rng, d);
        m += (&v * v.adjoint()) * Complex64::from(w / total);
    }
    // Symmetrize away rounding asymmetry from the weighted sum.
    let m = (&m + m.adjoint()) * Complex64::from(0.5);
    BipartiteDensityOperator::from_matrix(m, d1, d2).expect("convex mixture of projectors is a valid state")
}

/// Pure or mixed (rank 2..=D) with equal odds.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d1: usize, d2: usize) -> BipartiteDensityOperator {
    let d = d1 * d2;
    if d < 2 || rng.random_bool(0.5) {
        random_pure(rng, d1, d2)
    } else {
        let rank = rng.random_range(2..=d);
        random_mixed(rng, d1, d2, rank)
    }
}

/// Observable with a random eigenbasis and distinct random eigenvalues.
pub fn random_decomposition<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ObservableDecomposition {
    let basis = random_unitary(rng, d);
    // Spread eigenvalues over disjoint unit cells so they are always distinct.
    let eigenvalues = (0..d).map(|i| i as f64 + 0.1 + 0.8 * rng.random::<f64>()).collect();
    ObservableDecomposition::from_basis(eigenvalues, basis.entries()).expect("unitary columns resolve identity")
}
