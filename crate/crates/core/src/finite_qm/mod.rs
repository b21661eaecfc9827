//! Finite-dimensional bipartite quantum states and local operations.
//!
//! Operators are dense complex matrices. A bipartite operator on
//! `H1 ⊗ H2` uses the row/column index `i * d2 + j` for the basis vector
//! `|i⟩ ⊗ |j⟩`.

mod audit;
mod random;

pub use audit::{audit_trial, no_signaling_audit, AuditReport, AUDIT_TOLERANCE};
pub use random::{random_decomposition, random_density, random_mixed, random_pure, random_unitary};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Default tolerance for Hermiticity, trace and positivity checks.
pub const VALIDATION_TOLERANCE: f64 = 1e-10;

/// Outcomes below this probability yield no collapsed state.
pub const BRANCH_PROBABILITY_FLOOR: f64 = 1e-14;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dense square complex matrix together with its tensor-factor dimensions.
///
/// Single-party operators carry dims `(d, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    entries: CMatrix,
    dims: (usize, usize),
}

impl ComplexOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let n = entries.nrows();
        Self::bipartite(entries, n, 1)
    }

    pub fn bipartite(entries: CMatrix, d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::DimensionMismatch("factor dimensions must be positive".into()));
        }
        if entries.nrows() != entries.ncols() || entries.nrows() != d1 * d2 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot carry dims ({d1}, {d2})",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries, dims: (d1, d2) })
    }

    pub fn identity(d: usize) -> Self {
        Self { entries: CMatrix::identity(d, d), dims: (d, 1) }
    }

    /// `|v⟩⟨v|` for a (not necessarily normalized) vector.
    pub fn projector_onto(v: &[Complex64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidParameter("projector onto zero vector".into()));
        }
        let col = nalgebra::DVector::from_column_slice(v) / Complex64::from(norm2.sqrt());
        Self::new(&col * col.adjoint())
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.entries.adjoint() * &self.entries - CMatrix::identity(n, n)))
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::from(0.5);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Kronecker product `self ⊗ other`, dims `(self.dim, other.dim)`.
    pub fn kron(&self, other: &ComplexOperator) -> ComplexOperator {
        ComplexOperator { entries: self.entries.kronecker(&other.entries), dims: (self.dim(), other.dim()) }
    }

    /// Max-norm distance between entries.
    pub fn max_distance(&self, other: &ComplexOperator) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }
}

/// Validated bipartite state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDensityOperator {
    op: ComplexOperator,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { hermiticity: VALIDATION_TOLERANCE, trace: VALIDATION_TOLERANCE, positivity: VALIDATION_TOLERANCE }
    }
}

impl BipartiteDensityOperator {
    pub fn new(op: ComplexOperator) -> Result<Self> {
        Self::with_tolerances(op, Tolerances::default())
    }

    pub fn with_tolerances(op: ComplexOperator, tol: Tolerances) -> Result<Self> {
        let dev = op.hermiticity_deviation();
        if dev > tol.hermiticity {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::BadTrace { trace: tr.re, tol: tol.trace });
        }
        let min_ev = op.min_eigenvalue();
        if min_ev < -tol.positivity {
            return Err(Error::NotPositive { min_eigenvalue: min_ev });
        }
        Ok(Self { op })
    }

    pub fn from_matrix(entries: CMatrix, d1: usize, d2: usize) -> Result<Self> {
        Self::new(ComplexOperator::bipartite(entries, d1, d2)?)
    }

    /// Pure state `|ψ⟩⟨ψ|` from amplitudes in the `i * d2 + j` ordering.
    pub fn pure(amplitudes: &[Complex64], d1: usize, d2: usize) -> Result<Self> {
        let p = ComplexOperator::projector_onto(amplitudes)?;
        Self::new(ComplexOperator::bipartite(p.entries, d1, d2)?)
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(rho_a: &ComplexOperator, rho_b: &ComplexOperator) -> Result<Self> {
        Self::new(rho_a.kron(rho_b))
    }

    pub fn maximally_mixed(d1: usize, d2: usize) -> Result<Self> {
        let d = d1 * d2;
        Self::from_matrix(CMatrix::identity(d, d) / Complex64::from(d as f64), d1, d2)
    }

    /// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2` on two qubits.
    pub fn bell_phi_plus() -> Self {
        let s = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        let z = Complex64::from(0.0);
        Self::pure(&[s, z, z, s], 2, 2).expect("Bell state is a valid density operator")
    }

    pub fn op(&self) -> &ComplexOperator {
        &self.op
    }

    pub fn dims(&self) -> (usize, usize) {
        self.op.dims
    }

    pub fn into_operator(self) -> ComplexOperator {
        self.op
    }
}

/// Spectral decomposition `Σ_i a_i P_i` with rank-one orthogonal projectors.
#[derive(Debug, Clone)]
pub struct ObservableDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexOperator>,
}

impl ObservableDecomposition {
    pub fn new(eigenvalues: Vec<f64>, projectors: Vec<ComplexOperator>) -> Result<Self> {
        let tol = VALIDATION_TOLERANCE;
        let bad = |m: String| Err(Error::InvalidDecomposition(m));
        if projectors.is_empty() {
            return bad("no projectors".into());
        }
        if eigenvalues.len() != projectors.len() {
            return bad(format!("{} eigenvalues for {} projectors", eigenvalues.len(), projectors.len()));
        }
        let d = projectors[0].dim();
        if projectors.len() != d {
            return bad(format!("{} rank-one projectors cannot resolve identity in dimension {d}", projectors.len()));
        }
        for (i, a) in eigenvalues.iter().enumerate() {
            if !a.is_finite() {
                return bad(format!("eigenvalue {i} is not finite"));
            }
            for b in &eigenvalues[..i] {
                if (a - b).abs() <= tol {
                    return Err(Error::DegenerateSpectrum(*b, *a));
                }
            }
        }
        let mut sum = CMatrix::zeros(d, d);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != d {
                return bad(format!("projector {i} has dimension {}", p.dim()));
            }
            if p.hermiticity_deviation() > tol {
                return bad(format!("projector {i} is not Hermitian"));
            }
            let pe = p.entries();
            if max_abs(&(pe * pe - pe)) > tol {
                return bad(format!("projector {i} is not idempotent"));
            }
            if (p.trace().re - 1.0).abs() > tol {
                return bad(format!("projector {i} is not rank one"));
            }
            for (j, q) in projectors[..i].iter().enumerate() {
                if max_abs(&(pe * q.entries())) > tol {
                    return bad(format!("projectors {j} and {i} are not orthogonal"));
                }
            }
            sum += pe;
        }
        if max_abs(&(sum - CMatrix::identity(d, d))) > tol {
            return bad("projectors do not sum to identity".into());
        }
        Ok(Self { eigenvalues, projectors })
    }

    /// Decomposition along the columns of a unitary matrix.
    pub fn from_basis(eigenvalues: Vec<f64>, basis: &CMatrix) -> Result<Self> {
        let projectors =
            basis.column_iter().map(|c| ComplexOperator::projector_onto(c.as_slice())).collect::<Result<Vec<_>>>()?;
        Self::new(eigenvalues, projectors)
    }

    /// Computational basis with eigenvalues `0, 1, …, d-1`.
    pub fn computational(d: usize) -> Result<Self> {
        Self::from_basis((0..d).map(|i| i as f64).collect(), &CMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexOperator] {
        &self.projectors
    }

    /// The observable `Σ_i a_i P_i` itself.
    pub fn observable(&self) -> CMatrix {
        let d = self.dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(d, d), |acc, (a, p)| acc + p.entries() * Complex64::from(*a))
    }
}

/// Reduced operator on the first factor: blockwise trace over the second.
pub fn partial_trace_second(rho: &BipartiteDensityOperator) -> ComplexOperator {
    let (d1, d2) = rho.dims();
    let m = rho.op().entries();
    let reduced = CMatrix::from_fn(d1, d1, |i, k| (0..d2).map(|j| m[(i * d2 + j, k * d2 + j)]).sum());
    ComplexOperator { entries: reduced, dims: (d1, 1) }
}

/// `(I ⊗ u) ρ (I ⊗ u)†` for a unitary `u` on the second factor.
pub fn apply_local_unitary(rho: &BipartiteDensityOperator, u: &ComplexOperator) -> Result<BipartiteDensityOperator> {
    let (d1, d2) = rho.dims();
    if u.dim() != d2 {
        return Err(Error::DimensionMismatch(format!("unitary of dimension {} on factor of dimension {d2}", u.dim())));
    }
    let deviation = u.unitarity_deviation();
    if deviation > VALIDATION_TOLERANCE {
        return Err(Error::NotUnitary { deviation });
    }
    let local = ComplexOperator::identity(d1).kron(u);
    let m = local.entries() * rho.op().entries() * local.entries().adjoint();
    BipartiteDensityOperator::from_matrix(m, d1, d2)
}

/// One outcome of a nonselective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub eigenvalue: f64,
    pub probability: f64,
    /// `None` when `probability` is below [`BRANCH_PROBABILITY_FLOOR`].
    pub collapsed: Option<BipartiteDensityOperator>,
}

/// Projective measurement of `b` on the second factor, every outcome kept.
pub fn measure_nonselective(
    rho: &BipartiteDensityOperator,
    b: &ObservableDecomposition,
) -> Result<Vec<MeasurementBranch>> {
    let (d1, d2) = rho.dims();
    if b.dim() != d2 {
        return Err(Error::DimensionMismatch(format!(
            "observable of dimension {} on factor of dimension {d2}",
            b.dim()
        )));
    }
    let id = ComplexOperator::identity(d1);
    b.eigenvalues()
        .iter()
        .zip(b.projectors())
        .map(|(&eigenvalue, q)| {
            let lifted = id.kron(q);
            let projected = lifted.entries() * rho.op().entries();
            let probability = projected.trace().re;
            let collapsed = if probability > BRANCH_PROBABILITY_FLOOR {
                let m = (projected * lifted.entries()) / Complex64::from(probability);
                Some(BipartiteDensityOperator::from_matrix(m, d1, d2)?)
            } else {
                None
            };
            Ok(MeasurementBranch { eigenvalue, probability, collapsed })
        })
        .collect()
}

/// Outcome distribution of `a` measured on the first factor.
pub fn marginal_distribution(rho: &BipartiteDensityOperator, a: &ObservableDecomposition) -> Result<Vec<f64>> {
    let (d1, d2) = rho.dims();
    if a.dim() != d1 {
        return Err(Error::DimensionMismatch(format!(
            "observable of dimension {} on factor of dimension {d1}",
            a.dim()
        )));
    }
    let id = ComplexOperator::identity(d2);
    Ok(a.projectors().iter().map(|p| (p.kron(&id).entries() * rho.op().entries()).trace().re).collect())
}
