//! Regularized `δ(y₁+y₂)`: a Gaussian of width `w` in `(y₁+y₂)/√2` times a
//! broad Gaussian of width `B` in `(y₁−y₂)/√2`. Free evolution with equal
//! masses acts on each rotated coordinate separately, so the single-particle
//! marginal has variance `(w̄² + B̄²)/2`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::gaussian::{spread_after_time, GaussianMode, PhysicalParams};
use crate::gridprop::{Axis, EdgeGuard, FreeEvolution, Grid1D, SampledWavefunction2D};

/// Auto grids refuse to grow past this many points per axis.
pub const MAX_EPR_POINTS: usize = 4096;
/// Cells per correlation width on auto grids.
const CELLS_PER_WIDTH: f64 = 6.0;
/// Explicit grids must give each width at least this many cells.
const MIN_CELLS_PER_WIDTH: f64 = 3.0;
/// Auto half-extent in units of the widest evolved principal spread.
const REACH: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprPoint {
    pub width: f64,
    pub marginal_stdev: f64,
    /// `√((w̄² + B̄²)/2)` from the closed-form spreads.
    pub predicted_stdev: f64,
}

fn validate(widths: &[f64], broad: f64, t: f64) -> Result<()> {
    ensure(!widths.is_empty(), || "no correlation widths given".into())?;
    for &w in widths {
        ensure(w > 0.0 && w.is_finite(), || format!("correlation width must be positive, got {w}"))?;
    }
    ensure(widths.windows(2).all(|p| p[1] < p[0]), || "correlation widths must be strictly descending".into())?;
    ensure(broad > 0.0 && broad.is_finite(), || format!("broad width must be positive, got {broad}"))?;
    ensure(t >= 0.0 && t.is_finite(), || format!("time must be non-negative, got {t}"))
}

/// Square grid fine enough for the narrowest width and wide enough for the
/// largest evolved spread.
pub fn epr_auto_grid(widths: &[f64], broad: f64, t: f64, p: &PhysicalParams) -> Result<Grid1D> {
    validate(widths, broad, t)?;
    let mut reach = spread_after_time(broad, t, p)?.max(broad);
    for &w in widths {
        reach = reach.max(spread_after_time(w, t, p)?);
    }
    let finest = widths.iter().copied().fold(f64::INFINITY, f64::min);
    let half = REACH * reach;
    let points = ((2.0 * half * CELLS_PER_WIDTH / finest).ceil() as usize)
        .next_power_of_two()
        .max(crate::gridprop::MIN_GRID_POINTS);
    if points > MAX_EPR_POINTS {
        return Err(Error::GridTooSmall(format!(
            "width {finest} at t = {t} needs {points} points per axis, limit is {MAX_EPR_POINTS}"
        )));
    }
    Grid1D::symmetric(half, points)
}

/// Evolved single-particle spread for each correlation width, narrowest last.
pub fn epr_limit_probe(
    widths: &[f64],
    broad: f64,
    t: f64,
    p: &PhysicalParams,
    grid: Option<Grid1D>,
) -> Result<Vec<EprPoint>> {
    validate(widths, broad, t)?;
    let grid = match grid {
        Some(g) => g,
        None => epr_auto_grid(widths, broad, t, p)?,
    };
    let bm = GaussianMode::new(0.0, broad)?;
    let broad_bar = spread_after_time(broad, t, p)?;
    let mut out = Vec::with_capacity(widths.len());
    for &w in widths {
        if grid.spacing() * MIN_CELLS_PER_WIDTH > w {
            return Err(Error::GridTooSmall(format!(
                "spacing {} does not resolve correlation width {w}",
                grid.spacing()
            )));
        }
        let wm = GaussianMode::new(0.0, w)?;
        let psi = SampledWavefunction2D::from_fn(grid, grid, |y1, y2| {
            let (u, v) = ((y1 + y2) * FRAC_1_SQRT_2, (y1 - y2) * FRAC_1_SQRT_2);
            Complex64::new(wm.amplitude(u) * bm.amplitude(v), 0.0)
        });
        let norm = psi.discrete_norm();
        let mut psi = psi.scaled(norm.sqrt().recip());
        psi.propagate_in_place(t, p, &EdgeGuard::default())?;
        let w_bar = spread_after_time(w, t, p)?;
        out.push(EprPoint {
            width: w,
            marginal_stdev: psi.marginal(Axis::One).stdev()?,
            predicted_stdev: (0.5 * (w_bar * w_bar + broad_bar * broad_bar)).sqrt(),
        });
    }
    Ok(out)
}

/// Whether the spread strictly grows along the list; `None` for fewer than
/// two points.
pub fn strictly_increasing(points: &[EprPoint]) -> Option<bool> {
    (points.len() >= 2).then(|| points.windows(2).all(|p| p[1].marginal_stdev > p[0].marginal_stdev))
}
