//! Closed-form single-slit evolution.
//!
//! A particle released from the normalized characteristic function of
//! `[−d/2, d/2]` has, after free evolution for time `t`, the exact density
//!
//! `|φ(y, t)|² = (1/2d)[(C(u+v) − C(u−v))² + (S(u+v) − S(u−v))²]`
//!
//! with `u = y√(m/πħt)`, `v = (d/2)√(m/πħt)` and `C`, `S` the Fresnel
//! integrals. For `v ≪ 1` it reduces to the far-field pattern
//! `(2ħt/mdπ) sin²(mdy/2ħt)/y²`, whose first zeros sit `4πħt/md` apart.

mod fresnel;
mod slit;

pub use fresnel::{fresnel_c, fresnel_cs, fresnel_s, ASYMPTOTIC_SEAM};
pub use slit::{
    exact_first_minima, fraunhofer_width, scatter_ratio, scatter_ratio_closed_form, slit_density_exact,
    slit_density_fraunhofer, write_curve_csv, SlitEvolutionParams, FRAUNHOFER_SERIES_CUTOFF, REGIME_CONSTANT,
};
