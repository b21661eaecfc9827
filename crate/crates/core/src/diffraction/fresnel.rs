use std::f64::consts::{FRAC_PI_2, PI};

use crate::quad;

/// Above this `|θ|` the asymptotic expansion replaces quadrature.
pub const ASYMPTOTIC_SEAM: f64 = 6.0;

const QUAD_TOLERANCE: f64 = 1e-13;

fn by_quadrature(x: f64) -> (f64, f64) {
    let c = quad::integrate(|z| (FRAC_PI_2 * z * z).cos(), 0.0, x, QUAD_TOLERANCE);
    let s = quad::integrate(|z| (FRAC_PI_2 * z * z).sin(), 0.0, x, QUAD_TOLERANCE);
    (c, s)
}

// Auxiliary functions f, g of the large-argument expansion
//   C = ½ + f sin(πx²/2) − g cos(πx²/2)
//   S = ½ − f cos(πx²/2) − g sin(πx²/2)
fn auxiliary(x: f64) -> (f64, f64) {
    let w = PI * x * x;
    let inv_w2 = 1.0 / (w * w);
    let (mut f, mut g) = (0.0, 0.0);
    // f: 1, −1·3/w², +1·3·5·7/w⁴, …   g: 1/w, −1·3·5/w³, …
    let mut tf = 1.0;
    let mut tg = 1.0 / w;
    for m in 0..30 {
        f += tf;
        g += tg;
        let k = m as f64;
        let next_f = -tf * (4.0 * k + 1.0) * (4.0 * k + 3.0) * inv_w2;
        let next_g = -tg * (4.0 * k + 3.0) * (4.0 * k + 5.0) * inv_w2;
        if next_f.abs() >= tf.abs() || (next_f.abs() < 1e-18 && next_g.abs() < 1e-18) {
            break;
        }
        tf = next_f;
        tg = next_g;
    }
    (f / (PI * x), g / (PI * x))
}

/// `(C(θ), S(θ))` with `C(θ) = ∫₀^θ cos(πz²/2) dz`, `S(θ) = ∫₀^θ sin(πz²/2) dz`.
pub fn fresnel_cs(theta: f64) -> (f64, f64) {
    let x = theta.abs();
    let (c, s) = if x == 0.0 {
        (0.0, 0.0)
    } else if x <= ASYMPTOTIC_SEAM {
        by_quadrature(x)
    } else {
        let (f, g) = auxiliary(x);
        // Reduce the phase πx²/2 modulo 2π in two steps to keep precision.
        let xi = x.trunc();
        let xf = x - xi;
        let phase = (FRAC_PI_2 * ((xi * xi) % 4.0) + PI * xi * xf + FRAC_PI_2 * xf * xf) % (2.0 * PI);
        let (sn, cs) = phase.sin_cos();
        (0.5 + f * sn - g * cs, 0.5 - f * cs - g * sn)
    };
    if theta < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

pub fn fresnel_c(theta: f64) -> f64 {
    fresnel_cs(theta).0
}

pub fn fresnel_s(theta: f64) -> f64 {
    fresnel_cs(theta).1
}

#[cfg(test)]
mod tests {
    use super::*;

    // Maclaurin series, exact in principle, usable while terms stay small.
    fn series(x: f64) -> (f64, f64) {
        let a = FRAC_PI_2 * x * x;
        let (mut c, mut s) = (0.0, 0.0);
        let mut term = 1.0; // a^n / n!
        for n in 0..80 {
            let contrib = term * x / (2.0 * n as f64 + 1.0);
            match n % 4 {
                0 => c += contrib,
                1 => s += contrib,
                2 => c -= contrib,
                _ => s -= contrib,
            }
            term *= a / (n as f64 + 1.0);
        }
        (c, s)
    }

    #[test]
    fn reference_values() {
        assert_eq!(fresnel_cs(0.0), (0.0, 0.0));
        let (c, s) = fresnel_cs(1.0);
        assert!((c - 0.779_893_400_376_822_8).abs() < 1e-12);
        assert!((s - 0.438_259_147_390_354_8).abs() < 1e-12);
        assert!((c - 0.77989).abs() < 1e-5 && (s - 0.43826).abs() < 1e-5);
    }

    #[test]
    fn agrees_with_series_below_three() {
        for i in 1..=60 {
            let x = 0.05 * i as f64;
            let (c, s) = fresnel_cs(x);
            let (cr, sr) = series(x);
            assert!((c - cr).abs() < 1e-10 && (s - sr).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn odd_and_bounded() {
        for i in 0..400 {
            let x = 0.037 * i as f64;
            let (c, s) = fresnel_cs(x);
            let (cn, sn) = fresnel_cs(-x);
            assert_eq!((c, s), (-cn, -sn));
            assert!(c.abs() <= 0.9 && s.abs() <= 0.9);
        }
    }

    #[test]
    fn seam_is_continuous() {
        let below = by_quadrature(ASYMPTOTIC_SEAM);
        let above = fresnel_cs(ASYMPTOTIC_SEAM + 1e-12);
        assert!((below.0 - above.0).abs() < 1e-10 && (below.1 - above.1).abs() < 1e-10);
        for x in [6.5, 8.25, 11.0] {
            let (c, s) = fresnel_cs(x);
            let (cq, sq) = by_quadrature(x);
            assert!((c - cq).abs() < 1e-10 && (s - sq).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn tends_to_one_half() {
        let (c, s) = fresnel_cs(50.0);
        assert!((c - 0.5).abs() < 1e-2 && (s - 0.5).abs() < 1e-2);
        // Envelope of the oscillation is 1/(πx).
        assert!((c - 0.5).abs() <= 1.0 / (PI * 50.0) + 1e-12);
    }
}
