//! Closed-form two-site dynamics under the zero-temperature Lorentzian.

use crate::C64;

fn sinhc(x: C64) -> C64 {
    if x.norm() < 1e-6 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// `G(t) = {cosh(st/2) + √(W/(W−2Γ)) sinh(st/2)} e^{−t(W−2iΩ)/2}` with
/// `s = √(W(W−2Γ))`, continued through `W = 2Γ` and `W < 2Γ`.
pub fn g_function(gamma: f64, width: f64, detuning: f64, t: f64) -> C64 {
    let s = C64::from(width * (width - 2.0 * gamma)).sqrt();
    let x = s * (0.5 * t);
    // √(W/(W−2Γ)) sinh(x) = (W t/2) sinh(x)/x
    let bracket = x.cosh() + 0.5 * width * t * sinhc(x);
    bracket * (C64::new(-width, 2.0 * detuning) * (0.5 * t)).exp()
}

/// `(ρ22, ρ12) = (α|G|², βG)`.
pub fn two_site_analytic(alpha: f64, beta: C64, gamma: f64, width: f64, detuning: f64, t: f64) -> (f64, C64) {
    let g = g_function(gamma, width, detuning, t);
    (alpha * g.norm_sqr(), beta * g)
}
