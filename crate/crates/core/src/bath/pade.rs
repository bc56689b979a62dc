//! [N−1/N] Padé expansion of the Bose function for Drude-Lorentz baths.

use super::{Channel, Convention, ExponentialDecomposition, ExponentialTerm};
use crate::error::{invalid, Error, Result};
use crate::C64;
use faer::{Mat, Side};

/// Negative eigenvalues of the zero-diagonal symmetric tridiagonal matrix
/// with off-diagonal `off(k)`, mapped to `−2/λ` (ascending λ).
fn tridiagonal_poles(size: usize, count: usize, off: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let m = Mat::<f64>::from_fn(size, size, |i, j| {
        if j == i + 1 {
            off(i)
        } else if i == j + 1 {
            off(j)
        } else {
            0.0
        }
    });
    let ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("padé tridiagonal: {e:?}")))?;
    Ok(ev[..count].iter().map(|&l| -2.0 / l).collect())
}

/// Padé poles `ζ_l` and weights `κ_l` for `nk` expansion terms, in the
/// convention `n(ω) ≈ T/ω − 1/2 + Σ_l 2κ_l ωT/(ω² + ζ_l²T²)`.
pub fn pade_coefficients(nk: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if nk == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let eps = tridiagonal_poles(2 * nk, nk, |k| {
        1.0 / (((2 * k + 3) * (2 * k + 5)) as f64).sqrt()
    })?;
    let chi = tridiagonal_poles(2 * nk - 1, nk - 1, |k| {
        1.0 / (((2 * k + 5) * (2 * k + 7)) as f64).sqrt()
    })?;
    let pref = 0.5 * nk as f64 * (2.0 * (nk as f64 + 1.0) + 1.0);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut kappa = Vec::with_capacity(nk);
    for j in 0..nk {
        let ej = eps[j] * eps[j];
        let mut term = pref;
        for k in 0..nk - 1 {
            term *= (chi[k] * chi[k] - ej) / (eps[k] * eps[k] - ej + delta(j, k));
        }
        let k = nk - 1;
        term /= eps[k] * eps[k] - ej + delta(j, k);
        kappa.push(term);
    }
    Ok((eps, kappa))
}

/// `l_max` Real-channel terms plus one Imag term sharing the rate `W`.
///
/// `ξ_1 = ΓW(cot(W/2T) − i)` is split into its real part (Real channel)
/// and `−ΓW` (Imag channel); the remaining `l_max − 1` terms are Padé
/// poles with `χ_l = ζ_l T`.
pub fn pade_decompose(gamma: f64, width: f64, temperature: f64, l_max: usize) -> Result<ExponentialDecomposition> {
    if !(temperature > 0.0) {
        return Err(invalid("temperature", "padé needs T > 0"));
    }
    if l_max == 0 {
        return Err(invalid("l_max", "must be >= 1"));
    }
    if !(width > 0.0) {
        return Err(invalid("width", "must be > 0"));
    }
    let (zeta, kappa) = pade_coefficients(l_max - 1)?;
    let gw = gamma * width;
    let cot = 1.0 / (width / (2.0 * temperature)).tan();
    let mut terms = vec![
        ExponentialTerm {
            amplitude: C64::from(gw * cot),
            rate: C64::from(width),
            channel: Channel::Real,
        },
        ExponentialTerm {
            amplitude: C64::from(-gw),
            rate: C64::from(width),
            channel: Channel::Imag,
        },
    ];
    for (z, k) in zeta.iter().zip(&kappa) {
        let nu = z * temperature;
        let amp = k * temperature * 4.0 * gw * nu / (nu * nu - width * width);
        terms.push(ExponentialTerm {
            amplitude: C64::from(amp),
            rate: C64::from(nu),
            channel: Channel::Real,
        });
    }
    ExponentialDecomposition::new(terms, Convention::FullRI)
}
