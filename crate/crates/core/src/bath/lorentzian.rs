//! Closed-form residue decompositions of the zero-temperature Lorentzian.

use super::{Channel, Convention, ExponentialDecomposition, ExponentialTerm};
use crate::error::{invalid, Result};
use crate::C64;

fn check(gamma: f64, width: f64, center: f64) -> Result<()> {
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", "must be >= 0"));
    }
    if !(width > 0.0) {
        return Err(invalid("width", "must be > 0"));
    }
    if !(center > 0.0) {
        return Err(invalid("center", "must be > 0"));
    }
    Ok(())
}

/// Four Real/Imag terms: `ξ^R = ΓW/4` at `χ = W ± iω0`, `ξ^I = ∓iΓW/4`.
pub fn lorentzian_zero_t_decompose(gamma: f64, width: f64, center: f64) -> Result<ExponentialDecomposition> {
    check(gamma, width, center)?;
    let q = 0.25 * gamma * width;
    let up = C64::new(width, center);
    let dn = C64::new(width, -center);
    let term = |amplitude, rate, channel| ExponentialTerm { amplitude, rate, channel };
    ExponentialDecomposition::new(
        vec![
            term(C64::from(q), up, Channel::Real),
            term(C64::from(q), dn, Channel::Real),
            term(C64::new(0.0, -q), up, Channel::Imag),
            term(C64::new(0.0, q), dn, Channel::Imag),
        ],
        Convention::FullRI,
    )
}

/// Absorb: `ξ⁺ = 0`, `χ⁺ = W − iω0`. Emit: `ξ⁻ = ΓW/2`, `χ⁻ = W + iω0`.
pub fn lorentzian_zero_t_rwa_decompose(gamma: f64, width: f64, center: f64) -> Result<ExponentialDecomposition> {
    check(gamma, width, center)?;
    ExponentialDecomposition::new(
        vec![
            ExponentialTerm {
                amplitude: C64::from(0.0),
                rate: C64::new(width, -center),
                channel: Channel::Absorb,
            },
            ExponentialTerm {
                amplitude: C64::from(0.5 * gamma * width),
                rate: C64::new(width, center),
                channel: Channel::Emit,
            },
        ],
        Convention::Rwa,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_terms_collapse_to_one_exponential() {
        let (g, w, w0) = (0.6, 1.0, 1.0);
        let d = lorentzian_zero_t_decompose(g, w, w0).unwrap();
        assert_eq!(d.terms[0].amplitude, C64::from(g * w / 4.0));
        assert_eq!(d.terms[0].rate, C64::new(w, w0));
        for &tau in &[0.0, 0.4, 2.5] {
            let exact = 0.5 * g * w * (-C64::new(w, w0) * tau).exp();
            assert!((d.reconstruct(tau) - exact).norm() < 1e-15);
        }
    }

    #[test]
    fn rwa_coefficients() {
        let d = lorentzian_zero_t_rwa_decompose(0.3, 1.0, 3.0).unwrap();
        assert_eq!(d.terms[0].amplitude, C64::from(0.0));
        assert_eq!(d.terms[1].amplitude, C64::from(0.15));
        assert_eq!(d.terms[1].rate, C64::new(1.0, 3.0));
    }

    #[test]
    fn zero_coupling_zero_amplitudes() {
        let d = lorentzian_zero_t_decompose(0.0, 1.0, 2.0).unwrap();
        assert!(d.terms.iter().all(|t| t.amplitude == C64::from(0.0)));
    }
}
