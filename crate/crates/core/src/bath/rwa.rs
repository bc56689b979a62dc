//! Absorption/emission decomposition from AAA fits of the even and odd
//! extensions of `J` and of the even extension of the Bose function.

use super::aaa::{aaa_fit, PoleSet};
use super::quad::channel_direct;
use super::{BathSpec, Channel, Convention, ExponentialDecomposition, ExponentialTerm};
use crate::error::{invalid, Result};
use crate::C64;

/// Sampling grid for the AAA fits, in units of the bath width.
#[derive(Clone, Copy, Debug)]
pub struct AaaGrid {
    /// smallest |ω| of the log-spaced part
    pub floor: f64,
    pub n_log: usize,
    pub n_lin: usize,
    pub max_degree: usize,
    /// points of the τ grid on (0, 5/W] used for the error report
    pub check_points: usize,
}

impl Default for AaaGrid {
    fn default() -> Self {
        Self {
            floor: 0.3,
            n_log: 500,
            n_lin: 500,
            max_degree: 80,
            check_points: 199,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RwaFit {
    pub decomposition: ExponentialDecomposition,
    pub odd: PoleSet,
    pub even: PoleSet,
    pub bose: PoleSet,
    /// max over the check grid of |Σ terms − quadrature| / max|quadrature|
    pub absorb_error: f64,
    pub emit_error: f64,
}

impl RwaFit {
    pub fn pole_counts(&self) -> [usize; 3] {
        [self.odd.poles.len(), self.even.poles.len(), self.bose.poles.len()]
    }
}

fn sample_points(bath: &BathSpec, grid: &AaaGrid) -> Vec<f64> {
    let d = bath.density;
    let wmax = d.cutoff();
    let lo = (grid.floor * d.width).ln();
    let hi = wmax.ln();
    let mut pos: Vec<f64> = (0..grid.n_log)
        .map(|k| (lo + (hi - lo) * k as f64 / (grid.n_log - 1) as f64).exp())
        .chain((1..=grid.n_lin).map(|k| wmax * k as f64 / grid.n_lin as f64))
        .collect();
    pos.sort_by(f64::total_cmp);
    pos.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    pos.iter().rev().map(|&w| -w).chain(pos.iter().copied()).collect()
}

/// Residues of `A·(B + offset)` at the poles of both factors.
fn product_residues(a: &PoleSet, b: &PoleSet, offset: f64) -> Vec<(C64, C64)> {
    let mut out = Vec::with_capacity(a.poles.len() + b.poles.len());
    for (&p, &r) in a.poles.iter().zip(&a.residues) {
        out.push((p, r * (b.eval(p) + offset)));
    }
    for (&p, &r) in b.poles.iter().zip(&b.residues) {
        out.push((p, r * a.eval(p)));
    }
    out
}

/// Builds absorption (`C⁺ = (1/2π)∫K n e^{iωτ}`) and emission
/// (`C⁻ = (1/2π)∫K (n+1) e^{−iωτ}`) channels by the residue theorem and
/// merges equal rates within `10⁻¹⁰W`. Errors are checked against direct
/// quadrature on `τ ∈ (0, 5/W]`; `τ = 0` is excluded because the emission
/// channel of a Drude-Lorentz bath diverges there.
pub fn rwa_correlation_decompose_aaa(bath: &BathSpec, tol: f64, grid: &AaaGrid) -> Result<RwaFit> {
    if !(bath.temperature > 0.0) {
        return Err(invalid("temperature", "aaa decomposition needs T > 0"));
    }
    let d = bath.density;
    let t = bath.temperature;
    let z = sample_points(bath, grid);
    let odd: Vec<(f64, f64)> = z.iter().map(|&w| (w, w.signum() * d.kernel_real(w.abs()))).collect();
    let even: Vec<(f64, f64)> = z.iter().map(|&w| (w, d.kernel_real(w.abs()))).collect();
    let bose: Vec<(f64, f64)> = z
        .iter()
        .map(|&w| (w, 1.0 / (w.abs() / t).exp_m1()))
        .collect();
    let odd = aaa_fit(&odd, tol, grid.max_degree)?;
    let even = aaa_fit(&even, tol, grid.max_degree)?;
    let bose = aaa_fit(&bose, tol, grid.max_degree)?;

    let quarter_i = C64::new(0.0, 0.25);
    let mut terms = Vec::new();
    for (channel, offset, s) in [(Channel::Absorb, 0.0, 1.0), (Channel::Emit, 1.0, -1.0)] {
        for (p, r) in product_residues(&even, &bose, offset) {
            let (amp, rate) = if p.im > 0.0 {
                (quarter_i * r, -C64::i() * p)
            } else {
                (-quarter_i * r, C64::i() * p)
            };
            terms.push(ExponentialTerm { amplitude: amp, rate, channel });
        }
        for (p, r) in product_residues(&odd, &bose, offset) {
            let rate = if p.im > 0.0 { -C64::i() * p } else { C64::i() * p };
            terms.push(ExponentialTerm {
                amplitude: s * quarter_i * r,
                rate,
                channel,
            });
        }
    }
    let mut decomposition = ExponentialDecomposition::new(terms, Convention::Rwa)?;
    decomposition.merge_equal_rates(1e-10 * d.width);

    let mut errs = [0.0; 2];
    for (k, channel) in [Channel::Absorb, Channel::Emit].into_iter().enumerate() {
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for i in 1..=grid.check_points {
            let tau = 5.0 / d.width * i as f64 / grid.check_points as f64;
            let q = channel_direct(bath, channel, tau)?;
            worst = worst.max((decomposition.channel_value(channel, tau) - q).norm());
            peak = peak.max(q.norm());
        }
        errs[k] = if peak > 0.0 { worst / peak } else { worst };
    }
    Ok(RwaFit {
        decomposition,
        odd,
        even,
        bose,
        absorb_error: errs[0],
        emit_error: errs[1],
    })
}
