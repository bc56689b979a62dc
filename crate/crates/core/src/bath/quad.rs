//! Adaptive Gauss-Kronrod quadrature and the direct correlation oracle.

// tabulated nodes and weights keep their published digits
#![allow(clippy::excessive_precision)]

use super::{BathSpec, Channel, DensityKind};
use crate::error::{Error, Result};
use crate::C64;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

pub const QUAD_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rtol: QUAD_RTOL,
            atol: 1e-14,
            max_intervals: 4000,
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let val = kron * h;
    let err = ((kron - gauss) * h).norm();
    (val, err)
}

struct Piece {
    a: f64,
    b: f64,
    val: C64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive G7K15 on `[a, b]`. Returns value and error estimate.
pub fn gauss_kronrod<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(C64, f64)> {
    if a == b {
        return Ok((C64::from(0.0), 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, val: v, err: e });
    let mut total = v;
    let mut err = e;
    while err > opts.atol.max(opts.rtol * total.norm()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                value: format!("{total}"),
                error: err,
            });
        }
        let p = heap.pop().expect("heap is never empty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, val: v2, err: e2 });
        // guard against cancellation drift in the running sums
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.val).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok((total, err))
}

/// `∫_0^∞ f(s) ds` through `s = u/(1−u)`.
fn half_line<F: Fn(f64) -> C64>(f: F, opts: QuadOptions) -> Result<(C64, f64)> {
    gauss_kronrod(
        |u| {
            let w = 1.0 - u;
            f(u / w) / (w * w)
        },
        0.0,
        1.0,
        opts,
    )
}

/// One channel of the correlation function:
/// `Absorb = (1/2π)∫K n e^{iωτ}`, `Emit = (1/2π)∫K (n+1) e^{−iωτ}`.
///
/// The real axis is integrated up to `max(50W, ω0+50W)`; the remainder is
/// taken along a ray rotated into the half plane where the exponential
/// decays, which is exact because all singularities of `K` and `n` lie at
/// smaller real part. The Lorentzian emission channel at `T = 0` runs over
/// the whole real line.
pub fn channel_direct(bath: &BathSpec, channel: Channel, tau: f64) -> Result<C64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau {tau} < 0")));
    }
    let d = bath.density;
    let t = bath.temperature;
    let sigma = match channel {
        Channel::Absorb => 1.0,
        Channel::Emit => -1.0,
        _ => return Err(Error::Channel("direct quadrature needs absorb or emit".into())),
    };
    if d.gamma == 0.0 || (channel == Channel::Absorb && t == 0.0) {
        return Ok(C64::from(0.0));
    }
    if tau == 0.0 && d.kind == DensityKind::DrudeLorentz {
        return Err(Error::Divergent(
            "drude-lorentz correlation diverges logarithmically at tau = 0".into(),
        ));
    }
    let offset = if channel == Channel::Emit { 1.0 } else { 0.0 };
    let i = C64::i();
    let weight_real = |w: f64| -> f64 {
        let n = if t == 0.0 {
            0.0
        } else if w > 0.0 {
            1.0 / (w / t).exp_m1()
        } else {
            // only reached for the zero-temperature full-line case
            0.0
        };
        d.kernel_real(w) * (n + offset)
    };
    let weight = |z: C64| -> C64 { d.kernel(z) * (super::bose_complex(z, t) + offset) };
    let phase = |z: C64| -> C64 { (i * sigma * z * tau).exp() };

    let opts = QuadOptions::default();
    let upper = d.cutoff();
    let full_line = t == 0.0 && d.kind == DensityKind::Lorentzian;
    let lower = if full_line { d.center - 50.0 * d.width } else { 0.0 };

    let (body, _) = gauss_kronrod(
        |w| weight_real(w) * C64::from_polar(1.0, sigma * w * tau),
        lower,
        upper,
        opts,
    )?;
    // ∫_Λ^∞ f dω = iσ ∫_0^∞ f(Λ + iσs) ds
    let (tail, _) = half_line(
        |s| {
            let z = C64::new(upper, sigma * s);
            weight(z) * phase(z)
        },
        opts,
    )?;
    let mut total = body + i * sigma * tail;
    if full_line {
        // ∫_{−∞}^{a} f dω = −iσ ∫_0^∞ f(a + iσs) ds
        let (low, _) = half_line(
            |s| {
                let z = C64::new(lower, sigma * s);
                weight(z) * phase(z)
            },
            opts,
        )?;
        total -= i * sigma * low;
    }
    Ok(total / (2.0 * PI))
}

/// `C(τ) = (1/2π)∫K(ω)[n e^{iωτ} + (n+1)e^{−iωτ}]dω` by adaptive quadrature.
pub fn correlation_direct(bath: &BathSpec, tau: f64) -> Result<C64> {
    Ok(channel_direct(bath, Channel::Absorb, tau)? + channel_direct(bath, Channel::Emit, tau)?)
}
