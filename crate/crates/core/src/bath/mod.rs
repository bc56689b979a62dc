//! Bath spectral densities and exponential decompositions of the
//! two-time correlation function.

mod aaa;
mod lorentzian;
mod pade;
mod quad;
mod rwa;

pub use aaa::{aaa_fit, PoleSet};
pub use lorentzian::{lorentzian_zero_t_decompose, lorentzian_zero_t_rwa_decompose};
pub use pade::{pade_coefficients, pade_decompose};
pub use quad::{
    channel_direct, correlation_direct, gauss_kronrod, QuadOptions, QUAD_RTOL,
};
pub use rwa::{rwa_correlation_decompose_aaa, AaaGrid, RwaFit};

use crate::error::{invalid, Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    DrudeLorentz,
    Lorentzian,
}

/// Drude-Lorentz `J = 4ΓWω/(ω²+W²)` or Lorentzian
/// `J = ΓW²/(2π((ω−ω0)²+W²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDensity {
    pub kind: DensityKind,
    pub gamma: f64,
    pub width: f64,
    pub center: f64,
}

impl SpectralDensity {
    pub fn drude_lorentz(gamma: f64, width: f64) -> Result<Self> {
        Self::new(DensityKind::DrudeLorentz, gamma, width, 0.0)
    }

    pub fn lorentzian(gamma: f64, width: f64, center: f64) -> Result<Self> {
        Self::new(DensityKind::Lorentzian, gamma, width, center)
    }

    /// Γ = 0 is accepted so that uncoupled reference runs share the code path.
    pub fn new(kind: DensityKind, gamma: f64, width: f64, center: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(invalid("gamma", format!("must be >= 0, got {gamma}")));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(invalid("width", format!("must be > 0, got {width}")));
        }
        let center = match kind {
            DensityKind::DrudeLorentz => 0.0,
            DensityKind::Lorentzian => {
                if !center.is_finite() {
                    return Err(invalid("center", "must be finite"));
                }
                center
            }
        };
        Ok(Self { kind, gamma, width, center })
    }

    pub fn evaluate(&self, omega: f64) -> f64 {
        let (g, w) = (self.gamma, self.width);
        match self.kind {
            DensityKind::DrudeLorentz => 4.0 * g * w * omega / (omega * omega + w * w),
            DensityKind::Lorentzian => {
                let d = omega - self.center;
                g * w * w / (2.0 * PI * (d * d + w * w))
            }
        }
    }

    /// Weight `K` entering `C(τ) = (1/2π)∫K(ω)[n e^{iωτ} + (n+1)e^{−iωτ}]dω`,
    /// continued to complex frequency.
    ///
    /// Drude-Lorentz uses `K = J`. The Lorentzian is normalized so that
    /// its zero-temperature correlation is `(ΓW/2)e^{−(W+iω0)τ}`, which
    /// gives `K = 2πJ`.
    pub fn kernel(&self, z: C64) -> C64 {
        let (g, w) = (self.gamma, self.width);
        match self.kind {
            DensityKind::DrudeLorentz => 4.0 * g * w * z / (z * z + w * w),
            DensityKind::Lorentzian => {
                let d = z - self.center;
                C64::from(g * w * w) / (d * d + w * w)
            }
        }
    }

    pub fn kernel_real(&self, omega: f64) -> f64 {
        self.kernel(C64::from(omega)).re
    }

    /// Upper cutoff of the real-axis quadrature window.
    pub fn cutoff(&self) -> f64 {
        (50.0 * self.width).max(self.center + 50.0 * self.width)
    }
}

/// `1/(e^{ω/T} − 1)`; zero at `T = 0`.
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    if temperature < 0.0 || temperature.is_nan() {
        return Err(Error::Domain(format!("temperature {temperature} < 0")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("frequency {omega} <= 0")));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Bose function at complex frequency, no domain checks.
pub(crate) fn bose_complex(z: C64, temperature: f64) -> C64 {
    if temperature == 0.0 {
        return C64::from(0.0);
    }
    let e = (z / temperature).exp() - 1.0;
    e.inv()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheme {
    Pade { l_max: usize },
    Aaa { tol: f64 },
    LorentzianAnalytic,
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::Pade { l_max } => format!("pade(l_max={l_max})"),
            Scheme::Aaa { tol } => format!("aaa(tol={tol:e})"),
            Scheme::LorentzianAnalytic => "lorentzian-analytic".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    pub density: SpectralDensity,
    pub temperature: f64,
    pub scheme: Scheme,
}

impl BathSpec {
    pub fn new(density: SpectralDensity, temperature: f64, scheme: Scheme) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(invalid("temperature", format!("must be >= 0, got {temperature}")));
        }
        if temperature == 0.0 && scheme != Scheme::LorentzianAnalytic {
            return Err(invalid(
                "temperature",
                "T = 0 requires the lorentzian-analytic scheme",
            ));
        }
        match scheme {
            Scheme::Pade { l_max } => {
                if density.kind != DensityKind::DrudeLorentz {
                    return Err(invalid("scheme", "pade needs a drude-lorentz density"));
                }
                if l_max == 0 {
                    return Err(invalid("l_max", "must be >= 1"));
                }
            }
            Scheme::Aaa { tol } => {
                if !(tol > 0.0) {
                    return Err(invalid("tol", "must be > 0"));
                }
            }
            Scheme::LorentzianAnalytic => {
                if density.kind != DensityKind::Lorentzian {
                    return Err(invalid("scheme", "lorentzian-analytic needs a lorentzian density"));
                }
                if temperature != 0.0 {
                    return Err(invalid("temperature", "lorentzian-analytic is a T = 0 scheme"));
                }
            }
        }
        Ok(Self { density, temperature, scheme })
    }

    pub fn bose(&self, omega: f64) -> Result<f64> {
        bose_einstein(omega, self.temperature)
    }

    /// Exponential decomposition for the requested convention.
    pub fn decompose(&self, convention: Convention) -> Result<ExponentialDecomposition> {
        let d = &self.density;
        match (self.scheme, convention) {
            (Scheme::Pade { l_max }, Convention::FullRI) => {
                pade_decompose(d.gamma, d.width, self.temperature, l_max)
            }
            (Scheme::LorentzianAnalytic, Convention::FullRI) => {
                lorentzian_zero_t_decompose(d.gamma, d.width, d.center)
            }
            (Scheme::LorentzianAnalytic, Convention::Rwa) => {
                lorentzian_zero_t_rwa_decompose(d.gamma, d.width, d.center)
            }
            (Scheme::Aaa { tol }, Convention::Rwa) => {
                Ok(rwa_correlation_decompose_aaa(self, tol, &AaaGrid::default())?.decomposition)
            }
            (s, c) => Err(Error::Channel(format!(
                "scheme {} cannot produce a {:?} decomposition",
                s.label(),
                c
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    Real,
    Imag,
    Absorb,
    Emit,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Real => "real",
            Channel::Imag => "imag",
            Channel::Absorb => "absorb",
            Channel::Emit => "emit",
        }
    }

    pub fn opposite(self) -> Channel {
        match self {
            Channel::Real => Channel::Imag,
            Channel::Imag => Channel::Real,
            Channel::Absorb => Channel::Emit,
            Channel::Emit => Channel::Absorb,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    FullRI,
    Rwa,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialTerm {
    pub amplitude: C64,
    pub rate: C64,
    pub channel: Channel,
}

/// Terms `ξ e^{−χτ}` grouped by channel. For `FullRI` the correlation is
/// `Σ_Real ξe^{−χτ} + iΣ_Imag ξe^{−χτ}`; for `Rwa` each channel is its own
/// function (`Absorb` multiplies `e^{+iωτ}` processes, `Emit` `e^{−iωτ}`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialDecomposition {
    pub terms: Vec<ExponentialTerm>,
    pub convention: Convention,
}

impl ExponentialDecomposition {
    pub fn new(terms: Vec<ExponentialTerm>, convention: Convention) -> Result<Self> {
        for t in &terms {
            let ok = match convention {
                Convention::FullRI => matches!(t.channel, Channel::Real | Channel::Imag),
                Convention::Rwa => matches!(t.channel, Channel::Absorb | Channel::Emit),
            };
            if !ok {
                return Err(Error::Channel(format!(
                    "{} term in a {:?} decomposition",
                    t.channel.name(),
                    convention
                )));
            }
            if !(t.rate.re > 0.0) {
                return Err(invalid("rate", format!("Re χ must be > 0, got {}", t.rate)));
            }
        }
        Ok(Self { terms, convention })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn channel_terms(&self, channel: Channel) -> impl Iterator<Item = &ExponentialTerm> {
        self.terms.iter().filter(move |t| t.channel == channel)
    }

    /// `Σ ξ e^{−χτ}` over one channel.
    pub fn channel_value(&self, channel: Channel, tau: f64) -> C64 {
        self.channel_terms(channel)
            .map(|t| t.amplitude * (-t.rate * tau).exp())
            .sum()
    }

    /// Full correlation `C(τ)`. For RWA this is `C⁺ + C⁻`.
    pub fn reconstruct(&self, tau: f64) -> C64 {
        match self.convention {
            Convention::FullRI => {
                self.channel_value(Channel::Real, tau)
                    + C64::i() * self.channel_value(Channel::Imag, tau)
            }
            Convention::Rwa => {
                self.channel_value(Channel::Absorb, tau) + self.channel_value(Channel::Emit, tau)
            }
        }
    }

    /// Merge terms of the same channel whose rates differ by less than `tol`.
    pub fn merge_equal_rates(&mut self, tol: f64) {
        let mut out: Vec<ExponentialTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match out
                .iter_mut()
                .find(|o| o.channel == t.channel && (o.rate - t.rate).norm() < tol)
            {
                Some(o) => o.amplitude += t.amplitude,
                None => out.push(t),
            }
        }
        self.terms = out;
    }
}
