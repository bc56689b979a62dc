//! Single-excitation N-site chain: Hamiltonian, couplings and Lindblad sets.

use crate::error::{invalid, Error, Result};
use crate::C64;
use faer::Mat;
use serde::{Deserialize, Serialize};

/// Dense N×N operator in the site basis {|n⟩}.
pub type SystemOperator = Mat<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    Collective,
    Separate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub sites: usize,
    pub detuning: f64,
    pub mode: CouplingMode,
}

impl LatticeSpec {
    pub fn new(sites: usize, detuning: f64, mode: CouplingMode) -> Result<Self> {
        if sites < 2 {
            return Err(invalid("sites", format!("need N >= 2, got {sites}")));
        }
        if !(detuning > 0.0) || !detuning.is_finite() {
            return Err(invalid("detuning", format!("need Ω > 0, got {detuning}")));
        }
        Ok(Self { sites, detuning, mode })
    }

    /// Site energy ω_n = (n−1)Ω, zero-based index.
    pub fn energy(&self, n: usize) -> f64 {
        n as f64 * self.detuning
    }
}

fn zeros(n: usize) -> SystemOperator {
    Mat::zeros(n, n)
}

/// Projector-sum hopping term `|a⟩⟨b|` (zero-based).
fn ket_bra(n: usize, a: usize, b: usize) -> SystemOperator {
    let mut m = zeros(n);
    m[(a, b)] = C64::from(1.0);
    m
}

pub fn build_hamiltonian(spec: &LatticeSpec) -> SystemOperator {
    Mat::from_fn(spec.sites, spec.sites, |i, j| {
        if i == j {
            C64::from(spec.energy(i))
        } else {
            C64::from(0.0)
        }
    })
}

/// One bond operator `|n⟩⟨n+1| + |n+1⟩⟨n|`.
pub fn bond_operator(sites: usize, bond: usize) -> SystemOperator {
    let mut m = zeros(sites);
    m[(bond, bond + 1)] = C64::from(1.0);
    m[(bond + 1, bond)] = C64::from(1.0);
    m
}

/// Collective: one open-chain `V`; Separate: the `N−1` bond operators.
pub fn build_coupling(spec: &LatticeSpec) -> Vec<SystemOperator> {
    let n = spec.sites;
    match spec.mode {
        CouplingMode::Collective => {
            let mut v = zeros(n);
            for b in 0..n - 1 {
                v[(b, b + 1)] = C64::from(1.0);
                v[(b + 1, b)] = C64::from(1.0);
            }
            vec![v]
        }
        CouplingMode::Separate => (0..n - 1).map(|b| bond_operator(n, b)).collect(),
    }
}

/// Split `V = V⁺ + V⁻` where `V⁻` keeps elements `⟨m|V|k⟩` with
/// `ω_m < ω_k` (energy lowering) and `V⁺ = (V⁻)†`.
pub fn split_raising_lowering(v: &SystemOperator, h: &SystemOperator) -> Result<(SystemOperator, SystemOperator)> {
    let n = v.nrows();
    let mut lower = zeros(n);
    let mut raise = zeros(n);
    for m in 0..n {
        for k in 0..n {
            let x = v[(m, k)];
            if x == C64::from(0.0) {
                continue;
            }
            let gap = h[(k, k)].re - h[(m, m)].re;
            if gap.abs() <= 1e-12 * (1.0 + h[(k, k)].re.abs()) {
                return Err(Error::DegenerateGap(m, k));
            }
            if gap > 0.0 {
                lower[(m, k)] = x;
            } else {
                raise[(m, k)] = x;
            }
        }
    }
    Ok((raise, lower))
}

/// Collective: `{√γL Σ|n⟩⟨n+1|, √γR Σ|n+1⟩⟨n|}`; Separate: both per bond.
/// Zero-rate operators are dropped.
pub fn lindblad_hopping_ops(spec: &LatticeSpec, gamma_l: f64, gamma_r: f64) -> Result<Vec<SystemOperator>> {
    if !(gamma_l >= 0.0) || !(gamma_r >= 0.0) {
        return Err(invalid("rates", "hopping rates must be >= 0"));
    }
    let n = spec.sites;
    let (sl, sr) = (gamma_l.sqrt(), gamma_r.sqrt());
    let mut ops = Vec::new();
    match spec.mode {
        CouplingMode::Collective => {
            let mut left = zeros(n);
            let mut right = zeros(n);
            for b in 0..n - 1 {
                left[(b, b + 1)] = C64::from(sl);
                right[(b + 1, b)] = C64::from(sr);
            }
            if gamma_l > 0.0 {
                ops.push(left);
            }
            if gamma_r > 0.0 {
                ops.push(right);
            }
        }
        CouplingMode::Separate => {
            for b in 0..n - 1 {
                if gamma_l > 0.0 {
                    ops.push(ket_bra(n, b, b + 1) * faer::Scale(C64::from(sl)));
                }
                if gamma_r > 0.0 {
                    ops.push(ket_bra(n, b + 1, b) * faer::Scale(C64::from(sr)));
                }
            }
        }
    }
    Ok(ops)
}

/// `√γ_dep |n⟩⟨n|` for every site.
pub fn dephasing_ops(spec: &LatticeSpec, gamma_dep: f64) -> Result<Vec<SystemOperator>> {
    if !(gamma_dep >= 0.0) {
        return Err(invalid("gamma_dep", "must be >= 0"));
    }
    let s = gamma_dep.sqrt();
    Ok((0..spec.sites)
        .map(|k| ket_bra(spec.sites, k, k) * faer::Scale(C64::from(s)))
        .collect())
}
