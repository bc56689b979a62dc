//! Born-Markov (Lindblad) generator with thermally biased hopping.

use crate::bath::BathSpec;
use crate::error::{invalid, Result};
use crate::heom::{Generator, Normalization, Provenance};
use crate::lattice::{build_hamiltonian, dephasing_ops, lindblad_hopping_ops, LatticeSpec};
use crate::sparse::Triplets;
use crate::superop;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkovRates {
    pub gamma_l: f64,
    pub gamma_r: f64,
    pub gamma_dep: f64,
}

/// `γL = m·K(Ω)(n+1)`, `γR = m·K(Ω)n` with `K` the correlation weight of
/// the density (`K = J` for Drude-Lorentz) and `m` the rate multiplier.
pub fn markov_rates(bath: &BathSpec, detuning: f64, multiplier: f64) -> Result<MarkovRates> {
    if !(detuning > 0.0) {
        return Err(invalid("detuning", "must be > 0"));
    }
    if !(multiplier >= 0.0) {
        return Err(invalid("rate_multiplier", "must be >= 0"));
    }
    let j = bath.density.kernel_real(detuning);
    let n = bath.bose(detuning)?;
    Ok(MarkovRates {
        gamma_l: multiplier * j * (n + 1.0),
        gamma_r: multiplier * j * n,
        gamma_dep: 0.0,
    })
}

pub fn build_bmme_generator(lattice: &LatticeSpec, rates: &MarkovRates) -> Result<Generator> {
    let n = lattice.sites;
    let nb = n * n;
    let h = build_hamiltonian(lattice);
    let mut trip = Triplets::new(nb);
    let mut push = |blk: superop::Block| {
        for (r, c, v) in blk {
            trip.push(r, c, v);
        }
    };
    push(superop::scale(superop::commutator(&h), -C64::i()));
    for l in lindblad_hopping_ops(lattice, rates.gamma_l, rates.gamma_r)? {
        push(superop::dissipator(&l));
    }
    if rates.gamma_dep > 0.0 {
        for l in dephasing_ops(lattice, rates.gamma_dep)? {
            push(superop::dissipator(&l));
        }
    }
    Ok(Generator {
        matrix: trip.into_csr(),
        sites: n,
        ado_count: 1,
        provenance: Provenance::Bmme,
        normalization: Normalization::Bare,
        ados: None,
    })
}
