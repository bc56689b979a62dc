//! Sparse HEOM and RWA-HEOM generators over the vectorized system⊗ADO space.

use super::ados::{enumerate_ados_capped, AdoSpace, DEFAULT_ADO_CAP};
use crate::bath::{Channel, Convention, ExponentialDecomposition};
use crate::error::{Error, Result};
use crate::lattice::{build_coupling, build_hamiltonian, split_raising_lowering, LatticeSpec, SystemOperator};
use crate::sparse::{CsrMatrix, Triplets};
use crate::superop::{self, Block};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Full,
    Rwa,
    Bmme,
}

/// ADO normalization. `Scaled` rescales `ρ_n` by `Π (n_k! s_k^{n_k})^{-1/2}`
/// with `s_k` the magnitude of the slot's amplitudes; the physical block is
/// unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Scaled,
    Bare,
}

#[derive(Clone, Copy, Debug)]
pub struct HeomOptions {
    pub m_max: usize,
    pub normalization: Normalization,
    /// Fold Real and Imag terms with equal rates into one ADO slot.
    pub merge_real_imag: bool,
    pub ado_cap: usize,
}

impl HeomOptions {
    pub fn new(m_max: usize) -> Self {
        Self {
            m_max,
            normalization: Normalization::Scaled,
            merge_real_imag: true,
            ado_cap: DEFAULT_ADO_CAP,
        }
    }
}

/// Sparse generator `d/dt vec(ρ_{s+ADO}) = G vec(ρ_{s+ADO})`; the vector
/// is ADO-major with column-stacked N² system blocks.
#[derive(Clone, Debug)]
pub struct Generator {
    pub matrix: CsrMatrix,
    pub sites: usize,
    pub ado_count: usize,
    pub provenance: Provenance,
    pub normalization: Normalization,
    pub ados: Option<AdoSpace>,
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn block_dim(&self) -> usize {
        self.sites * self.sites
    }

    /// Embed a system density matrix with all ADOs zero.
    pub fn embed(&self, rho: &SystemOperator) -> Result<Vec<C64>> {
        if rho.nrows() != self.sites || rho.ncols() != self.sites {
            return Err(Error::Dimension {
                expected: self.sites,
                got: rho.nrows(),
            });
        }
        let mut v = vec![C64::from(0.0); self.dim()];
        v[..self.block_dim()].copy_from_slice(&superop::vectorize(rho));
        Ok(v)
    }

    /// m = 0 block of a state vector as an N×N matrix.
    pub fn reduced(&self, state: &[C64]) -> Result<SystemOperator> {
        reduced_system_state(state, self.sites, self.ado_count)
    }
}

pub fn reduced_system_state(state: &[C64], sites: usize, ado_count: usize) -> Result<SystemOperator> {
    let expected = sites * sites * ado_count;
    if state.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: state.len(),
        });
    }
    Ok(superop::devectorize(&state[..sites * sites], sites))
}

/// One ADO slot: decay rate plus up/down superoperators.
struct Slot {
    rate: C64,
    up: Block,
    down: Block,
    scale: f64,
}

fn scale_of(mags: &[f64]) -> f64 {
    let s = mags.iter().fold(0.0f64, |a, &b| a.max(b));
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn rate_tol(d: &ExponentialDecomposition) -> f64 {
    let m = d.terms.iter().map(|t| t.rate.norm()).fold(0.0f64, f64::max);
    1e-10 * m.max(1.0)
}

fn full_slots(v: &SystemOperator, d: &ExponentialDecomposition, merge: bool) -> Vec<Slot> {
    // (rate, ξ^R, ξ^I)
    let mut groups: Vec<(C64, C64, C64)> = Vec::new();
    let tol = rate_tol(d);
    for t in &d.terms {
        let (re, im) = match t.channel {
            Channel::Real => (t.amplitude, C64::from(0.0)),
            _ => (C64::from(0.0), t.amplitude),
        };
        let hit = if merge {
            groups.iter_mut().find(|g| (g.0 - t.rate).norm() < tol)
        } else {
            None
        };
        match hit {
            Some(g) => {
                g.1 += re;
                g.2 += im;
            }
            None => groups.push((t.rate, re, im)),
        }
    }
    let comm = superop::commutator(v);
    let anti = superop::anticommutator(v);
    groups
        .into_iter()
        .map(|(rate, re, im)| Slot {
            rate,
            up: comm.clone(),
            down: superop::concat(vec![
                superop::scale(comm.clone(), re),
                superop::scale(anti.clone(), C64::i() * im),
            ]),
            scale: scale_of(&[re.norm(), im.norm()]),
        })
        .collect()
}

fn rwa_slots(vp: &SystemOperator, vm: &SystemOperator, d: &ExponentialDecomposition) -> Vec<Slot> {
    let tol = rate_tol(d);
    let mut out = Vec::new();
    for t in &d.terms {
        let (v_nu, v_bar) = match t.channel {
            Channel::Absorb => (vp, vm),
            _ => (vm, vp),
        };
        // opposite-channel amplitude at the conjugate rate
        let xi_bar: C64 = d
            .channel_terms(t.channel.opposite())
            .filter(|o| (o.rate - t.rate.conj()).norm() < tol)
            .map(|o| o.amplitude)
            .sum();
        let up = superop::commutator(v_bar);
        let down = superop::concat(vec![
            superop::scale(superop::left(v_nu), t.amplitude),
            superop::scale(superop::right(v_nu), -xi_bar.conj()),
        ]);
        out.push(Slot {
            rate: t.rate,
            up,
            down,
            scale: scale_of(&[t.amplitude.norm(), xi_bar.norm()]),
        });
    }
    out
}

fn assemble(
    lattice: &LatticeSpec,
    slots: Vec<Slot>,
    opts: &HeomOptions,
    provenance: Provenance,
) -> Result<Generator> {
    let n = lattice.sites;
    let nb = n * n;
    let space = enumerate_ados_capped(slots.len().max(1), opts.m_max, opts.ado_cap)?;
    let dim = nb * space.len();
    let h = build_hamiltonian(lattice);
    let liou = superop::scale(superop::commutator(&h), -C64::i());
    let mut trip = Triplets::new(dim);
    let minus_i = -C64::i();
    for a in 0..space.len() {
        let row0 = a * nb;
        for &(r, c, v) in &liou {
            trip.push(row0 + r, row0 + c, v);
        }
        let occ = &space.ados[a];
        let damping: C64 = slots.iter().zip(occ).map(|(s, &k)| s.rate * k as f64).sum();
        if damping != C64::from(0.0) {
            for i in 0..nb {
                trip.push(row0 + i, row0 + i, -damping);
            }
        }
        for (k, slot) in slots.iter().enumerate() {
            let nk = occ[k] as f64;
            if let Some(b) = space.up(a, k) {
                let c = match opts.normalization {
                    Normalization::Bare => 1.0,
                    Normalization::Scaled => ((nk + 1.0) * slot.scale).sqrt(),
                };
                let col0 = b * nb;
                for &(r, cc, v) in &slot.up {
                    trip.push(row0 + r, col0 + cc, minus_i * c * v);
                }
            }
            if let Some(b) = space.down(a, k) {
                let c = match opts.normalization {
                    Normalization::Bare => nk,
                    Normalization::Scaled => (nk / slot.scale).sqrt(),
                };
                let col0 = b * nb;
                for &(r, cc, v) in &slot.down {
                    trip.push(row0 + r, col0 + cc, minus_i * c * v);
                }
            }
        }
    }
    Ok(Generator {
        matrix: trip.into_csr(),
        sites: n,
        ado_count: space.len(),
        provenance,
        normalization: opts.normalization,
        ados: Some(space),
    })
}

/// Full HEOM: up-coupling `[V,·]`, down-coupling `ξ^R[V,·] + iξ^I{V,·}`.
/// Separate mode attaches an independent copy of the decomposition to
/// every bond.
pub fn build_heom_generator(
    lattice: &LatticeSpec,
    decomposition: &ExponentialDecomposition,
    opts: &HeomOptions,
) -> Result<Generator> {
    if decomposition.convention != Convention::FullRI {
        return Err(Error::Channel("full HEOM needs a Real/Imag decomposition".into()));
    }
    let mut slots = Vec::new();
    for v in build_coupling(lattice) {
        slots.extend(full_slots(&v, decomposition, opts.merge_real_imag));
    }
    assemble(lattice, slots, opts, Provenance::Full)
}

/// RWA-HEOM: a slot of channel ν has up-coupling `[V^ν̄,·]` and
/// down-coupling `ξ^ν V^ν ρ − (ξ^ν̄)* ρ V^ν`, where `ξ^ν̄` is the opposite
/// channel's amplitude at the conjugate rate.
pub fn build_rwa_heom_generator(
    lattice: &LatticeSpec,
    decomposition: &ExponentialDecomposition,
    opts: &HeomOptions,
) -> Result<Generator> {
    if decomposition.convention != Convention::Rwa {
        return Err(Error::Channel("RWA-HEOM needs an absorb/emit decomposition".into()));
    }
    let h = build_hamiltonian(lattice);
    let mut slots = Vec::new();
    for v in build_coupling(lattice) {
        let (vp, vm) = split_raising_lowering(&v, &h)?;
        slots.extend(rwa_slots(&vp, &vm, decomposition));
    }
    assemble(lattice, slots, opts, Provenance::Rwa)
}

/// Generator of the bare system `−i[H,·]` (no bath).
pub fn build_unitary_generator(lattice: &LatticeSpec) -> Generator {
    let h = build_hamiltonian(lattice);
    let nb = lattice.sites * lattice.sites;
    let mut trip = Triplets::new(nb);
    for (r, c, v) in superop::scale(superop::commutator(&h), -C64::i()) {
        trip.push(r, c, v);
    }
    Generator {
        matrix: trip.into_csr(),
        sites: lattice.sites,
        ado_count: 1,
        provenance: Provenance::Full,
        normalization: Normalization::Bare,
        ados: None,
    }
}
