#![allow(dead_code)]

use proptest::prelude::*;
use skinheom::bath::{BathSpec, Convention, Scheme, SpectralDensity};
use skinheom::bmme::{build_bmme_generator, markov_rates};
use skinheom::dynamics::{propagate, site_state, uniform_grid, PropagateOptions};
use skinheom::heom::{build_heom_generator, build_rwa_heom_generator, Generator, HeomOptions};
use skinheom::lattice::{CouplingMode, LatticeSpec};
use skinheom::spectral::{eigendecompose, steady_state_index, EigenMode};
use skinheom::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Full,
    Rwa,
    Bmme,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub method: Method,
    pub sites: usize,
    pub l_max: usize,
    pub m_max: usize,
    pub merge: bool,
    pub gamma: f64,
    pub width: f64,
    pub temperature: f64,
    pub detuning: f64,
}

pub fn instance(methods: Vec<Method>) -> impl Strategy<Value = Instance> {
    (
        proptest::sample::select(methods),
        2usize..=4,
        1usize..=3,
        1usize..=2,
        any::<bool>(),
        0.05f64..1.0,
        0.5f64..2.0,
        0.5f64..3.0,
        0.5f64..2.0,
    )
        .prop_map(|(method, sites, l_max, m_max, merge, gamma, width, temperature, detuning)| Instance {
            method,
            sites,
            l_max,
            m_max,
            merge,
            gamma,
            width,
            temperature,
            detuning,
        })
}

/// Slot count stays within K ≤ 4: Padé gives l_max slots merged or
/// l_max + 1 split; RWA gives 2.
pub fn build(inst: &Instance) -> Generator {
    let lat = LatticeSpec::new(inst.sites, inst.detuning, CouplingMode::Collective).unwrap();
    let mut opts = HeomOptions::new(inst.m_max);
    opts.merge_real_imag = inst.merge;
    let drude = || {
        BathSpec::new(
            SpectralDensity::drude_lorentz(inst.gamma, inst.width).unwrap(),
            inst.temperature,
            Scheme::Pade { l_max: inst.l_max },
        )
        .unwrap()
    };
    match inst.method {
        Method::Full => {
            let d = drude().decompose(Convention::FullRI).unwrap();
            build_heom_generator(&lat, &d, &opts).unwrap()
        }
        Method::Rwa => {
            let bath = BathSpec::new(
                SpectralDensity::lorentzian(inst.gamma, inst.width, inst.detuning).unwrap(),
                0.0,
                Scheme::LorentzianAnalytic,
            )
            .unwrap();
            let d = bath.decompose(Convention::Rwa).unwrap();
            build_rwa_heom_generator(&lat, &d, &opts).unwrap()
        }
        Method::Bmme => {
            let rates = markov_rates(&drude(), inst.detuning, 1.0).unwrap();
            build_bmme_generator(&lat, &rates).unwrap()
        }
    }
}

pub fn dynamic_invariants(inst: &Instance, g: &Generator) -> Result<(), String> {
    if let Some(space) = &g.ados {
        if space.k > 4 {
            return Err(format!("{} slots", space.k));
        }
    }
    let rho0 = site_state(inst.sites, inst.sites - 1);
    let traj = propagate(g, &rho0, &uniform_grid(3.0, 7), &PropagateOptions::default()).map_err(|e| e.to_string())?;
    let (tr, herm) = traj.invariant_errors();
    if tr >= 1e-8 {
        return Err(format!("trace drift {tr:e}"));
    }
    if herm >= 1e-8 {
        return Err(format!("hermiticity {herm:e}"));
    }
    Ok(())
}

#[derive(Debug)]
pub enum SpectralFailure {
    /// The solver refused a defective cluster or could not pair a mode.
    Defective(String),
    Violation(String),
}

pub fn spectral_invariants(g: &Generator) -> Result<(), SpectralFailure> {
    let es = match eigendecompose(g, EigenMode::Dense) {
        Ok(es) => es,
        Err(e @ (Error::IllConditioned(_) | Error::Unpaired(..))) => {
            return Err(SpectralFailure::Defective(e.to_string()))
        }
        Err(e) => return Err(SpectralFailure::Violation(e.to_string())),
    };
    let v = SpectralFailure::Violation;
    if es.biorthogonality_residual >= 1e-8 {
        return Err(v(format!("biorthogonality {:e}", es.biorthogonality_residual)));
    }
    steady_state_index(&es).map_err(|e| v(e.to_string()))?;
    for z in &es.values {
        let d = es.values.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
        if d >= 1e-9 {
            return Err(v(format!("{z} has no conjugate partner ({d:e})")));
        }
    }
    Ok(())
}
