//! Time propagation of generators and trajectory observables.

mod oracle;
mod rk;

pub use oracle::{g_function, two_site_analytic};
pub use rk::{Bdf2, DormandPrince, StepControl};

use crate::error::{invalid, Error, Result};
use crate::heom::{Generator, Provenance};
use crate::lattice::SystemOperator;
use crate::C64;
use faer::Side;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Integrator {
    DormandPrince,
    /// Fixed-step implicit BDF2 for stiff hierarchies.
    Bdf2 { step: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct PropagateOptions {
    pub integrator: Integrator,
    pub control: StepControl,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::DormandPrince,
            control: StepControl::default(),
        }
    }
}

impl PropagateOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        let mut o = Self::default();
        o.control.rtol = rtol;
        o
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SystemOperator>,
    pub provenance: Provenance,
}

impl Trajectory {
    pub fn sites(&self) -> usize {
        self.states.first().map_or(0, |s| s.nrows())
    }

    /// `max_t |tr ρ − 1|` and `max_t ‖ρ − ρ†‖_max`.
    pub fn invariant_errors(&self) -> (f64, f64) {
        let mut tr_err: f64 = 0.0;
        let mut herm: f64 = 0.0;
        for s in &self.states {
            let tr: C64 = (0..s.nrows()).map(|i| s[(i, i)]).sum();
            tr_err = tr_err.max((tr - 1.0).norm());
            herm = herm.max((s - s.adjoint()).norm_max());
        }
        (tr_err, herm)
    }
}

/// Evenly spaced grid `0, t_end/(n−1), …, t_end`.
pub fn uniform_grid(t_end: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

/// `|n⟩⟨n|` (zero-based).
pub fn site_state(sites: usize, n: usize) -> SystemOperator {
    SystemOperator::from_fn(sites, sites, |i, j| if i == n && j == n { C64::from(1.0) } else { C64::from(0.0) })
}

fn check_density(rho: &SystemOperator) -> Result<()> {
    let tr: C64 = (0..rho.nrows()).map(|i| rho[(i, i)]).sum();
    if (tr - 1.0).norm() > 1e-10 {
        return Err(invalid("rho0", format!("trace {tr} is not 1")));
    }
    if (rho - rho.adjoint()).norm_max() > 1e-12 {
        return Err(invalid("rho0", "not Hermitian"));
    }
    let ev = rho
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    if ev.iter().any(|&v| v < -1e-12) {
        return Err(invalid("rho0", "not positive semidefinite"));
    }
    Ok(())
}

/// Propagate `ρ0` (ADOs zero) and sample the reduced state on `grid`.
pub fn propagate(g: &Generator, rho0: &SystemOperator, grid: &[f64], opts: &PropagateOptions) -> Result<Trajectory> {
    check_density(rho0)?;
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.first().is_some_and(|&t| t < 0.0) {
        return Err(invalid("grid", "times must be non-negative and nondecreasing"));
    }
    let y0 = g.embed(rho0)?;
    let mut states = Vec::with_capacity(grid.len());
    match opts.integrator {
        Integrator::DormandPrince => {
            let mut rk = DormandPrince::new(&g.matrix, y0, opts.control);
            for &t in grid {
                rk.advance_to(t)?;
                states.push(g.reduced(&rk.y)?);
            }
        }
        Integrator::Bdf2 { step } => {
            let mut b = Bdf2::new(&g.matrix, y0, step)?;
            for &t in grid {
                b.advance_to(t)?;
                states.push(g.reduced(&b.y)?);
            }
        }
    }
    Ok(Trajectory {
        times: grid.to_vec(),
        states,
        provenance: g.provenance,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    /// `populations[t][n]`
    pub populations: Vec<Vec<f64>>,
    pub l1_coherence: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_bar: Vec<f64>,
}

/// `⟨d_n†d_m⟩ = ρ_mn` (zero-based).
pub fn coherence(rho: &SystemOperator, n: usize, m: usize) -> C64 {
    rho[(m, n)]
}

pub fn l1_coherence(rho: &SystemOperator) -> f64 {
    let mut s = 0.0;
    for j in 0..rho.ncols() {
        for i in 0..rho.nrows() {
            if i != j {
                s += rho[(i, j)].norm();
            }
        }
    }
    s
}

/// `γ = Σ_n ρ_nn + Σ_{n≠m} Re ρ_mn`.
pub fn scaled_rate(rho: &SystemOperator) -> f64 {
    let mut s = 0.0;
    for j in 0..rho.ncols() {
        for i in 0..rho.nrows() {
            s += rho[(i, j)].re;
        }
    }
    s
}

/// Running trapezoidal average `(1/t)∫₀^t y`; the first entry is `y(0)`.
pub fn running_average(times: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    for i in 0..y.len() {
        if i > 0 {
            acc += 0.5 * (y[i] + y[i - 1]) * (times[i] - times[i - 1]);
        }
        let span = times[i] - times[0];
        out.push(if span > 0.0 { acc / span } else { y[i] });
    }
    out
}

pub fn observables(traj: &Trajectory) -> ObservableSeries {
    let n = traj.sites();
    let populations: Vec<Vec<f64>> = traj.states.iter().map(|s| (0..n).map(|i| s[(i, i)].re).collect()).collect();
    let l1: Vec<f64> = traj.states.iter().map(l1_coherence).collect();
    let gamma: Vec<f64> = traj.states.iter().map(scaled_rate).collect();
    let gamma_bar = running_average(&traj.times, &gamma);
    ObservableSeries {
        times: traj.times.clone(),
        populations,
        l1_coherence: l1,
        gamma,
        gamma_bar,
    }
}

pub const GAMMA_BAR_POINTS: usize = 401;

/// `γ̄(τ) = (1/τ)∫₀^τ γ dt` on a uniform grid of at least 400 intervals.
pub fn gamma_bar(g: &Generator, rho0: &SystemOperator, tau: f64, opts: &PropagateOptions) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid("tau", "must be > 0"));
    }
    let traj = propagate(g, rho0, &uniform_grid(tau, GAMMA_BAR_POINTS), opts)?;
    Ok(*observables(&traj).gamma_bar.last().expect("non-empty grid"))
}

/// Trace norm of a Hermitian difference.
pub fn trace_distance(a: &SystemOperator, b: &SystemOperator) -> Result<f64> {
    let d = a - b;
    let h = SystemOperator::from_fn(d.nrows(), d.ncols(), |i, j| 0.5 * (d[(i, j)] + d[(j, i)].conj()));
    let ev = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(ev.iter().map(|v| v.abs()).sum())
}

/// First grid time with `‖ρ(t) − ρ_ss‖₁ < threshold`.
pub fn relaxation_time_from_dynamics(traj: &Trajectory, rho_ss: &SystemOperator, threshold: f64) -> Result<f64> {
    let mut last = f64::NAN;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        last = trace_distance(s, rho_ss)?;
        if last < threshold {
            return Ok(*t);
        }
    }
    Err(Error::NeverRelaxed(last))
}
