//! Parameter sweeps over (method, N, Γ) cells.

use crate::bath::{BathSpec, Convention, DensityKind, Scheme, SpectralDensity};
use crate::bmme::{build_bmme_generator, markov_rates};
use crate::dynamics::{gamma_bar, site_state, PropagateOptions};
use crate::error::{invalid, Error, Result};
use crate::heom::{build_heom_generator, build_rwa_heom_generator, Generator, HeomOptions, Normalization, DEFAULT_ADO_CAP};
use crate::lattice::{CouplingMode, LatticeSpec};
use crate::spectral::{classify_modes, eigendecompose, steady_state, EigenMode, ModeReport, DEFAULT_DOMINANT_K};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Desk-scale limits for the hierarchical methods.
pub const DESK_MAX_SITES: usize = 10;
pub const DESK_MAX_M: usize = 3;
pub const DESK_MAX_L: usize = 5;
/// Relative refinement delta below which a cell counts as converged.
pub const CONVERGED_DELTA: f64 = 0.02;
/// Generators up to this dimension are diagonalized densely under `Auto`.
pub const AUTO_DENSE_DIM: usize = 1200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Heom,
    RwaHeom,
    Bmme,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Heom => "heom",
            Method::RwaHeom => "rwa-heom",
            Method::Bmme => "bmme",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SchemeChoice {
    Pade,
    Aaa { tol: f64 },
    LorentzianAnalytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Auto,
    Dense,
    Iterative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub kind: DensityKind,
    pub width: f64,
    /// Lorentzian peak; `None` puts it on the site gap Ω.
    pub center: Option<f64>,
    pub temperature: f64,
    pub scheme: SchemeChoice,
}

impl BathParams {
    pub fn spec(&self, gamma: f64, detuning: f64, l_max: usize) -> Result<BathSpec> {
        let density = SpectralDensity::new(self.kind, gamma, self.width, self.center.unwrap_or(detuning))?;
        let scheme = match self.scheme {
            SchemeChoice::Pade => Scheme::Pade { l_max },
            SchemeChoice::Aaa { tol } => Scheme::Aaa { tol },
            SchemeChoice::LorentzianAnalytic => Scheme::LorentzianAnalytic,
        };
        BathSpec::new(density, self.temperature, scheme)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub m_max: usize,
    pub l_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requested {
    pub profile: bool,
    pub gamma_bar: bool,
    pub convergence: bool,
}

impl Default for Requested {
    fn default() -> Self {
        Self {
            profile: true,
            gamma_bar: false,
            convergence: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPlan {
    pub methods: Vec<Method>,
    pub sites: Vec<usize>,
    pub gammas: Vec<f64>,
    /// One entry per Γ, or a single entry shared by all.
    pub truncations: Vec<Truncation>,
    pub detuning: f64,
    pub coupling: CouplingMode,
    pub bath: BathParams,
    pub rate_multiplier: f64,
    /// Initially occupied site (0-based); `None` is the top site N − 1.
    pub initial_site: Option<usize>,
    pub solver: Solver,
    pub rtol: f64,
    pub requested: Requested,
    pub ado_cap: usize,
    pub normalization: Normalization,
    pub merge_real_imag: bool,
    pub threads: Option<usize>,
    pub full_scale: bool,
}

impl ScanPlan {
    pub fn new(methods: Vec<Method>, sites: Vec<usize>, gammas: Vec<f64>, bath: BathParams) -> Self {
        Self {
            methods,
            sites,
            gammas,
            truncations: vec![Truncation { m_max: 2, l_max: 2 }],
            detuning: 1.0,
            coupling: CouplingMode::Collective,
            bath,
            rate_multiplier: 1.0,
            initial_site: None,
            solver: Solver::Auto,
            rtol: 1e-8,
            requested: Requested::default(),
            ado_cap: DEFAULT_ADO_CAP,
            normalization: Normalization::Scaled,
            merge_real_imag: true,
            threads: None,
            full_scale: false,
        }
    }

    pub fn truncation(&self, gamma_index: usize) -> Truncation {
        if self.truncations.len() == 1 {
            self.truncations[0]
        } else {
            self.truncations[gamma_index]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.sites.is_empty() || self.gammas.is_empty() {
            return Err(invalid("plan", "methods, sites and gammas must be non-empty"));
        }
        if self.truncations.len() != 1 && self.truncations.len() != self.gammas.len() {
            return Err(invalid(
                "truncations",
                format!("need 1 or {} entries, got {}", self.gammas.len(), self.truncations.len()),
            ));
        }
        if let Some(&n) = self.sites.iter().find(|&&n| n < 2) {
            return Err(invalid("sites", format!("need N >= 2, got {n}")));
        }
        if let Some(s) = self.initial_site {
            if let Some(&n) = self.sites.iter().find(|&&n| s >= n) {
                return Err(invalid("initial_site", format!("site {s} outside N = {n}")));
            }
        }
        if !(self.rtol > 0.0) {
            return Err(invalid("rtol", "must be > 0"));
        }
        let hierarchical = self.methods.iter().any(|m| *m != Method::Bmme);
        if hierarchical && !self.full_scale {
            let n = self.sites.iter().max().copied().unwrap_or(0);
            let m = self.truncations.iter().map(|t| t.m_max).max().unwrap_or(0);
            let l = self.truncations.iter().map(|t| t.l_max).max().unwrap_or(0);
            if n > DESK_MAX_SITES || m > DESK_MAX_M || l > DESK_MAX_L {
                return Err(invalid(
                    "full_scale",
                    format!(
                        "N = {n}, m_max = {m}, l_max = {l} exceeds desk scale \
                         (N <= {DESK_MAX_SITES}, m_max <= {DESK_MAX_M}, l_max <= {DESK_MAX_L})"
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Cells in output order: method, then N, then Γ.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        let mut out = Vec::new();
        for &method in &methods {
            for &sites in &self.sites {
                for (gamma_index, &gamma) in self.gammas.iter().enumerate() {
                    out.push(CellKey {
                        method,
                        sites,
                        gamma,
                        gamma_index,
                    });
                }
            }
        }
        out.sort_by(|a, b| {
            (a.method, a.sites)
                .cmp(&(b.method, b.sites))
                .then(a.gamma.total_cmp(&b.gamma))
        });
        out
    }

    fn propagate_options(&self) -> PropagateOptions {
        PropagateOptions::with_rtol(self.rtol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub method: Method,
    pub sites: usize,
    pub gamma: f64,
    pub gamma_index: usize,
}

pub fn build_generator(plan: &ScanPlan, method: Method, sites: usize, gamma: f64, tr: Truncation) -> Result<Generator> {
    let lat = LatticeSpec::new(sites, plan.detuning, plan.coupling)?;
    let bath = plan.bath.spec(gamma, plan.detuning, tr.l_max)?;
    let mut opts = HeomOptions::new(tr.m_max);
    opts.ado_cap = plan.ado_cap;
    opts.normalization = plan.normalization;
    opts.merge_real_imag = plan.merge_real_imag;
    match method {
        Method::Heom => build_heom_generator(&lat, &bath.decompose(Convention::FullRI)?, &opts),
        Method::RwaHeom => build_rwa_heom_generator(&lat, &bath.decompose(Convention::Rwa)?, &opts),
        Method::Bmme => build_bmme_generator(&lat, &markov_rates(&bath, plan.detuning, plan.rate_multiplier)?),
    }
}

pub fn eigen_mode(solver: Solver, dim: usize) -> EigenMode {
    match solver {
        Solver::Dense => EigenMode::Dense,
        Solver::Iterative => EigenMode::DominantOnly(DEFAULT_DOMINANT_K),
        Solver::Auto if dim <= AUTO_DENSE_DIM => EigenMode::Dense,
        Solver::Auto => EigenMode::DominantOnly(DEFAULT_DOMINANT_K),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub m_max: usize,
    pub l_max: usize,
    pub tau_delta: Option<f64>,
    pub lambda_delta: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub refinements: Vec<Refinement>,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellResult {
    pub key: CellKey,
    pub truncation: Truncation,
    pub dim: usize,
    pub report: Option<ModeReport>,
    pub profile: Vec<f64>,
    pub gamma_bar: Option<f64>,
    pub convergence: Option<Convergence>,
    pub wall_time: f64,
    pub error: Option<String>,
}

impl CellResult {
    pub fn tau(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.tau.tau)
    }

    pub fn lambda_d(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.lambda_d.re)
    }

    pub fn xi(&self) -> Option<f64> {
        self.report.as_ref().and_then(|r| r.xi.as_ref()).map(|f| f.xi)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanResult {
    pub cells: Vec<CellResult>,
}

impl ScanResult {
    pub fn get(&self, method: Method, sites: usize, gamma: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.key.method == method && c.key.sites == sites && c.key.gamma == gamma)
    }

    /// (N, value) pairs of one method/Γ column, skipping failed cells.
    pub fn series(&self, method: Method, gamma: f64, f: impl Fn(&CellResult) -> Option<f64>) -> Vec<(usize, f64)> {
        self.cells
            .iter()
            .filter(|c| c.key.method == method && c.key.gamma == gamma)
            .filter_map(|c| f(c).map(|v| (c.key.sites, v)))
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

struct Core {
    dim: usize,
    report: ModeReport,
    profile: Vec<f64>,
    generator: Generator,
}

fn analyze(plan: &ScanPlan, key: &CellKey, tr: Truncation, want_profile: bool) -> Result<Core> {
    let g = build_generator(plan, key.method, key.sites, key.gamma, tr)?;
    let es = eigendecompose(&g, eigen_mode(plan.solver, g.dim()))?;
    let site = plan.initial_site.unwrap_or(key.sites - 1);
    let report = classify_modes(&es, &g.embed(&site_state(key.sites, site))?)?;
    let profile = if want_profile {
        let ss = steady_state(&es)?;
        (0..key.sites).map(|n| ss[(n, n)].re).collect()
    } else {
        Vec::new()
    };
    Ok(Core {
        dim: g.dim(),
        report,
        profile,
        generator: g,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Refines `m_max` by one and, for Padé baths, `l_max` by two, reporting
/// relative changes of τ and λ_d.
pub fn convergence_check(plan: &ScanPlan, key: &CellKey, base: Truncation, report: &ModeReport) -> Convergence {
    if key.method == Method::Bmme {
        return Convergence {
            refinements: Vec::new(),
            converged: true,
        };
    }
    let mut steps = Vec::new();
    steps.push(Truncation {
        m_max: base.m_max + 1,
        l_max: base.l_max,
    });
    if key.method == Method::Heom && plan.bath.scheme == SchemeChoice::Pade {
        steps.push(Truncation {
            m_max: base.m_max,
            l_max: base.l_max + 2,
        });
    }
    let refinements: Vec<Refinement> = steps
        .into_iter()
        .map(|t| match analyze(plan, key, t, false) {
            Ok(c) => Refinement {
                m_max: t.m_max,
                l_max: t.l_max,
                tau_delta: Some(rel(c.report.tau.tau, report.tau.tau)),
                lambda_delta: Some(rel(c.report.lambda_d.re, report.lambda_d.re)),
                error: None,
            },
            Err(e) => Refinement {
                m_max: t.m_max,
                l_max: t.l_max,
                tau_delta: None,
                lambda_delta: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let converged = refinements.iter().all(|r| {
        matches!((r.tau_delta, r.lambda_delta), (Some(a), Some(b)) if a < CONVERGED_DELTA && b < CONVERGED_DELTA)
    });
    Convergence { refinements, converged }
}

pub fn run_cell(plan: &ScanPlan, key: CellKey) -> CellResult {
    let start = Instant::now();
    let tr = plan.truncation(key.gamma_index);
    let mut out = CellResult {
        key,
        truncation: tr,
        dim: 0,
        report: None,
        profile: Vec::new(),
        gamma_bar: None,
        convergence: None,
        wall_time: 0.0,
        error: None,
    };
    match analyze(plan, &key, tr, plan.requested.profile) {
        Ok(core) => {
            out.dim = core.dim;
            if plan.requested.gamma_bar && core.report.tau.tau > 0.0 {
                let site = plan.initial_site.unwrap_or(key.sites - 1);
                let rho0 = site_state(key.sites, site);
                match gamma_bar(&core.generator, &rho0, core.report.tau.tau, &plan.propagate_options()) {
                    Ok(v) => out.gamma_bar = Some(v),
                    Err(e) => out.error = Some(format!("gamma_bar: {e}")),
                }
            }
            if plan.requested.convergence {
                out.convergence = Some(convergence_check(plan, &key, tr, &core.report));
            }
            out.profile = core.profile;
            out.report = Some(core.report);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out.wall_time = start.elapsed().as_secs_f64();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Parallel,
    Sequential,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "sequential") {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

pub fn run_scan(plan: &ScanPlan) -> Result<ScanResult> {
    run_scan_with(plan, Execution::default())
}

pub fn run_scan_with(plan: &ScanPlan, exec: Execution) -> Result<ScanResult> {
    plan.validate()?;
    let keys = plan.cells();
    let cells = match exec {
        Execution::Sequential => keys.into_iter().map(|k| run_cell(plan, k)).collect(),
        Execution::Parallel => {
            use rayon::prelude::*;
            let work = || keys.par_iter().map(|&k| run_cell(plan, k)).collect::<Vec<_>>();
            match plan.threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                    .install(work),
                None => work(),
            }
        }
    };
    Ok(ScanResult { cells })
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0)
        .map(|&(x, y)| ((x as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extremum {
    Max,
    Min,
}

/// Strict interior local extrema of a series ordered by N.
pub fn local_extrema(series: &[(usize, f64)]) -> Vec<(usize, Extremum)> {
    series
        .windows(3)
        .filter_map(|w| {
            let (a, b, c) = (w[0].1, w[1].1, w[2].1);
            if b > a && b > c {
                Some((w[1].0, Extremum::Max))
            } else if b < a && b < c {
                Some((w[1].0, Extremum::Min))
            } else {
                None
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub delta_tau: Vec<(usize, Extremum)>,
    pub gamma_bar: Vec<(usize, Extremum)>,
    /// Extrema of δτ with a same-kind γ̄ extremum within `window` sites.
    pub matched: usize,
}

impl Alignment {
    pub fn aligned(&self) -> bool {
        !self.delta_tau.is_empty() && self.matched == self.delta_tau.len()
    }
}

/// δτ(N) = τ_HEOM − τ_BMME against γ̄(N) of the HEOM cells.
pub fn extremum_alignment(result: &ScanResult, gamma: f64, window: usize) -> Alignment {
    let heom = result.series(Method::Heom, gamma, CellResult::tau);
    let bmme = result.series(Method::Bmme, gamma, CellResult::tau);
    let dtau: Vec<(usize, f64)> = heom
        .iter()
        .filter_map(|&(n, t)| bmme.iter().find(|p| p.0 == n).map(|p| (n, t - p.1)))
        .collect();
    let gb = result.series(Method::Heom, gamma, |c| c.gamma_bar);
    let a = local_extrema(&dtau);
    let b = local_extrema(&gb);
    let matched = a
        .iter()
        .filter(|(n, k)| b.iter().any(|(m, j)| j == k && n.abs_diff(*m) <= window))
        .count();
    Alignment {
        delta_tau: a,
        gamma_bar: b,
        matched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(usize, f64)> = (2..9).map(|n| (n, 3.0 * (n as f64).powf(1.5))).collect();
        assert!((loglog_slope(&pts).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn extrema_of_zigzag() {
        let s = [(2, 0.0), (3, 1.0), (4, 0.5), (5, 0.7), (6, 0.7)];
        assert_eq!(local_extrema(&s), vec![(3, Extremum::Max), (4, Extremum::Min)]);
    }
}
