//! Strict TOML run configuration.
//!
//! Only `lattice.sites` is required. Defaults:
//!
//! | key | default |
//! |---|---|
//! | `lattice.detuning` | 1.0 |
//! | `lattice.coupling` | `"collective"` |
//! | `bath.kind` | `"drude-lorentz"` |
//! | `bath.gamma`, `bath.width` | 0.5, 1.0 |
//! | `bath.center` | the site gap Ω |
//! | `bath.temperature` | 1.44 |
//! | `bath.scheme` | `"pade"` |
//! | `bath.l_max`, `bath.aaa_tol` | 2, 1e-2 |
//! | `method.kind` | `"heom"` |
//! | `method.m_max` | 2 (ignored by `bmme`) |
//! | `method.rate_multiplier` | 1.0 |
//! | `method.normalization`, `method.merge_real_imag` | `"scaled"`, true |
//! | `method.ado_cap` | 1 000 000 |
//! | `run.t_end`, `run.points` | 20.0, 201 |
//! | `run.rtol`, `run.atol` | 1e-8, 1e-10 |
//! | `run.integrator`, `run.bdf2_step` | `"dormand-prince"`, 1e-3 |
//! | `run.solver` | `"auto"` |
//! | `run.initial_site` | N (sites count from 1) |
//! | `run.coherences` | `[]` |
//! | `run.out` | `"out"` (not hashed) |
//! | `run.deterministic` | true (wall times are left out of outputs) |
//! | `run.full_scale`, `run.gamma_bar` | false, false |
//!
//! An optional `[scan]` table turns the run into a sweep.

use crate::bath::{DensityKind, Scheme};
use crate::dynamics::{Integrator, PropagateOptions};
use crate::error::{Error, Result};
use crate::heom::{HeomOptions, Normalization, DEFAULT_ADO_CAP};
use crate::lattice::{CouplingMode, LatticeSpec};
use crate::scan::{BathParams, Method, Requested, ScanPlan, SchemeChoice, Solver, Truncation};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Pade,
    Aaa,
    LorentzianAnalytic,
}

impl SchemeName {
    fn as_str(self) -> &'static str {
        match self {
            SchemeName::Pade => "pade",
            SchemeName::Aaa => "aaa",
            SchemeName::LorentzianAnalytic => "lorentzian-analytic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorName {
    DormandPrince,
    Bdf2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub sites: usize,
    #[serde(default = "one")]
    pub detuning: f64,
    #[serde(default = "collective")]
    pub coupling: CouplingMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathConfig {
    pub kind: DensityKind,
    pub gamma: f64,
    pub width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    pub temperature: f64,
    pub scheme: SchemeName,
    pub l_max: usize,
    pub aaa_tol: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self {
            kind: DensityKind::DrudeLorentz,
            gamma: 0.5,
            width: 1.0,
            center: None,
            temperature: 1.44,
            scheme: SchemeName::Pade,
            l_max: 2,
            aaa_tol: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodConfig {
    pub kind: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    pub rate_multiplier: f64,
    pub normalization: Normalization,
    pub merge_real_imag: bool,
    pub ado_cap: usize,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            kind: Method::Heom,
            m_max: None,
            rate_multiplier: 1.0,
            normalization: Normalization::Scaled,
            merge_real_imag: true,
            ado_cap: DEFAULT_ADO_CAP,
        }
    }
}

pub const DEFAULT_M_MAX: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub t_end: f64,
    pub points: usize,
    pub rtol: f64,
    pub atol: f64,
    pub integrator: IntegratorName,
    pub bdf2_step: f64,
    pub solver: Solver,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_site: Option<usize>,
    pub coherences: Vec<[usize; 2]>,
    /// Destination only; not part of the hashed configuration.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub deterministic: bool,
    pub full_scale: bool,
    pub gamma_bar: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t_end: 20.0,
            points: 201,
            rtol: 1e-8,
            atol: 1e-10,
            integrator: IntegratorName::DormandPrince,
            bdf2_step: 1e-3,
            solver: Solver::Auto,
            initial_site: None,
            coherences: Vec::new(),
            out: PathBuf::from("out"),
            deterministic: true,
            full_scale: false,
            gamma_bar: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<Method>,
    pub sites: Vec<usize>,
    pub gammas: Vec<f64>,
    /// per Γ, or one value for all
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_max: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub l_max: Vec<usize>,
    #[serde(default)]
    pub convergence: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub bath: BathConfig,
    #[serde(default)]
    pub method: MethodConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
}

fn one() -> f64 {
    1.0
}

fn collective() -> CouplingMode {
    CouplingMode::Collective
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Command-line overrides applied after parsing.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub m_max: Option<usize>,
    pub l_max: Option<usize>,
    pub rtol: Option<f64>,
    pub solver: Option<Solver>,
    pub full_scale: bool,
    pub out: Option<PathBuf>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(m) = o.m_max {
            self.method.m_max = Some(m);
            if let Some(s) = &mut self.scan {
                s.m_max.clear();
            }
        }
        if let Some(l) = o.l_max {
            self.bath.l_max = l;
            if let Some(s) = &mut self.scan {
                s.l_max.clear();
            }
        }
        if let Some(r) = o.rtol {
            self.run.rtol = r;
        }
        if let Some(s) = o.solver {
            self.run.solver = s;
        }
        if o.full_scale {
            self.run.full_scale = true;
        }
        if let Some(p) = &o.out {
            self.run.out = p.clone();
        }
        self.validate()
    }

    pub fn m_max(&self) -> usize {
        self.method.m_max.unwrap_or(DEFAULT_M_MAX)
    }

    /// Notes about accepted but unused settings.
    pub fn notes(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.method.kind == Method::Bmme && self.method.m_max.is_some() {
            out.push("method.m_max is ignored by bmme".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.lattice;
        if l.sites < 2 {
            return Err(bad(format!("lattice.sites: need N >= 2, got {}", l.sites)));
        }
        if !(l.detuning > 0.0) || !l.detuning.is_finite() {
            return Err(bad(format!("lattice.detuning: need Ω > 0, got {}", l.detuning)));
        }
        let b = &self.bath;
        if !(b.gamma >= 0.0) || !b.gamma.is_finite() {
            return Err(bad(format!("bath.gamma: need Γ >= 0, got {}", b.gamma)));
        }
        if !(b.width > 0.0) || !b.width.is_finite() {
            return Err(bad(format!("bath.width: need W > 0, got {}", b.width)));
        }
        if !(b.temperature >= 0.0) || !b.temperature.is_finite() {
            return Err(bad(format!("bath.temperature: need T >= 0, got {}", b.temperature)));
        }
        if b.temperature == 0.0 && b.scheme != SchemeName::LorentzianAnalytic {
            return Err(bad(format!(
                "bath.temperature = 0 requires bath.scheme = \"lorentzian-analytic\", got bath.scheme = \"{}\"",
                b.scheme.as_str()
            )));
        }
        match b.scheme {
            SchemeName::Pade => {
                if b.kind != DensityKind::DrudeLorentz {
                    return Err(bad("bath.scheme = \"pade\" requires bath.kind = \"drude-lorentz\""));
                }
                if b.l_max == 0 {
                    return Err(bad("bath.l_max: must be >= 1"));
                }
            }
            SchemeName::LorentzianAnalytic => {
                if b.kind != DensityKind::Lorentzian {
                    return Err(bad("bath.scheme = \"lorentzian-analytic\" requires bath.kind = \"lorentzian\""));
                }
                if b.temperature != 0.0 {
                    return Err(bad(
                        "bath.scheme = \"lorentzian-analytic\" requires bath.temperature = 0",
                    ));
                }
            }
            SchemeName::Aaa => {
                if !(b.aaa_tol > 0.0) {
                    return Err(bad("bath.aaa_tol: must be > 0"));
                }
            }
        }
        let methods = self.methods();
        for m in &methods {
            let ok = match m {
                Method::Heom => b.scheme != SchemeName::Aaa,
                Method::RwaHeom => b.scheme != SchemeName::Pade,
                Method::Bmme => true,
            };
            if !ok {
                return Err(bad(format!(
                    "method.kind = \"{}\" cannot use bath.scheme = \"{}\"",
                    m.name(),
                    b.scheme.as_str()
                )));
            }
        }
        if self.method.m_max == Some(0) {
            return Err(bad("method.m_max: must be >= 1"));
        }
        if !(self.method.rate_multiplier >= 0.0) {
            return Err(bad("method.rate_multiplier: must be >= 0"));
        }
        let r = &self.run;
        if !(r.t_end > 0.0) || r.points < 2 {
            return Err(bad("run.t_end must be > 0 and run.points >= 2"));
        }
        if !(r.rtol > 0.0) || !(r.atol > 0.0) {
            return Err(bad("run.rtol and run.atol must be > 0"));
        }
        if r.integrator == IntegratorName::Bdf2 && !(r.bdf2_step > 0.0) {
            return Err(bad("run.bdf2_step: must be > 0"));
        }
        let n_min = self
            .scan
            .as_ref()
            .and_then(|s| s.sites.iter().min().copied())
            .unwrap_or(l.sites);
        if let Some(s) = r.initial_site {
            if s == 0 || s > n_min {
                return Err(bad(format!("run.initial_site: {s} outside 1..={n_min}")));
            }
        }
        for &[a, c] in &r.coherences {
            if a == 0 || c == 0 || a > l.sites || c > l.sites || a == c {
                return Err(bad(format!("run.coherences: bad pair [{a}, {c}] for N = {}", l.sites)));
            }
        }
        if let Some(s) = &self.scan {
            if s.sites.is_empty() || s.gammas.is_empty() {
                return Err(bad("scan.sites and scan.gammas must be non-empty"));
            }
            for (name, v) in [("scan.m_max", &s.m_max), ("scan.l_max", &s.l_max)] {
                if v.len() > 1 && v.len() != s.gammas.len() {
                    return Err(bad(format!(
                        "{name}: need 1 or {} entries (one per scan.gammas), got {}",
                        s.gammas.len(),
                        v.len()
                    )));
                }
            }
            if s.threads == Some(0) {
                return Err(bad("scan.threads: must be >= 1"));
            }
        }
        self.plan().validate().map_err(|e| bad(e.to_string()))
    }

    pub fn methods(&self) -> Vec<Method> {
        match &self.scan {
            Some(s) if !s.methods.is_empty() => s.methods.clone(),
            _ => vec![self.method.kind],
        }
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.lattice.sites, self.lattice.detuning, self.lattice.coupling)
    }

    pub fn bath_params(&self) -> BathParams {
        let b = &self.bath;
        BathParams {
            kind: b.kind,
            width: b.width,
            center: b.center,
            temperature: b.temperature,
            scheme: match b.scheme {
                SchemeName::Pade => SchemeChoice::Pade,
                SchemeName::Aaa => SchemeChoice::Aaa { tol: b.aaa_tol },
                SchemeName::LorentzianAnalytic => SchemeChoice::LorentzianAnalytic,
            },
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self.bath.scheme {
            SchemeName::Pade => Scheme::Pade { l_max: self.bath.l_max },
            SchemeName::Aaa => Scheme::Aaa { tol: self.bath.aaa_tol },
            SchemeName::LorentzianAnalytic => Scheme::LorentzianAnalytic,
        }
    }

    pub fn heom_options(&self) -> HeomOptions {
        let mut o = HeomOptions::new(self.m_max());
        o.normalization = self.method.normalization;
        o.merge_real_imag = self.method.merge_real_imag;
        o.ado_cap = self.method.ado_cap;
        o
    }

    pub fn propagate_options(&self) -> PropagateOptions {
        let mut o = PropagateOptions::with_rtol(self.run.rtol);
        o.control.atol = self.run.atol;
        if self.run.integrator == IntegratorName::Bdf2 {
            o.integrator = Integrator::Bdf2 { step: self.run.bdf2_step };
        }
        o
    }

    /// 0-based initially occupied site.
    pub fn initial_site(&self, sites: usize) -> usize {
        self.run.initial_site.map_or(sites - 1, |s| s - 1)
    }

    /// The sweep described by `[scan]`, or the single configured cell.
    pub fn plan(&self) -> ScanPlan {
        let (sites, gammas, ms, ls, convergence, threads) = match &self.scan {
            Some(s) => (
                s.sites.clone(),
                s.gammas.clone(),
                s.m_max.clone(),
                s.l_max.clone(),
                s.convergence,
                s.threads,
            ),
            None => (vec![self.lattice.sites], vec![self.bath.gamma], vec![], vec![], false, None),
        };
        let pick = |v: &[usize], i: usize, d: usize| match v.len() {
            0 => d,
            1 => v[0],
            _ => v[i],
        };
        let count = ms.len().max(ls.len()).max(1);
        let truncations = (0..count)
            .map(|i| Truncation {
                m_max: pick(&ms, i, self.m_max()),
                l_max: pick(&ls, i, self.bath.l_max),
            })
            .collect();
        let mut plan = ScanPlan::new(self.methods(), sites, gammas, self.bath_params());
        plan.truncations = truncations;
        plan.detuning = self.lattice.detuning;
        plan.coupling = self.lattice.coupling;
        plan.rate_multiplier = self.method.rate_multiplier;
        plan.initial_site = self.run.initial_site.map(|s| s - 1);
        plan.solver = self.run.solver;
        plan.rtol = self.run.rtol;
        plan.requested = Requested {
            profile: true,
            gamma_bar: self.run.gamma_bar,
            convergence,
        };
        plan.ado_cap = self.method.ado_cap;
        plan.normalization = self.method.normalization;
        plan.merge_real_imag = self.method.merge_real_imag;
        plan.threads = threads;
        plan.full_scale = self.run.full_scale;
        plan
    }
}
