//! Command-line front end.

use crate::bath::{correlation_direct, channel_direct, Channel, Convention};
use crate::config::{Config, Overrides};
use crate::dynamics::{coherence, observables, propagate, site_state, two_site_analytic, uniform_grid};
use crate::error::{Error, Result};
use crate::heom::build_rwa_heom_generator;
use crate::io::{fmt_f64, save_json, save_triplets, Provenance, Table};
use crate::lattice::{CouplingMode, LatticeSpec, SystemOperator};
use crate::scan::{build_generator, eigen_mode, extremum_alignment, loglog_slope, run_scan, Method, SchemeChoice, Solver, Truncation};
use crate::spectral::{classify_modes, eigendecompose};
use crate::C64;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "skinheom", version, about = "Relaxation and skin-mode analysis of biased lattices in bosonic baths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exponential decomposition of the bath correlation function.
    Decompose(#[command(flatten)] Common),
    /// Eigenvalues, mode classes and overlaps of the generator.
    Spectrum(#[command(flatten)] Common),
    /// Time series of populations, coherences and transport rates.
    Dynamics(#[command(flatten)] Common),
    /// Sweep over the `[scan]` grid.
    Scan(#[command(flatten)] Common),
    /// Two-site closed form against the RWA hierarchy.
    Oracle(#[command(flatten)] Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long, conflicts_with = "iterative")]
    pub dense: bool,
    #[arg(long)]
    pub iterative: bool,
    /// Allow grids beyond desk scale.
    #[arg(long)]
    pub full_scale: bool,
    /// Also write the generator as sparse triplets.
    #[arg(long)]
    pub export_generator: bool,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Decompose(c) | Command::Spectrum(c) | Command::Dynamics(c) | Command::Scan(c) | Command::Oracle(c) => c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Decompose(_) => "decompose",
            Command::Spectrum(_) => "spectrum",
            Command::Dynamics(_) => "dynamics",
            Command::Scan(_) => "scan",
            Command::Oracle(_) => "oracle",
        }
    }
}

impl Common {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            m_max: self.m_max,
            l_max: self.l_max,
            rtol: self.rtol,
            solver: if self.dense {
                Some(Solver::Dense)
            } else if self.iterative {
                Some(Solver::Iterative)
            } else {
                None
            },
            full_scale: self.full_scale,
            out: self.out.clone(),
        }
    }
}

/// Loads the config, applies flags and runs one subcommand. Returns the
/// files written.
pub fn run(cmd: &Command) -> Result<Vec<PathBuf>> {
    let common = cmd.common();
    let mut cfg = Config::from_path(&common.config)?;
    cfg.apply(&common.overrides())?;
    std::fs::create_dir_all(&cfg.run.out)?;
    let ctx = Ctx {
        prov: Provenance::from_config(&cfg),
        cfg,
        written: Vec::new(),
        export: common.export_generator,
    };
    match cmd {
        Command::Decompose(_) => decompose(ctx),
        Command::Spectrum(_) => spectrum(ctx),
        Command::Dynamics(_) => dynamics(ctx),
        Command::Scan(_) => scan(ctx),
        Command::Oracle(_) => oracle(ctx),
    }
}

struct Ctx {
    cfg: Config,
    prov: Provenance,
    written: Vec<PathBuf>,
    export: bool,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.run.out.join(name)
    }

    fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        let p = self.path(name);
        t.save(&self.prov, &p)?;
        self.written.push(p);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        let p = self.path(name);
        save_json(&self.prov, body, &p)?;
        self.written.push(p);
        Ok(())
    }

    fn truncation(&self) -> Truncation {
        Truncation {
            m_max: self.cfg.m_max(),
            l_max: self.cfg.bath.l_max,
        }
    }

    fn generator(&mut self) -> Result<crate::heom::Generator> {
        let plan = self.cfg.plan();
        let g = build_generator(
            &plan,
            self.cfg.method.kind,
            self.cfg.lattice.sites,
            self.cfg.bath.gamma,
            self.truncation(),
        )?;
        if self.export {
            let p = self.path("generator.csv");
            save_triplets(&self.prov, &g.matrix, &p)?;
            self.written.push(p);
        }
        Ok(g)
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, f)
}

fn decompose(mut ctx: Ctx) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.cfg;
    let bath = cfg.bath_params().spec(cfg.bath.gamma, cfg.lattice.detuning, cfg.bath.l_max)?;
    let convention = if cfg.method.kind == Method::RwaHeom {
        Convention::Rwa
    } else {
        Convention::FullRI
    };
    let d = bath.decompose(convention)?;
    let mut terms = Table::new(["channel", "re_xi", "im_xi", "re_chi", "im_chi"]);
    for t in &d.terms {
        terms.push(vec![t.channel.name().into(), f(t.amplitude.re), f(t.amplitude.im), f(t.rate.re), f(t.rate.im)]);
    }
    // τ = 0 is excluded: the Drude-Lorentz correlation diverges there
    let w = bath.density.width;
    let taus: Vec<f64> = (1..=50).map(|i| 5.0 / w * i as f64 / 50.0).collect();
    let mut err = Table::new(["tau", "channel", "re_fit", "im_fit", "re_quad", "im_quad", "abs_error"]);
    let mut worst: f64 = 0.0;
    let channels: Vec<Option<Channel>> = match convention {
        Convention::FullRI => vec![None],
        Convention::Rwa => vec![Some(Channel::Absorb), Some(Channel::Emit)],
    };
    for &tau in &taus {
        for ch in &channels {
            let (fit, quad) = match ch {
                None => (d.reconstruct(tau), correlation_direct(&bath, tau)?),
                Some(c) => (d.channel_value(*c, tau), channel_direct(&bath, *c, tau)?),
            };
            let e = (fit - quad).norm();
            worst = worst.max(e);
            let name = ch.map_or("total", |c| c.name());
            err.push(vec![f(tau), name.into(), f(fit.re), f(fit.im), f(quad.re), f(quad.im), f(e)]);
        }
    }
    #[derive(Serialize)]
    struct Out {
        terms: usize,
        max_abs_error: f64,
    }
    ctx.table("decompose.csv", &terms)?;
    ctx.table("decompose_error.csv", &err)?;
    ctx.json(
        "decompose.json",
        &Out {
            terms: d.terms.len(),
            max_abs_error: worst,
        },
    )?;
    Ok(ctx.written)
}

fn spectrum(mut ctx: Ctx) -> Result<Vec<PathBuf>> {
    let g = ctx.generator()?;
    let n = ctx.cfg.lattice.sites;
    let es = eigendecompose(&g, eigen_mode(ctx.cfg.run.solver, g.dim()))?;
    let y0 = g.embed(&site_state(n, ctx.cfg.initial_site(n)))?;
    let rep = classify_modes(&es, &y0)?;
    let mut order: Vec<usize> = (0..es.len()).collect();
    order.sort_by(|&a, &b| {
        es.values[b]
            .re
            .total_cmp(&es.values[a].re)
            .then(es.values[b].im.total_cmp(&es.values[a].im))
    });
    let mut t = Table::new(["mode", "re_lambda", "im_lambda", "class", "abs_c"]);
    let modes = ctx.path("modes");
    std::fs::create_dir_all(&modes)?;
    for (rank, &i) in order.iter().enumerate() {
        let v = es.values[i];
        t.push(vec![
            rank.to_string(),
            f(v.re),
            f(v.im),
            rep.classes[i].name().into(),
            f(rep.coefficients[i].norm()),
        ]);
        let m = es.reduced_mode(i);
        let mut mt = Table::new(["row", "col", "re", "im"]);
        for c in 0..n {
            for r in 0..n {
                mt.push(vec![(r + 1).to_string(), (c + 1).to_string(), f(m[(r, c)].re), f(m[(r, c)].im)]);
            }
        }
        let p = modes.join(format!("mode_{rank:04}.csv"));
        mt.save(&ctx.prov, &p)?;
        ctx.written.push(p);
    }
    ctx.table("spectrum.csv", &t)?;
    #[derive(Serialize)]
    struct Out<'a> {
        dim: usize,
        modes: usize,
        complete: bool,
        biorthogonality_residual: f64,
        cluster_condition: f64,
        report: &'a crate::spectral::ModeReport,
    }
    ctx.json(
        "spectrum.json",
        &Out {
            dim: g.dim(),
            modes: es.len(),
            complete: es.complete,
            biorthogonality_residual: es.biorthogonality_residual,
            cluster_condition: es.cluster_condition,
            report: &rep,
        },
    )?;
    Ok(ctx.written)
}

fn dynamics(mut ctx: Ctx) -> Result<Vec<PathBuf>> {
    let g = ctx.generator()?;
    let n = ctx.cfg.lattice.sites;
    let grid = uniform_grid(ctx.cfg.run.t_end, ctx.cfg.run.points);
    let traj = propagate(&g, &site_state(n, ctx.cfg.initial_site(n)), &grid, &ctx.cfg.propagate_options())?;
    let obs = observables(&traj);
    let pairs = ctx.cfg.run.coherences.clone();
    let mut cols: Vec<String> = vec!["t".into()];
    cols.extend((1..=n).map(|i| format!("rho_{i}_{i}")));
    cols.extend(pairs.iter().map(|[a, b]| format!("abs_rho_{a}_{b}")));
    cols.extend(["l1_coherence".into(), "gamma".into(), "gamma_bar".into()]);
    let mut t = Table::new(cols);
    for (k, s) in traj.states.iter().enumerate() {
        let mut row = vec![f(obs.times[k])];
        row.extend(obs.populations[k].iter().map(|&p| f(p)));
        row.extend(pairs.iter().map(|[a, b]| f(coherence(s, b - 1, a - 1).norm())));
        row.extend([f(obs.l1_coherence[k]), f(obs.gamma[k]), f(obs.gamma_bar[k])]);
        t.push(row);
    }
    ctx.table("dynamics.csv", &t)?;
    let (trace_error, hermiticity_error) = traj.invariant_errors();
    #[derive(Serialize)]
    struct Out {
        dim: usize,
        points: usize,
        trace_error: f64,
        hermiticity_error: f64,
        final_populations: Vec<f64>,
    }
    ctx.json(
        "dynamics.json",
        &Out {
            dim: g.dim(),
            points: grid.len(),
            trace_error,
            hermiticity_error,
            final_populations: obs.populations.last().cloned().unwrap_or_default(),
        },
    )?;
    Ok(ctx.written)
}

fn scan(mut ctx: Ctx) -> Result<Vec<PathBuf>> {
    let plan = ctx.cfg.plan();
    let mut res = run_scan(&plan)?;
    if ctx.cfg.run.deterministic {
        for c in &mut res.cells {
            c.wall_time = 0.0;
        }
    }
    let mut t = Table::new([
        "method", "sites", "gamma", "m_max", "l_max", "dim", "re_lambda_d", "im_lambda_d", "abs_c_d", "tau", "xi",
        "gamma_bar", "converged", "max_delta", "error",
    ]);
    let mut prof = Table::new(["method", "sites", "gamma", "site", "population"]);
    for c in &res.cells {
        let rep = c.report.as_ref();
        let hier = c.key.method != Method::Bmme;
        let conv = c.convergence.as_ref();
        let max_delta = conv.and_then(|v| {
            v.refinements
                .iter()
                .flat_map(|r| [r.tau_delta, r.lambda_delta])
                .collect::<Option<Vec<f64>>>()
                .map(|d| d.into_iter().fold(0.0, f64::max))
        });
        t.push(vec![
            c.key.method.name().into(),
            c.key.sites.to_string(),
            f(c.key.gamma),
            if hier { c.truncation.m_max.to_string() } else { String::new() },
            if hier && plan.bath.scheme == SchemeChoice::Pade {
                c.truncation.l_max.to_string()
            } else {
                String::new()
            },
            c.dim.to_string(),
            opt(rep.map(|r| r.lambda_d.re)),
            opt(rep.map(|r| r.lambda_d.im)),
            opt(rep.map(|r| r.c_d.norm())),
            opt(c.tau()),
            opt(c.xi()),
            opt(c.gamma_bar),
            conv.map_or_else(String::new, |v| v.converged.to_string()),
            opt(max_delta),
            c.error.as_deref().unwrap_or("").replace(',', ";"),
        ]);
        for (i, p) in c.profile.iter().enumerate() {
            prof.push(vec![
                c.key.method.name().into(),
                c.key.sites.to_string(),
                f(c.key.gamma),
                (i + 1).to_string(),
                f(*p),
            ]);
        }
    }
    ctx.table("scan.csv", &t)?;
    ctx.table("profiles.csv", &prof)?;
    #[derive(Serialize)]
    struct Column {
        method: Method,
        gamma: f64,
        loglog_slope: Option<f64>,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        columns: Vec<Column>,
        alignment: Vec<(f64, crate::scan::Alignment)>,
        cells: &'a [crate::scan::CellResult],
    }
    let mut columns = Vec::new();
    let mut methods = plan.methods.clone();
    methods.sort();
    methods.dedup();
    for &m in &methods {
        for &g in &plan.gammas {
            columns.push(Column {
                method: m,
                gamma: g,
                loglog_slope: loglog_slope(&res.series(m, g, |c| c.tau())),
            });
        }
    }
    let alignment = if methods.contains(&Method::Heom) && methods.contains(&Method::Bmme) {
        plan.gammas.iter().map(|&g| (g, extremum_alignment(&res, g, 1))).collect()
    } else {
        Vec::new()
    };
    ctx.json(
        "scan.json",
        &Out {
            columns,
            alignment,
            cells: &res.cells,
        },
    )?;
    Ok(ctx.written)
}

/// Fixed start: ρ22 = 0.6, ρ12 = 0.3 + 0.1i, resonant Lorentzian ω0 = Ω.
fn oracle(mut ctx: Ctx) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.cfg;
    let (gamma, w, om) = (cfg.bath.gamma, cfg.bath.width, cfg.lattice.detuning);
    let (alpha, beta) = (0.6, C64::new(0.3, 0.1));
    let lat = LatticeSpec::new(2, om, CouplingMode::Collective)?;
    let bath = crate::bath::BathSpec::new(
        crate::bath::SpectralDensity::lorentzian(gamma, w, om)?,
        0.0,
        crate::bath::Scheme::LorentzianAnalytic,
    )?;
    let m_max = cfg.m_max().max(2);
    let g = build_rwa_heom_generator(&lat, &bath.decompose(Convention::Rwa)?, &crate::heom::HeomOptions::new(m_max))?;
    let mut rho = SystemOperator::zeros(2, 2);
    rho[(0, 0)] = C64::from(1.0 - alpha);
    rho[(1, 1)] = C64::from(alpha);
    rho[(0, 1)] = beta;
    rho[(1, 0)] = beta.conj();
    let grid = uniform_grid(20.0 / w, cfg.run.points.max(401));
    let traj = propagate(&g, &rho, &grid, &cfg.propagate_options())?;
    let mut t = Table::new(["t", "rho22_closed", "rho22_heom", "re_rho12_closed", "im_rho12_closed", "re_rho12_heom", "im_rho12_heom"]);
    let mut worst: f64 = 0.0;
    for (tt, s) in grid.iter().zip(&traj.states) {
        let (p22, r12) = two_site_analytic(alpha, beta, gamma, w, om, *tt);
        worst = worst.max((s[(1, 1)].re - p22).abs()).max((s[(0, 1)] - r12).norm());
        t.push(vec![
            f(*tt),
            f(p22),
            f(s[(1, 1)].re),
            f(r12.re),
            f(r12.im),
            f(s[(0, 1)].re),
            f(s[(0, 1)].im),
        ]);
    }
    {
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), "oracle max deviation: {}", f(worst));
    }
    ctx.table("oracle.csv", &t)?;
    #[derive(Serialize)]
    struct Out {
        gamma: f64,
        width: f64,
        detuning: f64,
        m_max: usize,
        max_deviation: f64,
    }
    ctx.json(
        "oracle.json",
        &Out {
            gamma,
            width: w,
            detuning: om,
            m_max,
            max_deviation: worst,
        },
    )?;
    Ok(ctx.written)
}

#[derive(Serialize)]
struct Failure<'a> {
    command: &'a str,
    kind: &'a str,
    message: String,
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Config(_) => "config",
        Error::InvalidParameter { .. } => "invalid-parameter",
        Error::Io(_) => "io",
        Error::Integrator(_) => "integrator",
        Error::Eigen(_) | Error::Unpaired(..) | Error::IllConditioned(_) | Error::ZeroModeCount(_) => "eigen",
        _ => "computation",
    }
}

/// Entry point; returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(files) => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            for p in files {
                if writeln!(out, "{}", p.display()).is_err() {
                    break;
                }
            }
            0
        }
        Err(e) => {
            let report = Failure {
                command: cli.command.name(),
                kind: kind(&e),
                message: e.to_string(),
            };
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| e.to_string()));
            1
        }
    }
}
