use num_complex::Complex64 as C64;
use skinheom::bath::{BathSpec, Convention, Scheme, SpectralDensity};
use skinheom::bmme::{build_bmme_generator, MarkovRates};
use skinheom::dynamics::{
    coherence, g_function, observables, propagate, relaxation_time_from_dynamics, site_state,
    two_site_analytic, uniform_grid, Integrator, PropagateOptions,
};
use skinheom::heom::{build_heom_generator, build_rwa_heom_generator, build_unitary_generator, HeomOptions};
use skinheom::lattice::{CouplingMode, LatticeSpec, SystemOperator};
use skinheom::spectral::{classify_modes, eigendecompose, relaxation_time, steady_state, EigenMode};

fn two_site_start(alpha: f64, beta: C64) -> SystemOperator {
    let mut r = SystemOperator::zeros(2, 2);
    r[(0, 0)] = C64::from(1.0 - alpha);
    r[(1, 1)] = C64::from(alpha);
    r[(0, 1)] = beta;
    r[(1, 0)] = beta.conj();
    r
}

#[test]
fn rwa_two_site_matches_closed_form() {
    let (alpha, beta) = (0.6, C64::new(0.3, 0.1));
    for &(gamma, w, om) in &[(0.1, 1.0, 1.0), (0.6, 1.0, 1.0), (0.3, 1.0, 3.0)] {
        let lat = LatticeSpec::new(2, om, CouplingMode::Collective).unwrap();
        let bath = BathSpec::new(SpectralDensity::lorentzian(gamma, w, om).unwrap(), 0.0, Scheme::LorentzianAnalytic).unwrap();
        let d = bath.decompose(Convention::Rwa).unwrap();
        let g = build_rwa_heom_generator(&lat, &d, &HeomOptions::new(2)).unwrap();
        let grid = uniform_grid(20.0 / w, 401);
        let traj = propagate(&g, &two_site_start(alpha, beta), &grid, &PropagateOptions::default()).unwrap();
        let mut worst: f64 = 0.0;
        for (t, s) in grid.iter().zip(&traj.states) {
            let (p22, r12) = two_site_analytic(alpha, beta, gamma, w, om, *t);
            worst = worst.max((s[(1, 1)].re - p22).abs()).max((s[(0, 1)] - r12).norm());
        }
        assert!(worst < 1e-6, "(Γ,W,Ω)=({gamma},{w},{om}): deviation {worst:e}");
    }
}

#[test]
fn markovian_limit_is_log_linear() {
    let (gamma, w) = (0.01, 1.0);
    let ts: Vec<f64> = (0..200).map(|i| 5.0 / w + (10.0 / gamma - 5.0 / w) * i as f64 / 199.0).collect();
    let ys: Vec<f64> = ts.iter().map(|&t| g_function(gamma, w, 1.0, t).norm_sqr().ln()).collect();
    let n = ts.len() as f64;
    let (sx, sy) = (ts.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = ts.iter().map(|t| t * t).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| t * y).sum();
    let b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let a = (sy - b * sx) / n;
    let worst = ts.iter().zip(&ys).map(|(t, y)| (y - a - b * t).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-3, "residual {worst:e}");
}

#[test]
fn strong_coupling_shows_revivals() {
    let (gamma, w) = (2.0, 1.0);
    let ts: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
    let g: Vec<f64> = ts.iter().map(|&t| g_function(gamma, w, 1.0, t).norm()).collect();
    let first_min = (1..g.len() - 1).find(|&i| g[i] < g[i - 1] && g[i] < g[i + 1]).unwrap();
    let envelope_gone = g.iter().position(|&x| x < (-2.0f64).exp()).unwrap_or(g.len());
    assert!(first_min < envelope_gone || g[first_min] < (-2.0f64).exp());
    assert!(g[first_min + 1..].iter().any(|&x| x > g[first_min] + 1e-6));
}

#[test]
fn unitary_populations_are_frozen() {
    let lat = LatticeSpec::new(3, 1.0, CouplingMode::Collective).unwrap();
    let g = build_unitary_generator(&lat);
    let mut rho = SystemOperator::zeros(3, 3);
    rho[(0, 0)] = C64::from(0.5);
    rho[(2, 2)] = C64::from(0.5);
    rho[(0, 2)] = C64::from(0.5);
    rho[(2, 0)] = C64::from(0.5);
    let grid = uniform_grid(5.0, 11);
    let traj = propagate(&g, &rho, &grid, &PropagateOptions::default()).unwrap();
    for (t, s) in grid.iter().zip(&traj.states) {
        assert!((s[(0, 0)].re - 0.5).abs() < 1e-9);
        // ρ_13 rotates at the gap 2Ω
        let want = 0.5 * C64::new(0.0, 2.0 * t).exp();
        assert!((s[(0, 2)] - want).norm() < 1e-7);
    }
}

#[test]
fn bmme_two_site_rate_equation() {
    let lat = LatticeSpec::new(2, 1.0, CouplingMode::Collective).unwrap();
    let rates = MarkovRates { gamma_l: 0.3, gamma_r: 0.1, gamma_dep: 0.0 };
    let g = build_bmme_generator(&lat, &rates).unwrap();
    let grid = uniform_grid(15.0, 61);
    let traj = propagate(&g, &site_state(2, 1), &grid, &PropagateOptions::default()).unwrap();
    let inf = 0.1 / 0.4;
    for (t, s) in grid.iter().zip(&traj.states) {
        let want = inf + (1.0 - inf) * (-0.4 * t).exp();
        assert!((s[(1, 1)].re - want).abs() < 1e-8);
    }
    let obs = observables(&traj);
    assert!(obs.gamma_bar.iter().all(|&x| (x - 1.0).abs() < 0.01));
    assert!(obs.l1_coherence.iter().all(|&x| x < 1e-8));
}

#[test]
fn dynamic_and_spectral_relaxation_times_agree() {
    let lat = LatticeSpec::new(2, 1.0, CouplingMode::Collective).unwrap();
    let rates = MarkovRates { gamma_l: 0.3, gamma_r: 0.1, gamma_dep: 0.0 };
    let g = build_bmme_generator(&lat, &rates).unwrap();
    let es = eigendecompose(&g, EigenMode::Dense).unwrap();
    let rho0 = site_state(2, 1);
    let rep = classify_modes(&es, &g.embed(&rho0).unwrap()).unwrap();
    assert!((rep.lambda_d.re + 0.4).abs() < 1e-10);
    let tau = relaxation_time(rep.lambda_d, rep.c_d).unwrap().tau;
    let ss = steady_state(&es).unwrap();
    let traj = propagate(&g, &rho0, &uniform_grid(40.0, 40_001), &PropagateOptions::default()).unwrap();
    // ‖ρ − ρ_ss‖₁ = √2|c_d|e^{−(γL+γR)t}, which equals √2/e at τ
    let thr = std::f64::consts::SQRT_2 * (-1.0f64).exp();
    let t_dyn = relaxation_time_from_dynamics(&traj, &ss, thr).unwrap();
    assert!((t_dyn / tau - 1.0).abs() < 0.2, "{t_dyn} vs {tau}");
    let later = relaxation_time_from_dynamics(&traj, &ss, thr / 10.0).unwrap();
    assert!(later > t_dyn);
    assert!(relaxation_time_from_dynamics(&traj, &ss, 1e-30).is_err());
}

#[test]
fn full_heom_parity_selection_rule() {
    let lat = LatticeSpec::new(4, 1.0, CouplingMode::Collective).unwrap();
    let bath = BathSpec::new(SpectralDensity::drude_lorentz(0.5, 1.0).unwrap(), 1.44, Scheme::Pade { l_max: 2 }).unwrap();
    let d = bath.decompose(Convention::FullRI).unwrap();
    let g = build_heom_generator(&lat, &d, &HeomOptions::new(3)).unwrap();
    let traj = propagate(&g, &site_state(4, 3), &uniform_grid(20.0, 201), &PropagateOptions::default()).unwrap();
    let (tr, herm) = traj.invariant_errors();
    assert!(tr < 1e-8 && herm < 1e-8);
    let mut next: f64 = 0.0;
    let mut adjacent: f64 = 0.0;
    for s in &traj.states {
        next = next.max(coherence(s, 0, 2).norm());
        for n in 0..3 {
            adjacent = adjacent.max(coherence(s, n, n + 1).norm());
        }
        for n in 0..4 {
            for m in 0..4 {
                if (n + m) % 2 == 1 {
                    assert!(s[(n, m)].norm() < 1e-8);
                }
            }
        }
    }
    assert!(next > 1e-3, "|ρ13| max {next:e}");
    assert!(adjacent < 1e-8);
}

#[test]
fn rwa_stays_diagonal() {
    let lat = LatticeSpec::new(4, 1.0, CouplingMode::Collective).unwrap();
    let bath = BathSpec::new(SpectralDensity::lorentzian(0.5, 1.0, 1.0).unwrap(), 0.0, Scheme::LorentzianAnalytic).unwrap();
    let d = bath.decompose(Convention::Rwa).unwrap();
    let g = build_rwa_heom_generator(&lat, &d, &HeomOptions::new(3)).unwrap();
    let traj = propagate(&g, &site_state(4, 3), &uniform_grid(20.0, 101), &PropagateOptions::default()).unwrap();
    let obs = observables(&traj);
    assert!(obs.l1_coherence.iter().all(|&c| c < 1e-8));
    // T = 0: everything ends on the bottom site
    let last = traj.states.last().unwrap();
    assert!(last[(0, 0)].re > 0.9);
}

#[test]
fn bdf2_tracks_dormand_prince() {
    let lat = LatticeSpec::new(3, 1.0, CouplingMode::Collective).unwrap();
    let bath = BathSpec::new(SpectralDensity::drude_lorentz(0.3, 1.0).unwrap(), 1.0, Scheme::Pade { l_max: 2 }).unwrap();
    let d = bath.decompose(Convention::FullRI).unwrap();
    let g = build_heom_generator(&lat, &d, &HeomOptions::new(2)).unwrap();
    let grid = uniform_grid(5.0, 11);
    let a = propagate(&g, &site_state(3, 2), &grid, &PropagateOptions::default()).unwrap();
    let opts = PropagateOptions { integrator: Integrator::Bdf2 { step: 1e-3 }, ..Default::default() };
    let b = propagate(&g, &site_state(3, 2), &grid, &opts).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        assert!((x - y).norm_max() < 1e-4);
    }
}

#[test]
fn rejects_unphysical_initial_state() {
    let lat = LatticeSpec::new(2, 1.0, CouplingMode::Collective).unwrap();
    let g = build_unitary_generator(&lat);
    let bad = two_site_start(0.5, C64::from(0.9));
    assert!(propagate(&g, &bad, &[0.0, 1.0], &PropagateOptions::default()).is_err());
}
