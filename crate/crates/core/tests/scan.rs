use skinheom::bath::DensityKind;
use skinheom::scan::{
    extremum_alignment, loglog_slope, run_scan, run_scan_with, BathParams, Execution, Method, Requested, ScanPlan,
    SchemeChoice, Solver, Truncation,
};

fn drude(temperature: f64) -> BathParams {
    BathParams {
        kind: DensityKind::DrudeLorentz,
        width: 1.0,
        center: None,
        temperature,
        scheme: SchemeChoice::Pade,
    }
}

fn lorentzian() -> BathParams {
    BathParams {
        kind: DensityKind::Lorentzian,
        width: 1.0,
        center: None,
        temperature: 0.0,
        scheme: SchemeChoice::LorentzianAnalytic,
    }
}

#[test]
fn bmme_relaxation_matches_rate_equation() {
    // n(Ω) = 1 puts γL/γR at 2
    let plan = ScanPlan::new(vec![Method::Bmme], (5..=15).collect(), vec![0.05], drude(1.0 / 2f64.ln()));
    let res = run_scan(&plan).unwrap();
    assert_eq!(res.failures().count(), 0);
    let taus = res.series(Method::Bmme, 0.05, |c| c.tau());
    // classical biased-walk rate matrix, diagonalized independently
    let want = [
        (5, 18.052793830760635),
        (6, 24.986458782640543),
        (7, 32.70354129436269),
        (15, 114.0266708382775),
    ];
    for (n, t) in want {
        let got = taus.iter().find(|p| p.0 == n).unwrap().1;
        assert!((got / t - 1.0).abs() < 1e-9, "N = {n}: {got} vs {t}");
    }
    // finite-size gap convergence keeps the local exponent above 1 here
    let slope = loglog_slope(&taus).unwrap();
    assert!((slope - 1.672804220643118).abs() < 1e-6, "slope {slope}");
}

#[test]
fn cells_are_ordered_and_execution_independent() {
    let mut plan = ScanPlan::new(vec![Method::Bmme, Method::Heom], vec![3, 2], vec![0.5, 0.1], drude(1.44));
    plan.truncations = vec![Truncation { m_max: 2, l_max: 2 }];
    let a = run_scan_with(&plan, Execution::Parallel).unwrap();
    let b = run_scan_with(&plan, Execution::Sequential).unwrap();
    let keys: Vec<_> = a.cells.iter().map(|c| (c.key.method, c.key.sites, c.key.gamma)).collect();
    assert_eq!(
        keys,
        vec![
            (Method::Heom, 2, 0.1),
            (Method::Heom, 2, 0.5),
            (Method::Heom, 3, 0.1),
            (Method::Heom, 3, 0.5),
            (Method::Bmme, 2, 0.1),
            (Method::Bmme, 2, 0.5),
            (Method::Bmme, 3, 0.1),
            (Method::Bmme, 3, 0.5),
        ]
    );
    for (x, y) in a.cells.iter().zip(&b.cells) {
        assert_eq!(x.tau(), y.tau());
        assert_eq!(x.profile, y.profile);
    }
}

#[test]
fn failing_cells_do_not_stop_the_scan() {
    // RWA needs a zero-temperature Lorentzian; the Drude bath is rejected per cell
    let plan = ScanPlan::new(vec![Method::RwaHeom, Method::Bmme], vec![2, 3], vec![0.2], drude(1.0));
    let res = run_scan(&plan).unwrap();
    assert_eq!(res.cells.len(), 4);
    assert_eq!(res.failures().count(), 2);
    assert!(res.failures().all(|c| c.key.method == Method::RwaHeom));
    assert!(res.get(Method::Bmme, 3, 0.2).unwrap().tau().is_some());
}

#[test]
fn rwa_two_site_hierarchy_closes_at_tier_two() {
    let mut plan = ScanPlan::new(vec![Method::RwaHeom], vec![2], vec![0.3], lorentzian());
    plan.requested = Requested { profile: true, gamma_bar: false, convergence: true };
    let res = run_scan(&plan).unwrap();
    let conv = res.cells[0].convergence.as_ref().unwrap();
    assert_eq!(conv.refinements.len(), 1);
    assert!(conv.refinements[0].tau_delta.unwrap() < 1e-8);
    assert!(conv.refinements[0].lambda_delta.unwrap() < 1e-8);
    assert!(conv.converged);
}

#[test]
fn weak_coupling_is_converged_in_m() {
    let mut plan = ScanPlan::new(vec![Method::Heom], vec![4], vec![0.05], drude(1.44));
    plan.requested.convergence = true;
    let res = run_scan(&plan).unwrap();
    let conv = res.cells[0].convergence.as_ref().unwrap();
    assert!(conv.converged);
    assert!(conv.refinements[0].tau_delta.unwrap() < 0.01);
    assert!(conv.refinements[0].lambda_delta.unwrap() < 0.01);
}

#[test]
fn m_sensitivity_shrinks_with_depth_at_strong_coupling() {
    // m_max = 1 has a growing mode and tiers 2-3 are pre-asymptotic
    let deltas: Vec<f64> = (4..=7)
        .map(|m| {
            let mut plan = ScanPlan::new(vec![Method::Heom], vec![4], vec![1.5], drude(1.44));
            plan.truncations = vec![Truncation { m_max: m, l_max: 2 }];
            plan.full_scale = m > 3;
            plan.requested.convergence = true;
            let res = run_scan(&plan).unwrap();
            res.cells[0].convergence.as_ref().unwrap().refinements[0].lambda_delta.unwrap()
        })
        .collect();
    println!("{deltas:?}");
    assert!(deltas.windows(2).all(|w| w[1] < w[0]), "{deltas:?}");
}

#[test]
fn heom_is_slower_than_bmme_and_thicker_skinned() {
    let mut plan = ScanPlan::new(vec![Method::Heom, Method::Bmme], vec![6], vec![1.0], drude(1.44));
    plan.truncations = vec![Truncation { m_max: 2, l_max: 2 }];
    let res = run_scan(&plan).unwrap();
    let h = res.get(Method::Heom, 6, 1.0).unwrap();
    let b = res.get(Method::Bmme, 6, 1.0).unwrap();
    println!("{:?} {:?}", h.profile, b.profile);
    assert!(h.tau().unwrap() > b.tau().unwrap());
    assert!(h.profile[1] > b.profile[1]);
}

#[test]
fn desk_scale_is_gated() {
    let mut plan = ScanPlan::new(vec![Method::Heom], vec![12], vec![0.5], drude(1.44));
    assert!(run_scan(&plan).is_err());
    plan.sites = vec![4];
    plan.truncations = vec![Truncation { m_max: 8, l_max: 2 }];
    assert!(run_scan(&plan).is_err());
    plan.full_scale = true;
    plan.truncations = vec![Truncation { m_max: 4, l_max: 2 }];
    plan.solver = Solver::Iterative;
    assert!(run_scan(&plan).is_ok());
}

#[test]
fn alignment_needs_both_series() {
    let mut plan = ScanPlan::new(vec![Method::Heom, Method::Bmme], vec![2, 3, 4], vec![0.5], drude(1.44));
    plan.requested.gamma_bar = true;
    let res = run_scan(&plan).unwrap();
    assert!(res.cells.iter().filter(|c| c.key.method == Method::Heom).all(|c| c.gamma_bar.is_some()));
    let al = extremum_alignment(&res, 0.5, 1);
    assert!(al.matched <= al.delta_tau.len());
}
