use num_complex::Complex64 as C64;
use skinheom::bath::{BathSpec, Convention, Scheme, SpectralDensity};
use skinheom::heom::{build_heom_generator, build_rwa_heom_generator, HeomOptions, Normalization};
use skinheom::lattice::{CouplingMode, LatticeSpec};
use skinheom::spectral::{eigendecompose, EigenMode};

fn lorentzian_bath(gamma: f64, width: f64, center: f64) -> BathSpec {
    BathSpec::new(
        SpectralDensity::lorentzian(gamma, width, center).unwrap(),
        0.0,
        Scheme::LorentzianAnalytic,
    )
    .unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn two_site_population_block_matches_closed_form() {
    let (gamma, w, w0, om) = (0.3, 1.2, 0.7, 1.1);
    let lat = LatticeSpec::new(2, om, CouplingMode::Collective).unwrap();
    let d = lorentzian_bath(gamma, w, w0).decompose(Convention::Rwa).unwrap();
    let mut opts = HeomOptions::new(2);
    opts.normalization = Normalization::Bare;
    let g = build_rwa_heom_generator(&lat, &d, &opts).unwrap();
    assert_eq!(g.dim(), 24);

    // ADO order (absorb, emit): 00 01 02 10 11 20; local index i + 2j
    let ado = |occ: [u16; 2]| g.ados.as_ref().unwrap().index_of(&occ).unwrap();
    let pos = |a: usize, i: usize, j: usize| 4 * a + i + 2 * j;
    let idx = [
        pos(ado([0, 0]), 0, 0),
        pos(ado([0, 0]), 1, 1),
        pos(ado([1, 0]), 1, 0),
        pos(ado([0, 1]), 0, 1),
        pos(ado([1, 1]), 0, 0),
        pos(ado([1, 1]), 1, 1),
    ];
    let h = w * gamma / 2.0;
    let z = c(0.0, 0.0);
    let want = [
        [z, z, c(0.0, -1.0), c(0.0, 1.0), z, z],
        [z, z, c(0.0, 1.0), c(0.0, -1.0), z, z],
        [z, c(0.0, h), c(-w, w0 - om), z, c(0.0, -1.0), c(0.0, 1.0)],
        [z, c(0.0, -h), z, c(-w, om - w0), c(0.0, 1.0), c(0.0, -1.0)],
        [z, z, c(0.0, -h), c(0.0, h), c(-2.0 * w, 0.0), z],
        [z, z, z, z, z, c(-2.0 * w, 0.0)],
    ];
    for (r, row) in want.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let got = g.matrix.get(idx[r], idx[k]);
            assert!((got - v).norm() < 1e-14, "entry ({r},{k}): {got} vs {v}");
        }
    }
}

fn trace_columns_vanish(g: &skinheom::heom::Generator) -> f64 {
    let n = g.sites;
    let mut worst: f64 = 0.0;
    for col in 0..g.dim() {
        let s: C64 = (0..n).map(|i| g.matrix.get(i + n * i, col)).sum();
        worst = worst.max(s.norm());
    }
    worst
}

#[test]
fn physical_trace_is_conserved() {
    let lat = LatticeSpec::new(3, 1.0, CouplingMode::Collective).unwrap();
    let pade = BathSpec::new(SpectralDensity::drude_lorentz(0.4, 1.0).unwrap(), 1.0, Scheme::Pade { l_max: 2 }).unwrap();
    let d = pade.decompose(Convention::FullRI).unwrap();
    let g = build_heom_generator(&lat, &d, &HeomOptions::new(2)).unwrap();
    assert!(trace_columns_vanish(&g) < 1e-13);

    let r = lorentzian_bath(0.5, 1.0, 1.0).decompose(Convention::Rwa).unwrap();
    let g = build_rwa_heom_generator(&lat, &r, &HeomOptions::new(3)).unwrap();
    assert!(trace_columns_vanish(&g) < 1e-13);
}

#[test]
fn normalization_preserves_spectrum() {
    let lat = LatticeSpec::new(2, 1.0, CouplingMode::Collective).unwrap();
    let d = lorentzian_bath(0.6, 1.0, 1.0).decompose(Convention::FullRI).unwrap();
    let mut spectra = Vec::new();
    for norm in [Normalization::Bare, Normalization::Scaled] {
        let mut opts = HeomOptions::new(2);
        opts.normalization = norm;
        opts.merge_real_imag = false;
        let g = build_heom_generator(&lat, &d, &opts).unwrap();
        let es = eigendecompose(&g, EigenMode::Dense).unwrap();
        spectra.push(es.values.clone());
    }
    for a in &spectra[0] {
        let d = spectra[1].iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-8, "{a} unmatched ({d:e})");
    }
}

#[test]
fn merged_slots_shrink_the_hierarchy() {
    let lat = LatticeSpec::new(2, 1.0, CouplingMode::Collective).unwrap();
    let d = BathSpec::new(SpectralDensity::drude_lorentz(0.4, 1.0).unwrap(), 1.0, Scheme::Pade { l_max: 3 })
        .unwrap()
        .decompose(Convention::FullRI)
        .unwrap();
    let mut opts = HeomOptions::new(2);
    let merged = build_heom_generator(&lat, &d, &opts).unwrap();
    opts.merge_real_imag = false;
    let split = build_heom_generator(&lat, &d, &opts).unwrap();
    // 3 slots vs 4 slots at depth 2
    assert_eq!(merged.ado_count, 10);
    assert_eq!(split.ado_count, 15);
}

#[test]
fn separate_mode_replicates_slots_per_bond() {
    let lat = LatticeSpec::new(3, 1.0, CouplingMode::Separate).unwrap();
    let d = lorentzian_bath(0.5, 1.0, 1.0).decompose(Convention::Rwa).unwrap();
    let g = build_rwa_heom_generator(&lat, &d, &HeomOptions::new(1)).unwrap();
    // 2 bonds × 2 channels = 4 slots, depth 1
    assert_eq!(g.ado_count, 5);
    assert!(trace_columns_vanish(&g) < 1e-13);
}

#[test]
fn wrong_convention_is_rejected() {
    let lat = LatticeSpec::new(2, 1.0, CouplingMode::Collective).unwrap();
    let b = lorentzian_bath(0.5, 1.0, 1.0);
    let rwa = b.decompose(Convention::Rwa).unwrap();
    let full = b.decompose(Convention::FullRI).unwrap();
    assert!(build_heom_generator(&lat, &rwa, &HeomOptions::new(1)).is_err());
    assert!(build_rwa_heom_generator(&lat, &full, &HeomOptions::new(1)).is_err());
}
