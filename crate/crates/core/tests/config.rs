use skinheom::config::{Config, Overrides};
use skinheom::scan::{Method, Solver};

#[test]
fn minimal_config_takes_documented_defaults() {
    let cfg = Config::parse("[lattice]\nsites = 2\n").unwrap();
    assert_eq!(cfg.lattice.sites, 2);
    assert_eq!(cfg.lattice.detuning, 1.0);
    assert_eq!(cfg.bath.gamma, 0.5);
    assert_eq!(cfg.bath.width, 1.0);
    assert_eq!(cfg.bath.temperature, 1.44);
    assert_eq!(cfg.bath.l_max, 2);
    assert_eq!(cfg.method.kind, Method::Heom);
    assert_eq!(cfg.m_max(), 2);
    assert_eq!(cfg.run.rtol, 1e-8);
    assert_eq!(cfg.run.atol, 1e-10);
    assert_eq!(cfg.run.solver, Solver::Auto);
    assert!(cfg.run.deterministic);
    assert_eq!(cfg.initial_site(2), 1);
    // defaults are echoed explicitly
    let echoed = cfg.to_toml();
    for key in ["temperature = 1.44", "scheme = \"pade\"", "rate_multiplier = 1.0", "rtol = "] {
        assert!(echoed.contains(key), "{key} missing from\n{echoed}");
    }
}

#[test]
fn zero_temperature_needs_the_analytic_scheme() {
    let e = Config::parse("[lattice]\nsites = 2\n[bath]\ntemperature = 0.0\nscheme = \"pade\"\n")
        .unwrap_err()
        .to_string();
    assert!(e.contains("bath.temperature") && e.contains("bath.scheme"), "{e}");
    let ok = "[lattice]\nsites = 2\n[bath]\nkind = \"lorentzian\"\ntemperature = 0.0\nscheme = \"lorentzian-analytic\"\n\
              [method]\nkind = \"rwa-heom\"\n";
    Config::parse(ok).unwrap();
}

#[test]
fn unknown_keys_are_rejected_everywhere() {
    for text in [
        "[lattice]\nsites = 2\nsitez = 3\n",
        "[lattice]\nsites = 2\n[bath]\ngama = 0.1\n",
        "[lattice]\nsites = 2\n[run]\nrtoll = 1e-6\n",
        "[lattice]\nsites = 2\n[extra]\nx = 1\n",
        "[lattice]\nsites = 2\n[scan]\nsites = [2]\ngammas = [0.1]\nthread = 2\n",
    ] {
        assert!(Config::parse(text).is_err(), "{text}");
    }
}

#[test]
fn figure_one_block_round_trips() {
    let text = "[lattice]\nsites = 10\ndetuning = 1.0\n\
                [bath]\nkind = \"drude-lorentz\"\ngamma = 0.5\nwidth = 1.0\ntemperature = 1.44\nl_max = 20\n\
                [method]\nm_max = 4\n[run]\nfull_scale = true\n";
    let cfg = Config::parse(text).unwrap();
    let again = Config::parse(&cfg.to_toml()).unwrap();
    assert_eq!(cfg, again);
    assert_eq!(again.bath.temperature, 1.44);
    assert_eq!(again.bath.width, 1.0);
    assert_eq!(cfg.hash(), again.hash());
    // the same block is refused without the full-scale gate
    assert!(Config::parse(&text.replace("full_scale = true", "full_scale = false")).is_err());
}

#[test]
fn bmme_ignores_m_max() {
    let cfg = Config::parse("[lattice]\nsites = 3\n[method]\nkind = \"bmme\"\nm_max = 7\n").unwrap();
    assert_eq!(cfg.notes(), vec!["method.m_max is ignored by bmme".to_string()]);
}

#[test]
fn cross_field_errors_name_their_fields() {
    let cases = [
        ("[lattice]\nsites = 1\n", "lattice.sites"),
        ("[lattice]\nsites = 2\n[bath]\nkind = \"lorentzian\"\n", "bath.kind"),
        ("[lattice]\nsites = 2\n[method]\nkind = \"rwa-heom\"\n", "method.kind"),
        ("[lattice]\nsites = 3\n[run]\ninitial_site = 4\n", "run.initial_site"),
        ("[lattice]\nsites = 3\n[run]\ncoherences = [[1, 1]]\n", "run.coherences"),
        ("[lattice]\nsites = 2\n[scan]\nsites = [2]\ngammas = [0.1, 0.2, 0.3]\nm_max = [1, 2]\n", "scan.m_max"),
    ];
    for (text, field) in cases {
        let e = Config::parse(text).unwrap_err().to_string();
        assert!(e.contains(field), "{field}: {e}");
    }
}

#[test]
fn overrides_are_validated_and_hashed() {
    let mut cfg = Config::parse("[lattice]\nsites = 3\n").unwrap();
    let h0 = cfg.hash();
    cfg.apply(&Overrides { m_max: Some(3), ..Default::default() }).unwrap();
    assert_eq!(cfg.m_max(), 3);
    assert_ne!(cfg.hash(), h0);
    let h1 = cfg.hash();
    cfg.apply(&Overrides { out: Some("elsewhere".into()), ..Default::default() }).unwrap();
    assert_eq!(cfg.hash(), h1);
    assert!(cfg.apply(&Overrides { m_max: Some(9), ..Default::default() }).is_err());
}

#[test]
fn scan_table_builds_a_plan() {
    let cfg = Config::parse(
        "[lattice]\nsites = 2\n[scan]\nmethods = [\"bmme\", \"heom\"]\nsites = [2, 3]\ngammas = [0.05, 0.5]\nm_max = [2, 3]\n",
    )
    .unwrap();
    let plan = cfg.plan();
    assert_eq!(plan.cells().len(), 8);
    assert_eq!(plan.truncation(1).m_max, 3);
    assert_eq!(plan.truncation(0).l_max, 2);
}
