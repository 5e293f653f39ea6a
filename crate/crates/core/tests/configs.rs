use rotor_channels::harness::RunConfig;

#[test]
fn shipped_configs_parse_and_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::load(Some(&path), &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let back = RunConfig::from_toml_str(&cfg.to_toml_string(), &[]).unwrap();
        assert_eq!(back, cfg, "{}", path.display());
        count += 1;
    }
    assert!(count >= 8);
}

#[test]
fn overrides_take_precedence_over_the_file() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/leading_quantum.toml");
    let cfg = RunConfig::load(Some(&dir), &["system.b=0.5".into(), "solver.backend=\"krylov\"".into()]).unwrap();
    assert_eq!(cfg.system.b, 0.5);
    assert_eq!(cfg.system.n, 60);
    assert_eq!(cfg.solver.backend, rotor_channels::spectral::sweep::Backend::Krylov);
}
