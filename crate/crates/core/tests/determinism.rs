use std::path::{Path, PathBuf};
use std::process::Command;

fn run(args: &[&str]) -> PathBuf {
    let out = Command::new(env!("CARGO_BIN_EXE_rotor-channels")).args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    PathBuf::from(String::from_utf8_lossy(&out.stdout).lines().last().unwrap().trim())
}

fn bytes(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn identical_config_gives_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = |d: &Path| {
        vec![
            "modes".to_string(),
            "--out".into(),
            d.to_str().unwrap().into(),
            "--set".into(),
            "system.N=12".into(),
            "--set".into(),
            "grid.G=24".into(),
            "--set".into(),
            "task.ftse_companion=true".into(),
            "--seed".into(),
            "11".into(),
        ]
    };
    let ra = run(&args(a.path()).iter().map(String::as_str).collect::<Vec<_>>());
    let rb = run(&args(b.path()).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(ra.file_name(), rb.file_name(), "run ids agree");
    for f in ["mode_000.pgm", "mode_001.pgm", "ftse.pgm", "mode_001.pgm.json", "modes.json"] {
        assert_eq!(bytes(&ra.join(f)), bytes(&rb.join(f)), "{f}");
    }
    // Index 0 is the trivial mode: a uniform raster.
    let raw = bytes(&ra.join("mode_000.pgm"));
    let px = &raw[raw.len() - 2 * 24 * 24..];
    assert!(px.chunks(2).all(|p| p == &px[..2]));

    let sa = run(&["spectrum", "--out", a.path().to_str().unwrap(), "--set", "system.kind=\"classical\"", "--set", "system.M=6"]);
    let sb = run(&["spectrum", "--out", b.path().to_str().unwrap(), "--set", "system.kind=\"classical\"", "--set", "system.M=6"]);
    assert_eq!(bytes(&sa.join("eigenvalues.csv")), bytes(&sb.join("eigenvalues.csv")));
}

#[test]
fn interrupted_sweep_resumes_to_the_same_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sweep = |d: &Path| {
        run(&[
            "sweep",
            "--out",
            d.to_str().unwrap(),
            "--set",
            "system.kind=\"classical\"",
            "--set",
            "system.M=8",
            "--set",
            "system.b=0.5",
            "--set",
            "task.alphas=[2.0, 0.0, 1.0, 3.0]",
            "--set",
            "solver.backend=krylov",
        ])
    };
    let full = sweep(a.path());
    let reference = bytes(&full.join("sweep.csv"));
    let text = String::from_utf8(reference.clone()).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("0.0,0.938469807"), "{text}");
    let alphas: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(alphas, ["0.0", "1.0", "2.0", "3.0"]);

    let part = sweep(b.path());
    let rows = part.join("rows.jsonl");
    let log = std::fs::read_to_string(&rows).unwrap();
    let kept = log.lines().next().unwrap();
    // One completed row and a torn second line, as after a kill mid-write.
    std::fs::write(&rows, format!("{kept}\n{}", &log.lines().nth(1).unwrap()[..10])).unwrap();
    std::fs::remove_file(part.join("sweep.csv")).unwrap();
    let again = sweep(b.path());
    assert_eq!(again, part);
    assert_eq!(bytes(&again.join("sweep.csv")), reference);
    assert_eq!(std::fs::read_to_string(&rows).unwrap().lines().count(), 4);
}
