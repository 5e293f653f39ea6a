//! Runs a few quick acceptance criteria through the library.

use rotor_channels::verify::{run_criterion, VerifyOptions};

fn main() {
    let opts = VerifyOptions::default();
    for id in ["3", "10", "golden"] {
        let v = run_criterion(id, &opts).expect("known criterion");
        println!("{}", v.line());
        for c in &v.checks {
            println!("    {}: {}", c.name, c.detail);
        }
    }
}
