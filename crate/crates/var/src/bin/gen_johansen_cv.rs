//! Regenerate the embedded Johansen trace critical values.
//!
//! Usage: `gen_johansen_cv [--reps N] [--grid G] [--seed S] [--out DIR]`
//! Defaults reproduce the shipped table byte for byte.

use std::path::PathBuf;
use std::time::Instant;

fn main() {
    let mut reps: u32 = 100_000;
    let mut grid: usize = 1000;
    let mut seed: u64 = 20_260_815;
    let mut out = PathBuf::from("crates/var/tables");
    let mut args = std::env::args().skip(1);
    while let Some(flag) = args.next() {
        let value = args.next().unwrap_or_else(|| {
            eprintln!("missing value for {flag}");
            std::process::exit(2);
        });
        match flag.as_str() {
            "--reps" => reps = value.parse().expect("--reps expects an integer"),
            "--grid" => grid = value.parse().expect("--grid expects an integer"),
            "--seed" => seed = value.parse().expect("--seed expects an integer"),
            "--out" => out = PathBuf::from(value),
            other => {
                eprintln!("unknown flag {other}");
                std::process::exit(2);
            }
        }
    }
    let started = Instant::now();
    println!("simulating trace critical values: reps={reps} grid={grid} seed={seed}");
    if let Err(e) = boombust_var::tablegen::write_tables(&out, reps, grid, seed) {
        eprintln!("table generation failed: {e}");
        std::process::exit(1);
    }
    println!("done in {:.1}s -> {}", started.elapsed().as_secs_f64(), out.display());
}
