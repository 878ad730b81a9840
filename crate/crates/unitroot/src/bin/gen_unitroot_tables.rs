//! Regenerate the embedded ADF/KPSS critical-value tables.
//!
//! Usage: `gen_unitroot_tables [--reps N] [--seed S] [--out DIR]`
//! Defaults reproduce the shipped tables byte for byte.

use std::path::PathBuf;
use std::time::Instant;

fn main() {
    let mut reps: u32 = 100_000;
    let mut seed: u64 = 20_260_815;
    let mut out = PathBuf::from("crates/unitroot/tables");
    let mut args = std::env::args().skip(1);
    while let Some(flag) = args.next() {
        let value = args.next().unwrap_or_else(|| {
            eprintln!("missing value for {flag}");
            std::process::exit(2);
        });
        match flag.as_str() {
            "--reps" => reps = value.parse().expect("--reps expects an integer"),
            "--seed" => seed = value.parse().expect("--seed expects an integer"),
            "--out" => out = PathBuf::from(value),
            other => {
                eprintln!("unknown flag {other}");
                std::process::exit(2);
            }
        }
    }
    let started = Instant::now();
    println!("generating embedded tables: reps={reps} seed={seed} out={}", out.display());
    if let Err(e) = boombust_unitroot::tablegen::write_tables(&out, reps, seed) {
        eprintln!("table generation failed: {e}");
        std::process::exit(1);
    }
    println!("done in {:.1}s", started.elapsed().as_secs_f64());
}
