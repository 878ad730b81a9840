//! Offline calibration of sequential-monitoring threshold tables.
//!
//! Calibrates the per-`t` thresholds for one target average run length,
//! optionally adjusts the extrapolated tail against a measured ARL, and
//! writes the table (with provenance metadata) as JSON.

use std::path::PathBuf;

use clap::Parser;

use boombust_changepoint::{measure_arl_null, CpmConfig, ThresholdTable};

#[derive(Parser, Debug)]
#[command(about = "Calibrate sequential KS monitoring thresholds")]
struct Args {
    /// Target average run length (100, 500, 1000, or 5000).
    #[arg(long)]
    arl0: u32,
    /// Startup window before monitoring begins.
    #[arg(long, default_value_t = 20)]
    burn_in: u32,
    /// Number of null streams for calibration.
    #[arg(long)]
    reps: u32,
    /// Master seed for calibration streams.
    #[arg(long)]
    seed: u64,
    /// Table horizon.
    #[arg(long, default_value_t = 10_000)]
    horizon: u32,
    /// Streams for the average-run-length measurement (0 disables).
    #[arg(long, default_value_t = 0)]
    tune_streams: u32,
    /// Maximum tail-shift bisection rounds when the measured ARL is off.
    #[arg(long, default_value_t = 4)]
    tune_rounds: u32,
    /// Run-length cap during measurement.
    #[arg(long, default_value_t = 10_000)]
    cap: u32,
    /// Output JSON path.
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let args = Args::parse();
    let config = CpmConfig::new(args.arl0, args.burn_in).expect("valid config");
    let note = format!(
        "gen_thresholds --arl0 {} --burn-in {} --reps {} --seed {} --horizon {}",
        args.arl0, args.burn_in, args.reps, args.seed, args.horizon
    );

    eprintln!("calibrating arl0={} reps={} ...", args.arl0, args.reps);
    let start = std::time::Instant::now();
    let mut table = boombust_changepoint::calibrate_with_note(
        &config,
        args.reps,
        args.seed,
        args.horizon,
        0.0,
        note.clone(),
    )
    .expect("calibration");
    eprintln!(
        "calibrated to t={} in {:.1}s (tail a={:.4} b={:.4})",
        table.exact_until,
        start.elapsed().as_secs_f64(),
        table.tail.a,
        table.tail.b
    );

    if args.tune_streams > 0 {
        let target = args.burn_in as f64 + args.arl0 as f64;
        let mut shift = 0.0f64;
        let measure_seed = args.seed ^ 0x5eed_a51d;
        let mut arl = measure_arl_null(&table, args.tune_streams, measure_seed, args.cap as usize);
        eprintln!("measured ARL {arl:.1} (target {target:.0})");
        if (arl - target).abs() > 0.05 * args.arl0 as f64 {
            // Bisect a constant shift on the extrapolated tail. ARL grows
            // with the shift.
            let (mut lo, mut hi) = (-0.20f64, 0.30f64);
            for round in 0..args.tune_rounds {
                shift = 0.5 * (lo + hi);
                table = boombust_changepoint::with_tail_shift(&table, shift)
                    .expect("tail rebuild");
                arl = measure_arl_null(&table, args.tune_streams, measure_seed, args.cap as usize);
                eprintln!("round {round}: shift {shift:+.4} -> ARL {arl:.1}");
                if (arl - target).abs() <= 0.05 * args.arl0 as f64 {
                    break;
                }
                if arl < target {
                    lo = shift;
                } else {
                    hi = shift;
                }
            }
        }
        // Record a fresh-seed measurement as provenance.
        let final_arl =
            measure_arl_null(&table, args.tune_streams, measure_seed ^ 0xff, args.cap as usize);
        eprintln!("final ARL {final_arl:.1} at shift {shift:+.4}");
        table = ThresholdTable::from_parts(
            table.arl0,
            table.burn_in,
            table.horizon,
            table.thresholds().to_vec(),
            table.reps,
            table.seed,
            table.exact_until,
            table.tail,
            Some(final_arl),
            table.note.clone(),
        )
        .expect("rebuild with measurement");
    }

    std::fs::write(&args.out, table.to_json()).expect("write table");
    eprintln!("wrote {}", args.out.display());
}
