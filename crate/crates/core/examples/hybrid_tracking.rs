//! Four crossing targets tracked by sampling MTDA assignments each scan.
//!
//! `cargo run --release --example hybrid_tracking [shots] [sweeps]`

use dqa_track::experiments::{track, BackendConfig, TrackConfig};
use dqa_track::sampler::SurrogateParams;

pub fn run_example_with(n_shots: usize, sweeps: usize) -> dqa_track::Result<()> {
    let cfg = TrackConfig {
        n_shots,
        backend: BackendConfig::Surrogate {
            params: SurrogateParams {
                n_temperatures: 8,
                sweeps,
                ..Default::default()
            },
        },
        ..Default::default()
    };
    let run = track(&cfg)?;
    println!("scan  meas  hyps  top weights                  rmse");
    for (step, (_, rmse)) in run.steps.iter().zip(&run.rmse) {
        let top: Vec<String> = step.hypotheses.iter().take(3).map(|h| format!("{:.4}", h.weight)).collect();
        println!(
            "{:>4}  {:>4}  {:>4}  {:<27}  {:>6.1}",
            step.time_index,
            step.costs.n_measurements(),
            step.hypotheses.len(),
            top.join(" "),
            rmse
        );
    }
    Ok(())
}

pub fn run_example() -> dqa_track::Result<()> {
    run_example_with(200, 10)
}

#[allow(dead_code)]
fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run_example_with(args.first().copied().unwrap_or(10_000), args.get(1).copied().unwrap_or(30))
        .expect("example failed");
}
