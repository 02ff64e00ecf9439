//! Reverse anneal from the diagonal rook placement with a pause at s_p,
//! counting unique feasible states per pause point.

use dqa_track::experiments::{cmd_pause_sweep, PauseSweepConfig};

pub fn run_example() -> dqa_track::Result<()> {
    let cfg = PauseSweepConfig {
        shots_per_point: 1000,
        ..Default::default()
    };
    for file in cmd_pause_sweep(&cfg)? {
        print!("{}", file.contents);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
