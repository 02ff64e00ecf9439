//! Forward-anneal sweep over t_f for biased 3-rooks. Fast anneals leave
//! most weight on infeasible states, slow ones find the ground state, and
//! in between the feasible excited states are populated.
//!
//! `cargo run --release --example diabatic_window [max_t_f]`

use dqa_track::experiments::{krooks_window, KrooksWindowConfig};

pub fn run_example_with(max_t_f: f64) -> dqa_track::Result<()> {
    let cfg = KrooksWindowConfig {
        t_f: KrooksWindowConfig::default()
            .t_f
            .into_iter()
            .filter(|&t| t <= max_t_f)
            .collect(),
        ..Default::default()
    };
    println!("{:>8}  {:>8}  {:>8}  {:>8}  {:>6}  {:>6}", "t_f", "ground", "excited", "infeas", "n>1%", "steps");
    for r in krooks_window(&cfg)? {
        let populated = r.excited_probabilities.iter().filter(|&&p| p > 0.01).count();
        println!(
            "{:>8}  {:>8.4}  {:>8.4}  {:>8.4}  {:>6}  {:>6}",
            r.t_f, r.p_ground, r.p_feasible_excited, r.p_infeasible, populated, r.steps
        );
    }
    Ok(())
}

pub fn run_example() -> dqa_track::Result<()> {
    run_example_with(10.0)
}

#[allow(dead_code)]
fn main() {
    let max_t_f = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1000.0);
    run_example_with(max_t_f).expect("example failed");
}
