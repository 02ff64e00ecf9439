//! Unique feasible k-rooks states accumulated over surrogate shots, for a
//! random and a clustered bias.
//!
//! `cargo run --release --example unique_feasible [k] [shots]`

use dqa_track::ising::{build_krooks, BiasSpec, ProblemKind};
use dqa_track::sampler::{accumulate_unique_feasible, sample, Backend, SamplerRequest, SurrogateParams};

pub fn run_example_with(k: usize, n_shots: usize) -> dqa_track::Result<()> {
    let kind = ProblemKind::KRooks { k };
    let blocks = match k {
        6 => vec![1, 2, 3],
        7 => vec![2, 2, 3],
        _ => vec![1, k - 1],
    };
    let variants = [
        ("r", BiasSpec::random(0.1, 1)),
        ("c", BiasSpec::clustered(blocks, 0.1, 1)),
    ];
    let params = SurrogateParams {
        t_min_factor: 0.3,
        ..Default::default()
    };
    println!("k={k}: {} feasible of 2^{} states", kind.feasible_count(), k * k);
    for (label, bias) in variants {
        let shots = sample(&SamplerRequest {
            model: build_krooks(k, &bias)?,
            backend: Backend::Surrogate(params),
            n_shots,
            seed: 7,
        })?;
        let acc = accumulate_unique_feasible(&shots, kind);
        let marks: Vec<String> = acc
            .curve
            .iter()
            .filter(|(s, _)| s.is_power_of_two() || *s == n_shots)
            .map(|(s, c)| format!("{s}:{c}"))
            .collect();
        println!("  {label}: {}", marks.join(" "));
    }
    Ok(())
}

pub fn run_example() -> dqa_track::Result<()> {
    run_example_with(4, 500)
}

#[allow(dead_code)]
fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run_example_with(args.first().copied().unwrap_or(4), args.get(1).copied().unwrap_or(10_000))
        .expect("example failed");
}
