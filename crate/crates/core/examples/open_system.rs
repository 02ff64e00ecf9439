//! Closed versus dephased annealing of biased 2-rooks.

use dqa_track::anneal::{
    evolve_gksl, evolve_schrodinger, forward_schedule, outcome_distribution, DensityMatrix, LindbladConfig,
    QuantumState,
};
use dqa_track::ising::{build_krooks, BiasSpec, ProblemKind};

pub fn run_example() -> dqa_track::Result<()> {
    let model = build_krooks(2, &BiasSpec::random(0.1, 5))?;
    let kind = ProblemKind::KRooks { k: 2 };
    let schedule = forward_schedule(20.0)?;
    let psi0 = QuantumState::uniform(4);
    let closed = outcome_distribution(&evolve_schrodinger(&psi0, &model, &schedule, 200)?)?;
    let feasible = |p: &[f64]| (0..16u64).filter(|&j| kind.is_feasible_index(j)).map(|j| p[j as usize]).sum::<f64>();
    println!("closed:      feasible {:.4}", feasible(&closed));
    for rate in [0.01, 0.1, 1.0] {
        let rho = evolve_gksl(
            &DensityMatrix::from_pure(&psi0),
            &model,
            &schedule,
            &LindbladConfig::dephasing(rate),
            200,
        )?;
        let p = outcome_distribution(&rho)?;
        println!("gamma={rate:<5} feasible {:.4}  min eigenvalue {:.2e}", feasible(&p), rho.min_eigenvalue());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
