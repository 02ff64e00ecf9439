//! Encode a two-target, two-measurement association problem as an Ising
//! model and compare its feasible energies with association weights.

use dqa_track::ising::{brute_force_spectrum, build_mtda, AssignmentMatrix, CostMatrix, ProblemKind};
use dqa_track::jpda::assignment_weights;

pub fn run_example() -> dqa_track::Result<()> {
    // rows: miss, measurement 1, measurement 2; columns: clutter, target 1, target 2
    let costs = CostMatrix::from_rows(vec![
        vec![0.0, 0.6, 0.6],
        vec![1.4, 0.1, 0.9],
        vec![1.4, 0.8, 0.2],
    ])?;
    let (n, m) = (2, 2);
    let model = build_mtda(n, m, &costs, 2.0)?;
    let kind = ProblemKind::Mtda {
        n_targets: n,
        n_measurements: m,
    };
    let spectrum = brute_force_spectrum(&model, Some(kind))?;
    let feasible: Vec<AssignmentMatrix> = spectrum
        .iter()
        .filter(|e| e.feasible)
        .map(|e| AssignmentMatrix::from_configuration(n, m, &e.configuration()))
        .collect::<dqa_track::Result<_>>()?;
    println!("{} spins, {} feasible assignments", model.n_spins(), feasible.len());
    println!("ground state feasible: {}", spectrum[0].feasible);

    let hypotheses = assignment_weights(&feasible, &costs)?;
    println!("\nrank  assignment  weight     energy");
    for (rank, h) in hypotheses.iter().enumerate() {
        let energy = spectrum.iter().find(|e| e.index == h.index()).map(|e| e.energy).unwrap_or(f64::NAN);
        println!("{:>4}  {}   {:.5}  {:>8.3}", rank + 1, h.assignment.bitstring(), h.weight, energy);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
