//! Ground manifold of the k-rooks Ising model, unbiased and biased.

use dqa_track::ising::{brute_force_spectrum, build_krooks, BiasSpec, ProblemKind};

pub fn run_example() -> dqa_track::Result<()> {
    for k in 2..=4 {
        let kind = ProblemKind::KRooks { k };
        let spectrum = brute_force_spectrum(&build_krooks(k, &BiasSpec::none())?, Some(kind))?;
        let e0 = spectrum[0].energy;
        let ground: Vec<_> = spectrum.iter().take_while(|e| e.energy == e0).collect();
        let first_infeasible = spectrum.iter().find(|e| !e.feasible).map(|e| e.energy).unwrap_or(f64::NAN);
        println!(
            "k={k}: {} ground states at E={e0}, all feasible: {}, lowest infeasible E={first_infeasible}",
            ground.len(),
            ground.iter().all(|e| e.feasible)
        );
    }

    // A small random bias splits the k! degeneracy.
    let k = 3;
    let model = build_krooks(k, &BiasSpec::random(0.1, 1))?;
    let spectrum = brute_force_spectrum(&model, Some(ProblemKind::KRooks { k }))?;
    println!("\nbiased k=3, lowest eight levels:");
    for e in spectrum.iter().take(8) {
        let board = e.configuration().bitstring();
        let rows: Vec<&str> = (0..k).map(|r| &board[r * k..(r + 1) * k]).collect();
        println!("  E={:>10.5}  {}  feasible={}", e.energy, rows.join("/"), e.feasible);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
