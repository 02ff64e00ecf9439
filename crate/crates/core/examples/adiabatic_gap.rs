//! Instantaneous spectrum along the anneal path and the adiabaticity
//! metric for biased 2-rooks.

use dqa_track::anneal::{adiabaticity_metric, forward_schedule, spectrum_along_path};
use dqa_track::ising::{build_krooks, BiasSpec};

pub fn run_example() -> dqa_track::Result<()> {
    let model = build_krooks(2, &BiasSpec::random(0.1, 3))?;
    let schedule = forward_schedule(1.0)?;
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let path = spectrum_along_path(&model, &schedule, &grid, 4)?;
    let gaps = path.gaps();
    println!("   s   E0         E1         gap");
    for (i, s) in path.s_grid.iter().enumerate() {
        println!("{s:.2}  {:>9.4}  {:>9.4}  {:.5}", path.eigenvalues[i][0], path.eigenvalues[i][1], gaps[i]);
    }
    let fine: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
    for t_f in [1.0, 10.0, 100.0] {
        let report = adiabaticity_metric(&model, &forward_schedule(t_f)?, &fine, 2)?;
        println!(
            "t_f={t_f:>5}: metric {:.4e} at s={:.3} (levels {:?})",
            report.metric, report.s_at_max, report.levels_at_max
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
