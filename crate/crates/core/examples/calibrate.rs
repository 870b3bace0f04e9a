//! Fits the lifespan constant `C_s` at `s = 3` over seeds 0..40 and checks
//! it on seeds 100..110.

use ccch_core::dynamics::CALIBRATION_S;
use ccch_core::experiments::{calibrate_lifespan_constant, check_size_estimate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: Vec<u64> = (0..40).collect();
    let c = calibrate_lifespan_constant(&seeds, CALIBRATION_S, 1.0)?;
    println!("calibrated C_s = {c:.6e}");
    let held_out: Vec<u64> = (100..110).collect();
    let rep = check_size_estimate(&held_out, CALIBRATION_S, c)?;
    for r in &rep.rows {
        println!("seed {:>3}  |z0| = {:.4e}  T0 = {:.4e}  max ratio = {:.4}", r[0], r[1], r[2], r[3]);
    }
    println!("held-out verdict: {:?}", rep.verdicts[0].status);
    Ok(())
}
