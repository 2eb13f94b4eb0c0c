//! A line of atoms in vacuum decays collectively: the driven steady state
//! overlaps mostly with the fastest (superradiant) mode, and the fitted
//! decay time drops well below the single-atom lifetime.

use polarad::coupling::{build_matrices, evolution_matrix, mode_spectrum};
use polarad::dynamics::{drive_vector, fitted_decay_time, steady_state};
use polarad::{AtomArray, BuildOptions, DetuningConvention, DriveDirection};

fn main() -> polarad::Result<()> {
    let kd = 1.0;
    println!("chain spacing kd = {kd}, drive detuning 10 Gamma\n");
    println!("{:>3} {:>12} {:>14}", "N", "tau/tau0", "fastest mode");
    for n in [1, 2, 3, 5, 8, 12] {
        let array = AtomArray::line(n, kd, 0.0);
        let mats = build_matrices(&array, None, &BuildOptions::default())?;
        let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
        let omega = drive_vector(DriveDirection::NormalZ, 1e-3, n, kd);
        let beta0 = steady_state(&m, &omega)?;
        let fit = fitted_decay_time(&m, &mats.gamma, &beta0)?;
        let modes = mode_spectrum(&m)?;
        println!("{n:>3} {:>12.4} {:>14.4}", fit.tau, modes[0].rate);
    }
    println!("\nmode spectrum for N = 5:");
    let array = AtomArray::line(5, kd, 0.0);
    let mats = build_matrices(&array, None, &BuildOptions::default())?;
    let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
    for (i, mode) in mode_spectrum(&m)?.iter().enumerate() {
        println!("  mode {i}: rate {:>8.4} Gamma, shift {:>8.4} Gamma", mode.rate, mode.shift);
    }
    Ok(())
}
