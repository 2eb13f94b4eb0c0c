//! Fitted decay time of a five-atom chain versus height above sapphire,
//! next to the single-atom curve. Near the surface both are quenched by
//! the polariton; around kh ~ 1.3 the chain stays subradiant-slow before
//! settling to the free-space collective value.

use polarad::coupling::{build_matrices, evolution_matrix};
use polarad::dynamics::{drive_vector, fitted_decay_time, steady_state};
use polarad::scenario::{sapphire, CS_WAVELENGTH_UM};
use polarad::{AtomArray, BuildOptions, DetuningConvention, DriveDirection};
use rayon::prelude::*;

fn tau(n: usize, kd: f64, kh: f64, eps: num_complex::Complex64) -> polarad::Result<f64> {
    let mats = build_matrices(&AtomArray::line(n, kd, kh), Some(eps), &BuildOptions::default())?;
    let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
    let beta0 = steady_state(&m, &drive_vector(DriveDirection::NormalZ, 1e-3, n, kd))?;
    Ok(fitted_decay_time(&m, &mats.gamma, &beta0)?.tau)
}

fn main() -> polarad::Result<()> {
    let eps = sapphire().at_wavelength(CS_WAVELENGTH_UM)?;
    let khs: Vec<f64> = (0..30).map(|i| 0.1 + 5.9 * i as f64 / 29.0).collect();
    let rows: polarad::Result<Vec<(f64, f64)>> = khs
        .par_iter()
        .map(|&kh| Ok((tau(5, 1.0, kh, eps)?, tau(1, 0.0, kh, eps)?)))
        .collect();
    println!("{:>6} {:>12} {:>12}", "kh", "tau N=5", "tau N=1");
    for (kh, (t5, t1)) in khs.iter().zip(rows?) {
        println!("{kh:>6.2} {t5:>12.4} {t1:>12.4}");
    }
    println!("\nfree-space references: 0.49 (N=5, kd=1) and 1.0 (N=1)");
    Ok(())
}
