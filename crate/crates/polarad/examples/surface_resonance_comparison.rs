//! The same five-atom chain at kh = 0.25, seen at different transition
//! wavelengths across the sapphire phonon band. On the polariton
//! resonance the emission is quenched within a fraction of a lifetime;
//! off resonance the chain keeps its slow subradiant tail.

use polarad::coupling::{build_matrices, evolution_matrix};
use polarad::dynamics::{decay_trace, drive_vector, steady_state};
use polarad::scenario::sapphire;
use polarad::{AtomArray, BuildOptions, DetuningConvention, DriveDirection};

fn main() -> polarad::Result<()> {
    let model = sapphire();
    let ts = [0.1, 0.5, 1.0, 3.0, 6.0];
    println!("P(t)/P(0) for N = 5, kd = 1, kh = 0.25\n");
    print!("{:>10}", "lam (um)");
    for t in ts {
        print!(" {t:>9.1}");
    }
    println!();
    for lam in [8.15, 10.15, 12.15, 14.15, 16.15] {
        let eps = model.at_wavelength(lam)?;
        let mats =
            build_matrices(&AtomArray::line(5, 1.0, 0.25), Some(eps), &BuildOptions::default())?;
        let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
        let beta0 = steady_state(&m, &drive_vector(DriveDirection::NormalZ, 1e-3, 5, 1.0))?;
        let mut grid = vec![0.0];
        grid.extend_from_slice(&ts);
        let ps = decay_trace(&m, &mats.gamma, &beta0, &grid)?;
        print!("{lam:>10.2}");
        for p in &ps[1..] {
            print!(" {:>9.2e}", p / ps[0]);
        }
        println!(
            "   eps = {:.2}{:+.2}i",
            eps.re, eps.im
        );
    }
    println!("\nthe 12.15 um row sits on the surface-polariton resonance");
    Ok(())
}
