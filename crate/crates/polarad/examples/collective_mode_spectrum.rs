//! Collective decay rates of a chain above the surface as the spacing
//! varies. Tight chains split into one bright mode carrying nearly all
//! the decay and N-1 dark modes; with the surface close by, even the
//! dark modes inherit the nonradiative polariton channel.

use polarad::coupling::{build_matrices, evolution_matrix, mode_spectrum};
use polarad::scenario::{sapphire, CS_WAVELENGTH_UM};
use polarad::{AtomArray, BuildOptions, DetuningConvention};

fn main() -> polarad::Result<()> {
    let eps = sapphire().at_wavelength(CS_WAVELENGTH_UM)?;
    let n = 5;
    for (label, kh) in [("free space", None), ("kh = 1.0", Some(1.0)), ("kh = 0.25", Some(0.25))] {
        println!("{label}:");
        println!("{:>6}  mode rates (Gamma), fastest first", "kd");
        for kd in [0.3, 1.0, 3.0] {
            let mats = build_matrices(
                &AtomArray::line(n, kd, kh.unwrap_or(0.0)),
                kh.map(|_| eps),
                &BuildOptions::default(),
            )?;
            let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
            let modes = mode_spectrum(&m)?;
            let rates: Vec<String> = modes.iter().map(|md| format!("{:>8.3}", md.rate)).collect();
            println!("{kd:>6.1}  {}", rates.join(" "));
        }
        println!();
    }
    Ok(())
}
