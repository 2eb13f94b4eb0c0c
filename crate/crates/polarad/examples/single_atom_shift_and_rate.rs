//! Height dependence of the Cs 6D_3/2 -> 7P_1/2 line shift and total decay
//! rate over a sapphire surface, with the dipole normal to the interface.
//! Close to the surface the phonon-polariton resonance enhances both by
//! orders of magnitude.

use polarad::coupling::single_atom_shift_and_rate;
use polarad::scenario::{sapphire, CS_WAVELENGTH_UM};
use polarad::{CouplingScale, SommerfeldConfig};

fn main() -> polarad::Result<()> {
    let model = sapphire();
    let cfg = SommerfeldConfig::default();
    println!(
        "{:>8} {:>8} {:>14} {:>16}",
        "h (um)", "kh", "-shift/Gamma", "total rate/Gamma"
    );
    for h_um in [0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0] {
        let (shift, rate) = single_atom_shift_and_rate(
            &model,
            CS_WAVELENGTH_UM,
            h_um,
            [0.0, 0.0, 1.0],
            &cfg,
            CouplingScale::Reduced,
        )?;
        let kh = 2.0 * std::f64::consts::PI * h_um / CS_WAVELENGTH_UM;
        println!("{h_um:>8.2} {kh:>8.3} {:>14.4} {:>16.4}", -shift, rate);
    }
    Ok(())
}
