//! Evaluate the surface-scattering part of the Green tensor for two points
//! at equal height, separated along y. Only xx, yy, zz and the odd yz
//! block survive; everything is reported in units of k = omega/c = 1.

use num_complex::Complex64;
use polarad::green_surface::scattering_green_dimless;
use polarad::SommerfeldConfig;

fn fmt(c: Complex64) -> String {
    format!("{:>+11.4e}{:>+11.4e}i", c.re, c.im)
}

fn main() -> polarad::Result<()> {
    let eps = Complex64::new(-0.95, 0.11); // sapphire at 12.15 um
    let cfg = SommerfeldConfig::default();
    for (kh, ky) in [(0.25, 0.0), (0.25, 1.0), (1.0, 2.0)] {
        let g = scattering_green_dimless(kh, ky, eps, &cfg)?;
        println!("kh = {kh}, k*y = {ky}  (error estimate {:.1e}, {} segments)", g.err_estimate, g.segments_used);
        println!("  xx {}", fmt(g.tensor[0][0]));
        println!("  yy {}", fmt(g.tensor[1][1]));
        println!("  zz {}", fmt(g.tensor[2][2]));
        println!("  yz {}", fmt(g.tensor[1][2]));
        println!();
    }
    Ok(())
}
