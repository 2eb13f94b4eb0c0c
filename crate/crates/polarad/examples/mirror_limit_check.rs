//! Sanity check of the Sommerfeld integration against an independent
//! construction: over a perfect conductor the scattered field is exactly
//! the field of a mirrored image dipole, no integral needed.

use num_complex::Complex64;
use polarad::green_surface::{image_tensor, scattering_green_dimless};
use polarad::SommerfeldConfig;

fn main() -> polarad::Result<()> {
    let eps = Complex64::new(1e12, 0.0);
    let cfg = SommerfeldConfig {
        rel_tol: 1e-9,
        ..Default::default()
    };
    println!("quadrature vs image dipole at eps = 1e12\n");
    println!("{:>6} {:>6} {:>12} {:>14}", "kh", "k*y", "max |dev|", "rel to scale");
    for (kh, ky) in [(0.25, 0.0), (0.5, 1.0), (1.0, 3.0), (2.5, 1.0)] {
        let g = scattering_green_dimless(kh, ky, eps, &cfg)?;
        let mirror = image_tensor(kh, ky);
        let scale = mirror.iter().flatten().map(|c| c.norm()).fold(0.0f64, f64::max);
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                dev = dev.max((g.tensor[i][j] - mirror[i][j]).norm());
            }
        }
        println!("{kh:>6.2} {ky:>6.1} {dev:>12.2e} {:>14.2e}", dev / scale);
    }
    Ok(())
}
