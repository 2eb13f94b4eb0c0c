//! Permittivity models and derived surface quantities: Fresnel reflection
//! coefficients, the surface response S = (eps-1)/(eps+1), the
//! surface-polariton pole, and the static image coefficient built from the
//! imaginary-axis response.

use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// speed of light in um/s
pub const C_UM_PER_S: f64 = 2.99792458e14;

/// Complex square root on the branch with Re >= 0 and Im >= 0, the one
/// appropriate for wave components in passive media (decay or outward
/// propagation). A negative-zero imaginary part is treated as +0.
pub fn wave_sqrt(z: Complex64) -> Complex64 {
    let z = if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    };
    let mut w = z.sqrt();
    if w.im < 0.0 {
        w = -w;
    }
    if w.re < 0.0 {
        w = -w;
    }
    w
}

/// One Lorentz oscillator: strength / (omega0^2 - omega^2 - i gamma omega).
/// All frequencies in rad/s; `strength` in (rad/s)^2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LorentzTerm {
    pub strength: f64,
    pub omega0: f64,
    pub gamma: f64,
}

/// A tabulated permittivity sample at one vacuum wavelength.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TabPoint {
    pub wavelength_um: f64,
    pub eps_re: f64,
    pub eps_im: f64,
}

/// Permittivity of the half-space below the interface.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Permittivity {
    /// Wavelength-independent value.
    Constant { eps_re: f64, eps_im: f64 },
    /// Sum of Lorentz oscillators on top of eps_inf.
    Lorentz {
        eps_inf: f64,
        oscillators: Vec<LorentzTerm>,
    },
    /// Measured table, interpolated monotone-cubically in wavelength
    /// (separately in the real and imaginary parts).
    Tabulated { points: Vec<TabPoint> },
}

impl Permittivity {
    pub fn constant(eps: Complex64) -> Self {
        Permittivity::Constant {
            eps_re: eps.re,
            eps_im: eps.im,
        }
    }

    /// eps at the given vacuum wavelength.
    pub fn at_wavelength(&self, wavelength_um: f64) -> Result<Complex64> {
        if !(wavelength_um > 0.0) {
            return Err(Error::Config(format!(
                "wavelength must be positive, got {wavelength_um}"
            )));
        }
        match self {
            Permittivity::Constant { eps_re, eps_im } => Ok(Complex64::new(*eps_re, *eps_im)),
            Permittivity::Lorentz { eps_inf, oscillators } => {
                let w = 2.0 * PI * C_UM_PER_S / wavelength_um;
                let mut eps = Complex64::new(*eps_inf, 0.0);
                for t in oscillators {
                    eps += t.strength
                        / Complex64::new(t.omega0 * t.omega0 - w * w, -t.gamma * w);
                }
                Ok(eps)
            }
            Permittivity::Tabulated { points } => tab_interp(points, wavelength_um),
        }
    }

    /// eps(i xi) on the positive imaginary frequency axis (xi in rad/s).
    /// Real-valued for any causal model; not defined for tabulated data.
    pub fn at_imaginary_freq(&self, xi: f64) -> Result<f64> {
        match self {
            Permittivity::Constant { eps_re, .. } => Ok(*eps_re),
            Permittivity::Lorentz { eps_inf, oscillators } => {
                let mut eps = *eps_inf;
                for t in oscillators {
                    eps += t.strength / (t.omega0 * t.omega0 + xi * xi + t.gamma * xi);
                }
                Ok(eps)
            }
            Permittivity::Tabulated { .. } => Err(Error::Unsupported(
                "imaginary-axis permittivity needs an analytic model, not a table".into(),
            )),
        }
    }
}

/// Monotone cubic (Fritsch-Carlson) interpolation through the table,
/// done independently for Re eps and Im eps.
fn tab_interp(points: &[TabPoint], wavelength_um: f64) -> Result<Complex64> {
    if points.len() < 2 {
        return Err(Error::Config("permittivity table needs at least two points".into()));
    }
    let mut pts: Vec<&TabPoint> = points.iter().collect();
    pts.sort_by(|a, b| a.wavelength_um.partial_cmp(&b.wavelength_um).unwrap());
    for w in pts.windows(2) {
        if w[0].wavelength_um == w[1].wavelength_um {
            return Err(Error::Config("permittivity table has duplicate wavelengths".into()));
        }
    }
    let lo = pts.first().unwrap().wavelength_um;
    let hi = pts.last().unwrap().wavelength_um;
    if wavelength_um < lo || wavelength_um > hi {
        return Err(Error::Config(format!(
            "wavelength {wavelength_um} um outside table range [{lo}, {hi}]"
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.wavelength_um).collect();
    let re = pchip(&xs, &pts.iter().map(|p| p.eps_re).collect::<Vec<_>>(), wavelength_um);
    let im = pchip(&xs, &pts.iter().map(|p| p.eps_im).collect::<Vec<_>>(), wavelength_um);
    Ok(Complex64::new(re, im))
}

fn pchip(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    // interval slopes
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let s: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    // Fritsch-Carlson node derivatives
    let mut d = vec![0.0; n];
    d[0] = s[0];
    d[n - 1] = s[n - 2];
    for i in 1..n - 1 {
        if s[i - 1] * s[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
    }
    let k = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => return ys[i],
        Err(i) => (i - 1).min(n - 2),
    };
    let t = (x - xs[k]) / h[k];
    let (t2, t3) = (t * t, t * t * t);
    ys[k] * (2.0 * t3 - 3.0 * t2 + 1.0)
        + d[k] * h[k] * (t3 - 2.0 * t2 + t)
        + ys[k + 1] * (-2.0 * t3 + 3.0 * t2)
        + d[k + 1] * h[k] * (t3 - t2)
}

/// Surface response S = (eps - 1)/(eps + 1) at the given wavelength.
pub fn surface_response(model: &Permittivity, wavelength_um: f64) -> Result<Complex64> {
    let eps = model.at_wavelength(wavelength_um)?;
    let den = eps + 1.0;
    if den.norm() < 1e-14 {
        return Err(Error::Numeric(
            "surface response diverges at eps = -1 (polariton resonance)".into(),
        ));
    }
    Ok((eps - 1.0) / den)
}

/// s- and p-polarized reflection amplitudes at the interface.
#[derive(Clone, Copy, Debug)]
pub struct FresnelPair {
    pub rs: Complex64,
    pub rp: Complex64,
}

/// Fresnel coefficients for transverse wavenumber `k_rho` in units of the
/// vacuum wavenumber k (so 0 is normal incidence, values > 1 evanescent).
pub fn fresnel(model: &Permittivity, wavelength_um: f64, k_rho: f64) -> Result<FresnelPair> {
    let eps = model.at_wavelength(wavelength_um)?;
    Ok(fresnel_eps(eps, Complex64::new(k_rho * k_rho, 0.0)))
}

/// Fresnel pair from eps and k_rho^2 (both possibly complex); k's in units
/// of the vacuum wavenumber.
pub fn fresnel_eps(eps: Complex64, k_rho_sq: Complex64) -> FresnelPair {
    let kz = wave_sqrt(Complex64::new(1.0, 0.0) - k_rho_sq);
    let kzz = wave_sqrt(eps - k_rho_sq);
    FresnelPair {
        rs: (kz - kzz) / (kz + kzz),
        rp: (eps * kz - kzz) / (eps * kz + kzz),
    }
}

/// Transverse wavenumber of the surface-polariton pole, in units of k,
/// when the mode exists (Re eps < -1); None otherwise.
pub fn polariton_pole(model: &Permittivity, wavelength_um: f64) -> Result<Option<Complex64>> {
    let eps = model.at_wavelength(wavelength_um)?;
    if eps.re < -1.0 {
        Ok(Some((eps / (eps + 1.0)).sqrt()))
    } else {
        Ok(None)
    }
}

/// Static image coefficient for a transition at signed frequency
/// `omega_ij` (rad/s): the fluctuation integral over the imaginary axis
/// plus, for positive frequencies, the resonant contribution -2 Re S.
///
/// For an ideal conductor (S = 1 at all frequencies) the magnitude is 1.
pub fn image_coefficient(model: &Permittivity, omega_ij: f64) -> Result<f64> {
    if omega_ij == 0.0 {
        return Err(Error::Config("image coefficient needs a nonzero transition frequency".into()));
    }
    // reject models without an imaginary-axis continuation up front
    model.at_imaginary_freq(0.0)?;
    let w = omega_ij.abs();
    // substitute xi = w tan u: (2/pi) int S(i xi) w/(xi^2+w^2) dxi
    // becomes (2/pi) int_0^{pi/2} S(i w tan u) du
    let r = quad::integrate(
        |u, out: &mut [Complex64]| {
            let xi = w * u.tan();
            let e = model.at_imaginary_freq(xi).unwrap_or(f64::NAN);
            out[0] = Complex64::new((e - 1.0) / (e + 1.0), 0.0);
        },
        0.0,
        FRAC_PI_2,
        1,
        1e-10,
        1e-12,
        200,
    )?;
    let fluct = 2.0 / PI * r.value[0].re;
    if !fluct.is_finite() {
        return Err(Error::Numeric("image-coefficient integrand is not finite".into()));
    }
    if omega_ij > 0.0 {
        let wavelength_um = 2.0 * PI * C_UM_PER_S / w;
        let s = surface_response(model, wavelength_um)?;
        Ok(fluct - 2.0 * s.re)
    } else {
        Ok(fluct)
    }
}
