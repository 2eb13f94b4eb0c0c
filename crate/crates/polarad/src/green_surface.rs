//! Scattering (surface-reflected) part of the Green tensor for two dipoles
//! at equal height h above a dielectric half-space, lateral separation
//! y_ab along the line of atoms.
//!
//! The Sommerfeld integral over transverse wavenumber is split at k_rho = k:
//! the propagating part is parametrized by the emission angle
//! (k_rho = k sin theta) and the evanescent part by the decay exponent
//! s = 2 k_z'' h, which turns the divergent-looking tail into a smooth
//! integral weighted by e^{-s}. All lengths are premultiplied by k; the
//! returned tensor is G_physical / k.

use crate::bessel::{j0, j1, j2};
use crate::dielectric::{fresnel_eps, wave_sqrt, Permittivity};
use crate::error::{Error, Result};
use crate::green_free::{g0_tensor, CouplingScale};
use crate::quad;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Controls for the Sommerfeld integration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SommerfeldConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// truncation level for the e^{-s} evanescent tail
    pub tail_cutoff_tol: f64,
}

impl Default for SommerfeldConfig {
    fn default() -> Self {
        SommerfeldConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            // widely separated pairs at small kh oscillate for thousands
            // of periods along the evanescent path; the budget must cover
            // them (the cost only materializes when actually needed)
            max_subdivisions: 6000,
            tail_cutoff_tol: 1e-16,
        }
    }
}

/// A pair of atoms at equal height over the surface, in physical units.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfacePairInput {
    pub wavelength_um: f64,
    pub h_um: f64,
    /// signed lateral separation y_b - y_a along the atom line
    pub y_ab_um: f64,
    pub model: Permittivity,
}

#[derive(Clone, Debug)]
pub struct SurfaceGreenResult {
    pub tensor: [[Complex64; 3]; 3],
    /// worst per-component absolute error estimate of the quadratures
    pub err_estimate: f64,
    pub segments_used: usize,
}

/// Dimensionless reflected Green tensor at kh, signed kyature.
pub fn scattering_green_dimless(
    kh: f64,
    ky: f64,
    eps: Complex64,
    cfg: &SommerfeldConfig,
) -> Result<SurfaceGreenResult> {
    if !(kh > 0.0) {
        return Err(Error::Config(format!("height above surface must be positive, got kh={kh}")));
    }
    if eps.re < -1.0 && eps.im.abs() <= 1e-12 * eps.re.abs() {
        return Err(Error::Numeric(
            "lossless permittivity below -1 puts the surface-polariton pole on the \
             integration path; give the permittivity a positive imaginary part"
                .into(),
        ));
    }
    let s_phi = if ky < 0.0 { -1.0 } else { 1.0 };
    let y = ky.abs();

    // propagating sector: k_rho = sin(theta), theta in [0, pi/2]
    let prop = quad::integrate(
        |th, out: &mut [Complex64]| {
            let (kr, kz) = th.sin_cos();
            let f = fresnel_eps(eps, Complex64::new(kr * kr, 0.0));
            let x = kr * y;
            let (b0, b1, b2) = (j0(x), j1(x), j2(x));
            let ph = Complex64::new(0.0, 2.0 * kz * kh).exp();
            out[0] = ph * kr * (f.rs * (b0 - b2) - f.rp * kz * kz * (b0 + b2));
            out[1] = ph * kr * (f.rs * (b0 + b2) - f.rp * kz * kz * (b0 - b2));
            out[2] = ph * 2.0 * f.rp * kr * kr * kr * b0;
            out[3] = ph * Complex64::new(0.0, -2.0) * f.rp * kr * kr * b1 * s_phi * kz;
        },
        0.0,
        FRAC_PI_2,
        4,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdivisions,
    )?;

    // evanescent sector: k_rho^2 = 1 + w^2 with w = s/(2 kh)
    let smax = (-cfg.tail_cutoff_tol.ln() + 8.0).min(60.0);
    let evan_f = |s: f64, out: &mut [Complex64]| {
        let w = s / (2.0 * kh);
        let kr2 = 1.0 + w * w;
        let kr = kr2.sqrt();
        let kzz = wave_sqrt(eps - kr2);
        let kz = Complex64::new(0.0, w);
        let rs = (kz - kzz) / (kz + kzz);
        let rp = (eps * kz - kzz) / (eps * kz + kzz);
        let x = kr * y;
        let (b0, b1, b2) = (j0(x), j1(x), j2(x));
        let damp = (-s).exp();
        out[0] = damp * (rs * (b0 - b2) + rp * w * w * (b0 + b2));
        out[1] = damp * (rs * (b0 + b2) + rp * w * w * (b0 - b2));
        out[2] = damp * 2.0 * rp * kr2 * b0;
        out[3] = damp * 2.0 * rp * kr * w * b1 * s_phi;
    };
    // seed extra points around the surface-polariton pole when it sits
    // close to the real path (weak absorption)
    let pole_kr = if eps.re < -1.0 && eps.im.abs() < 0.1 * eps.re.abs() {
        let ksp = (eps / (eps + 1.0)).sqrt();
        let kre = ksp.re.abs();
        if kre > 1.0 {
            Some(2.0 * kh * (kre * kre - 1.0).sqrt())
        } else {
            None
        }
    } else {
        None
    };
    let mut pts = vec![0.0];
    if let Some(sp) = pole_kr {
        for c in [0.5, 1.0, 1.5] {
            let p = c * sp;
            if p > 0.0 && p < smax {
                pts.push(p);
            }
        }
    }
    // near-conductor media: rp crosses over on the scale w ~ 1/sqrt|eps|,
    // a boundary layer at the left end of the s-path
    let en = eps.norm();
    if en > 1e4 {
        for c in [1.0, 8.0] {
            let p = 2.0 * kh * c / en.sqrt();
            if p > 0.0 && p < smax {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    pts.push(smax);
    let evan = quad::integrate_with_breakpoints(
        evan_f,
        &pts,
        4,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_subdivisions,
    )?;

    let pre_p = Complex64::new(0.0, 1.0 / (8.0 * PI));
    let pre_e = Complex64::new(1.0 / (16.0 * PI * kh), 0.0);
    let v: Vec<Complex64> = (0..4)
        .map(|i| pre_p * prop.value[i] + pre_e * evan.value[i])
        .collect();
    let err = (0..4)
        .map(|i| pre_p.norm() * prop.abs_err[i] + pre_e.norm() * evan.abs_err[i])
        .fold(0.0f64, f64::max);

    let zero = Complex64::new(0.0, 0.0);
    let tensor = [
        [v[0], zero, zero],
        [zero, v[1], v[3]],
        [zero, -v[3], v[2]],
    ];
    Ok(SurfaceGreenResult {
        tensor,
        err_estimate: err,
        segments_used: prop.segments + evan.segments,
    })
}

/// Reflected Green tensor for a physical pair specification.
pub fn scattering_green(input: &SurfacePairInput, cfg: &SommerfeldConfig) -> Result<SurfaceGreenResult> {
    let eps = input.model.at_wavelength(input.wavelength_um)?;
    let k = 2.0 * PI / input.wavelength_um;
    scattering_green_dimless(k * input.h_um, k * input.y_ab_um, eps, cfg)
}

fn contract(t: &[[Complex64; 3]; 3], d_hat: [f64; 3]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += d_hat[i] * t[i][j] * d_hat[j];
        }
    }
    acc
}

/// Surface-mediated pair couplings (V^R/Gamma, Gamma^R/Gamma).
pub fn surface_couplings(
    input: &SurfacePairInput,
    d_hat: [f64; 3],
    cfg: &SommerfeldConfig,
    scale: CouplingScale,
) -> Result<(f64, f64)> {
    let g = scattering_green(input, cfg)?;
    let dgd = contract(&g.tensor, d_hat);
    let f = scale.factor();
    Ok((3.0 * PI * f * dgd.re, 6.0 * PI * f * dgd.im))
}

/// Dimensionless variant of [`surface_couplings`].
pub fn surface_couplings_dimless(
    kh: f64,
    ky: f64,
    eps: Complex64,
    d_hat: [f64; 3],
    cfg: &SommerfeldConfig,
    scale: CouplingScale,
) -> Result<(f64, f64)> {
    let g = scattering_green_dimless(kh, ky, eps, cfg)?;
    let dgd = contract(&g.tensor, d_hat);
    let f = scale.factor();
    Ok((3.0 * PI * f * dgd.re, 6.0 * PI * f * dgd.im))
}

/// Perfect-mirror tensor: the free-space tensor to the image point,
/// mirrored (columns x, y negated). Exact for |eps| -> infinity.
pub fn image_tensor(kh: f64, ky: f64) -> [[Complex64; 3]; 3] {
    let g0 = g0_tensor([0.0, ky, 2.0 * kh]);
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let sign = if j == 2 { 1.0 } else { -1.0 };
            g[i][j] = sign * g0[i][j];
        }
    }
    g
}

/// Couplings of a dipole with the perfect-mirror image of its partner.
pub fn image_couplings(kh: f64, ky: f64, d_hat: [f64; 3], scale: CouplingScale) -> (f64, f64) {
    let g = image_tensor(kh, ky);
    let dgd = contract(&g, d_hat);
    let f = scale.factor();
    (3.0 * PI * f * dgd.re, 6.0 * PI * f * dgd.im)
}

/// Electrostatic (near-field) limit of (kh)^3 G^R: S/(32 pi) diag(1,1,2).
pub fn quasistatic_tensor(eps: Complex64) -> [[Complex64; 3]; 3] {
    let s = (eps - 1.0) / (eps + 1.0);
    let c = s / (32.0 * PI);
    let zero = Complex64::new(0.0, 0.0);
    [
        [c, zero, zero],
        [zero, c, zero],
        [zero, zero, 2.0 * c],
    ]
}

/// Extrapolated near-field tensor (kh)^3 G^R as kh -> 0, from evaluations
/// at h and h/2 (the finite-height correction starts at (kh)^2).
/// Requires kh < 0.05.
pub fn near_field_asymptote(
    model: &Permittivity,
    wavelength_um: f64,
    h_um: f64,
    cfg: &SommerfeldConfig,
) -> Result<[[Complex64; 3]; 3]> {
    let eps = model.at_wavelength(wavelength_um)?;
    let kh = 2.0 * PI / wavelength_um * h_um;
    if !(kh > 0.0 && kh < 0.05) {
        return Err(Error::Config(format!(
            "near-field extrapolation needs kh in (0, 0.05), got {kh}"
        )));
    }
    let scaled = |khx: f64| -> Result<[[Complex64; 3]; 3]> {
        let g = scattering_green_dimless(khx, 0.0, eps, cfg)?;
        let c = khx * khx * khx;
        let mut out = g.tensor;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v *= c;
            }
        }
        Ok(out)
    };
    let a = scaled(kh)?;
    let half = scaled(0.5 * kh)?;
    // leading finite-height correction is quadratic in kh
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (4.0 * half[i][j] - a[i][j]) / 3.0;
        }
    }
    Ok(out)
}
