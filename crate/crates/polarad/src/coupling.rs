//! Pairwise dipole-dipole couplings for a line of atoms at equal height
//! over the surface, and the non-Hermitian evolution matrix built from them.
//!
//! Atoms sit at r_a = (0, a d, h) with a common dipole orientation. Both
//! coupling matrices are symmetric Toeplitz: the antisymmetric yz block of
//! the reflected Green tensor drops out of d.G.d for any real orientation,
//! so couplings depend on |a - b| only.

use crate::dielectric::Permittivity;
use crate::error::{Error, Result};
use crate::green_free::{free_couplings, CouplingScale};
use crate::green_surface::{scattering_green_dimless, SommerfeldConfig};
use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Line of `n` atoms with spacing `kd`, height `kh` (both premultiplied
/// by the transition wavenumber), common dipole orientation `d_hat`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomArray {
    pub n: usize,
    pub kd: f64,
    pub kh: f64,
    pub d_hat: [f64; 3],
}

impl AtomArray {
    /// Chain along y with dipoles normal to the surface.
    pub fn line(n: usize, kd: f64, kh: f64) -> Self {
        AtomArray {
            n,
            kd,
            kh,
            d_hat: [0.0, 0.0, 1.0],
        }
    }

    fn validate(&self, with_surface: bool) -> Result<[f64; 3]> {
        if self.n == 0 {
            return Err(Error::Config("need at least one atom".into()));
        }
        if self.n > 1 && !(self.kd > 0.0) {
            return Err(Error::Config(format!(
                "atom spacing must be positive, got kd={}",
                self.kd
            )));
        }
        if with_surface && !(self.kh > 0.0) {
            return Err(Error::Config(format!(
                "height above surface must be positive, got kh={}",
                self.kh
            )));
        }
        let norm = self.d_hat.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Config("dipole orientation must be a nonzero vector".into()));
        }
        Ok([self.d_hat[0] / norm, self.d_hat[1] / norm, self.d_hat[2] / norm])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildOptions {
    pub scale: CouplingScale,
    /// include surface-mediated atom-atom terms, not just the
    /// single-atom shift and rate on the diagonal
    pub include_surface_pair_terms: bool,
    pub sommerfeld: SommerfeldConfig,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            scale: CouplingScale::Reduced,
            include_surface_pair_terms: true,
            sommerfeld: SommerfeldConfig::default(),
        }
    }
}

/// Coherent (V) and dissipative (Gamma) coupling matrices in units of the
/// free-space single-atom rate, split by origin.
#[derive(Clone, Debug)]
pub struct CouplingMatrices {
    pub v: Array2<f64>,
    pub gamma: Array2<f64>,
    pub v_free: Array2<f64>,
    pub gamma_free: Array2<f64>,
    pub v_surface: Array2<f64>,
    pub gamma_surface: Array2<f64>,
    /// worst per-component error estimate across the surface quadratures
    pub green_err: f64,
    /// total quadrature segments spent on the surface terms
    pub green_segments: usize,
}

impl CouplingMatrices {
    /// Surface-induced shift of each atom (all diagonals are equal).
    pub fn self_shift(&self) -> f64 {
        self.v[[0, 0]]
    }

    /// Total single-atom decay rate including the surface contribution.
    pub fn self_rate(&self) -> f64 {
        self.gamma[[0, 0]]
    }
}

/// Build the coupling matrices; `eps = None` drops the surface entirely.
pub fn build_matrices(
    array: &AtomArray,
    eps: Option<Complex64>,
    opts: &BuildOptions,
) -> Result<CouplingMatrices> {
    let d_hat = array.validate(eps.is_some())?;
    let n = array.n;
    let f = opts.scale.factor();

    // per-separation couplings, index m = |a - b|
    let mut vf = vec![0.0; n];
    let mut gf = vec![0.0; n];
    gf[0] = 1.0;
    for m in 1..n {
        let (v, g) = free_couplings([0.0, m as f64 * array.kd, 0.0], d_hat, opts.scale);
        vf[m] = v;
        gf[m] = g;
    }

    let mut vs = vec![0.0; n];
    let mut gs = vec![0.0; n];
    let mut green_err = 0.0f64;
    let mut green_segments = 0usize;
    if let Some(eps) = eps {
        let m_max = if opts.include_surface_pair_terms { n } else { 1 };
        for m in 0..m_max {
            let g = scattering_green_dimless(array.kh, m as f64 * array.kd, eps, &opts.sommerfeld)?;
            green_err = green_err.max(g.err_estimate);
            green_segments += g.segments_used;
            let mut dgd = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    dgd += d_hat[i] * g.tensor[i][j] * d_hat[j];
                }
            }
            vs[m] = 3.0 * PI * f * dgd.re;
            gs[m] = 6.0 * PI * f * dgd.im;
        }
    }

    let fill = |per_m: &[f64]| {
        Array2::from_shape_fn((n, n), |(a, b)| per_m[a.abs_diff(b)])
    };
    let v_free = fill(&vf);
    let mut gamma_free = fill(&gf);
    let v_surface = fill(&vs);
    let gamma_surface = fill(&gs);
    // vf[0] = 0 already; the free diagonal carries the bare rate
    for a in 0..n {
        gamma_free[[a, a]] = 1.0;
    }
    let v = &v_free + &v_surface;
    let gamma = &gamma_free + &gamma_surface;
    Ok(CouplingMatrices {
        v,
        gamma,
        v_free,
        gamma_free,
        v_surface,
        gamma_surface,
        green_err,
        green_segments,
    })
}

/// Shift and total decay rate of a single atom at height `h_um`, in units
/// of the free-space rate.
pub fn single_atom_shift_and_rate(
    model: &Permittivity,
    wavelength_um: f64,
    h_um: f64,
    d_hat: [f64; 3],
    cfg: &SommerfeldConfig,
    scale: CouplingScale,
) -> Result<(f64, f64)> {
    let eps = model.at_wavelength(wavelength_um)?;
    let kh = 2.0 * PI / wavelength_um * h_um;
    let array = AtomArray {
        n: 1,
        kd: 0.0,
        kh,
        d_hat,
    };
    let opts = BuildOptions {
        scale,
        sommerfeld: *cfg,
        ..Default::default()
    };
    let m = build_matrices(&array, Some(eps), &opts)?;
    Ok((m.self_shift(), m.self_rate()))
}

/// How the detuning entering the evolution matrix is referenced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningConvention {
    /// detuning is measured from the surface-shifted resonance
    #[default]
    FromShifted,
    /// detuning is measured from the bare atomic resonance; the
    /// surface shift is added on the diagonal
    FromBare,
}

/// Non-Hermitian evolution matrix M of beta' = M beta - (i/2) Omega.
pub fn evolution_matrix(
    mats: &CouplingMatrices,
    delta_over_gamma: f64,
    convention: DetuningConvention,
) -> Array2<Complex64> {
    let n = mats.v.nrows();
    Array2::from_shape_fn((n, n), |(a, b)| {
        if a == b {
            let shift = match convention {
                DetuningConvention::FromShifted => delta_over_gamma,
                DetuningConvention::FromBare => delta_over_gamma + mats.v[[a, a]],
            };
            Complex64::new(-0.5 * mats.gamma[[a, a]], shift)
        } else {
            Complex64::new(-0.5 * mats.gamma[[a, b]], mats.v[[a, b]])
        }
    })
}

/// One collective eigenmode: its frequency shift and decay rate, both in
/// units of the free-space single-atom rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub shift: f64,
    pub rate: f64,
}

/// Eigenmodes of the evolution matrix, fastest-decaying first.
pub fn mode_spectrum(m: &Array2<Complex64>) -> Result<Vec<Mode>> {
    let (eigs, _) = m
        .eig()
        .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e}")))?;
    let mut modes: Vec<Mode> = eigs
        .iter()
        .map(|l| Mode {
            shift: l.im,
            rate: -2.0 * l.re,
        })
        .collect();
    modes.sort_by(|a, b| b.rate.partial_cmp(&a.rate).unwrap());
    Ok(modes)
}

/// Result of the inverse-cube fit of the near-field shift.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct C3Fit {
    /// van der Waals coefficient in kHz um^3
    pub c3_khz_um3: f64,
    /// relative rms misfit of delta(h) = -C3/h^3 over the sampled heights
    pub residual: f64,
}

/// Extract the van der Waals C3 coefficient from the height dependence of
/// the single-atom shift. `gamma_khz` is the free-space linewidth
/// Gamma/2pi in kHz; heights must satisfy kh < 0.05 so the shift is in
/// its electrostatic regime.
pub fn extract_c3(
    model: &Permittivity,
    wavelength_um: f64,
    gamma_khz: f64,
    hs_um: &[f64],
    cfg: &SommerfeldConfig,
) -> Result<C3Fit> {
    if hs_um.len() < 2 {
        return Err(Error::Config("C3 extraction needs at least two heights".into()));
    }
    let eps = model.at_wavelength(wavelength_um)?;
    let k = 2.0 * PI / wavelength_um;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut xs = Vec::with_capacity(hs_um.len());
    let mut shifts = Vec::with_capacity(hs_um.len());
    for &h in hs_um {
        let kh = k * h;
        if !(kh > 0.0 && kh < 0.05) {
            return Err(Error::Config(format!(
                "height h={h} um gives kh={kh}; the inverse-cube fit needs kh in (0, 0.05)"
            )));
        }
        let g = scattering_green_dimless(kh, 0.0, eps, cfg)?;
        // physical-scale shift: the vdW coefficient is a property of the
        // atom-surface pair, not of any reduced normalization
        let delta_khz = 3.0 * PI * g.tensor[2][2].re * gamma_khz;
        let x = 1.0 / (h * h * h);
        num += delta_khz * x;
        den += x * x;
        xs.push(x);
        shifts.push(delta_khz);
    }
    let c3 = -num / den;
    let mut misfit = 0.0;
    let mut scale = 0.0;
    for (x, d) in xs.iter().zip(&shifts) {
        let r = d + c3 * x;
        misfit += r * r;
        scale += d * d;
    }
    let residual = (misfit / scale).sqrt();
    if residual > 0.01 {
        return Err(Error::Numeric(format!(
            "shift does not follow 1/h^3 over the sampled heights (residual {residual:.2e}); \
             use smaller heights"
        )));
    }
    Ok(C3Fit {
        c3_khz_um3: c3,
        residual,
    })
}
