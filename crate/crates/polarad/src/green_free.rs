//! Free-space dyadic Green tensor (dimensionless, G_phys / k) and the
//! resulting dipole-dipole pair couplings.
//!
//! Two normalizations are carried throughout the crate:
//!
//! * [`CouplingScale::Physical`]: Gamma_aa reproduces the free-space rate
//!   exactly, V_ab/Gamma = 3 pi d.Re G.d, Gamma_ab/Gamma = 6 pi d.Im G.d.
//! * [`CouplingScale::Reduced`]: 2/3 of the physical couplings. The bundled
//!   presets, tabulated shifts/rates, and fitted decay constants all follow
//!   this convention; the bare single-atom rate stays Gamma either way.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Normalization of Green-tensor-derived couplings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingScale {
    Physical,
    #[default]
    Reduced,
}

impl CouplingScale {
    /// multiplier applied to the physical couplings
    pub fn factor(self) -> f64 {
        match self {
            CouplingScale::Physical => 1.0,
            CouplingScale::Reduced => 2.0 / 3.0,
        }
    }
}

/// Dimensionless free-space dyadic Green tensor at separation `kr`
/// (components of k times the separation vector). Diverges at zero
/// separation; callers handle the self term analytically.
pub fn g0_tensor(kr: [f64; 3]) -> [[Complex64; 3]; 3] {
    let x = (kr[0] * kr[0] + kr[1] * kr[1] + kr[2] * kr[2]).sqrt();
    assert!(x > 0.0, "free-space tensor is singular at zero separation");
    let rhat = [kr[0] / x, kr[1] / x, kr[2] / x];
    let phase = Complex64::new(0.0, x).exp();
    let x2 = x * x;
    let x3 = x2 * x;
    let pre = phase / (4.0 * PI * x3);
    let fi = pre * Complex64::new(x2 - 1.0, x);
    let frr = pre * Complex64::new(3.0 - x2, -3.0 * x);
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = frr * rhat[i] * rhat[j];
            if i == j {
                g[i][j] += fi;
            }
        }
    }
    g
}

/// The radiative bracket (cos k/k^2 - sin k/k^3), series-expanded at small
/// argument where the direct form cancels catastrophically.
fn gamma_bracket_small(k: f64) -> f64 {
    let k2 = k * k;
    -1.0 / 3.0 + k2 / 30.0 - k2 * k2 / 840.0 + k2 * k2 * k2 / 45360.0
}

/// Pair couplings (V_ab/Gamma, Gamma_ab/Gamma) between two identical
/// dipoles `d_hat` (unit vector) separated by `kr`.
///
/// Closed forms in the separation: with kappa = |kr| and c = d.rhat,
///   V     = pref_v [ (1-c^2) cos k/k - (1-3c^2)(sin k/k^2 + cos k/k^3) ]
///   Gamma = pref_g [ (1-c^2) sin k/k + (1-3c^2)(cos k/k^2 - sin k/k^3) ]
/// with (pref_v, pref_g) = (3/4, 3/2) Gamma at physical scale.
pub fn free_couplings(kr: [f64; 3], d_hat: [f64; 3], scale: CouplingScale) -> (f64, f64) {
    let k = (kr[0] * kr[0] + kr[1] * kr[1] + kr[2] * kr[2]).sqrt();
    let f = scale.factor();
    if k == 0.0 {
        // self terms: the shift is absorbed into the transition frequency,
        // the rate is the bare Gamma by construction
        return (0.0, 1.0);
    }
    let c = (kr[0] * d_hat[0] + kr[1] * d_hat[1] + kr[2] * d_hat[2]) / k;
    let perp = 1.0 - c * c;
    let quad = 1.0 - 3.0 * c * c;
    let (sk, ck) = k.sin_cos();
    let v_br = perp * ck / k - quad * (sk / (k * k) + ck / (k * k * k));
    let g_br = if k < 0.1 {
        perp * sk / k + quad * gamma_bracket_small(k)
    } else {
        perp * sk / k + quad * (ck / (k * k) - sk / (k * k * k))
    };
    (f * 0.75 * v_br, f * 1.5 * g_br)
}

/// Same couplings by contracting the tensor: V = 3 pi f d.Re G.d,
/// Gamma = 6 pi f d.Im G.d. Used as the independent route in tests.
pub fn free_couplings_from_tensor(
    kr: [f64; 3],
    d_hat: [f64; 3],
    scale: CouplingScale,
) -> (f64, f64) {
    let g = g0_tensor(kr);
    let mut dgd = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            dgd += d_hat[i] * g[i][j] * d_hat[j];
        }
    }
    let f = scale.factor();
    (3.0 * PI * f * dgd.re, 6.0 * PI * f * dgd.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_rate_is_bare_gamma() {
        let (v, g) = free_couplings([0.0; 3], [0.0, 0.0, 1.0], CouplingScale::Physical);
        assert_eq!(v, 0.0);
        assert_eq!(g, 1.0);
    }

    #[test]
    fn contact_limit_approaches_bare_rate() {
        // Gamma_ab -> Gamma as the pair distance vanishes (physical scale)
        for k in [1e-3, 1e-2, 0.05, 0.0999] {
            let (_, g) = free_couplings([0.0, k, 0.0], [0.0, 0.0, 1.0], CouplingScale::Physical);
            assert!((g - 1.0).abs() < 0.01, "kappa={k}: {g}");
        }
        let (_, g) = free_couplings([0.0, 1e-8, 0.0], [0.0, 0.0, 1.0], CouplingScale::Physical);
        assert!((g - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bracket_and_tensor_routes_agree() {
        let dirs = [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.6, 0.0, 0.8],
            [0.36, 0.48, 0.8],
        ];
        for kappa in [0.3, 1.0, 2.5, 7.0, 20.0] {
            for d in dirs {
                let kr = [0.0, kappa, 0.0];
                let (v1, g1) = free_couplings(kr, d, CouplingScale::Physical);
                let (v2, g2) = free_couplings_from_tensor(kr, d, CouplingScale::Physical);
                assert!((v1 - v2).abs() < 1e-12 * (1.0 + v1.abs()), "V kappa={kappa}");
                assert!((g1 - g2).abs() < 1e-12 * (1.0 + g1.abs()), "G kappa={kappa}");
            }
        }
    }

    #[test]
    fn series_and_direct_bracket_agree_at_crossover() {
        let d = [0.0, 0.0, 1.0];
        for kappa in [0.0999f64, 0.1, 0.1001, 0.2] {
            let (_, g_direct) = {
                let perp = 1.0;
                let quad = 1.0;
                let (sk, ck) = kappa.sin_cos();
                let br = perp * sk / kappa + quad * (ck / (kappa * kappa) - sk / (kappa * kappa * kappa));
                (0.0, 1.5 * br)
            };
            let (_, g) = free_couplings([0.0, kappa, 0.0], d, CouplingScale::Physical);
            assert!((g - g_direct).abs() < 1e-9, "kappa={kappa}");
        }
    }

    #[test]
    fn reduced_scale_is_two_thirds_off_diagonal() {
        let kr = [0.0, 1.3, 0.0];
        let d = [0.0, 0.0, 1.0];
        let (vp, gp) = free_couplings(kr, d, CouplingScale::Physical);
        let (vl, gl) = free_couplings(kr, d, CouplingScale::Reduced);
        assert!((vl - vp * 2.0 / 3.0).abs() < 1e-15);
        assert!((gl - gp * 2.0 / 3.0).abs() < 1e-15);
        // but the self rate never rescales
        let (_, g_self) = free_couplings([0.0; 3], d, CouplingScale::Reduced);
        assert_eq!(g_self, 1.0);
    }

    #[test]
    fn frozen_reference_pairs() {
        // spot values frozen from an independent implementation;
        // physical scale, separation along y
        let cases: [([f64; 3], f64, f64, f64); 4] = [
            ([0.0, 0.0, 1.0], 1.0, -0.6311032386059223, 0.8104534588022096),
            ([0.0, 1.0, 0.0], 1.0, 2.0726599360140545, 0.9035060368192702),
            ([0.0, 0.0, 1.0], 2.5, -0.27370484841030207, 0.10935549289713001),
            ([0.0, 1.0, 0.0], 2.5, 0.06672352749244394, 0.4994555871304879),
        ];
        for (d, kappa, v_ref, g_ref) in cases {
            let (v, g) = free_couplings([0.0, kappa, 0.0], d, CouplingScale::Physical);
            assert!((v - v_ref).abs() < 1e-13, "V({kappa}, {d:?}) = {v}");
            assert!((g - g_ref).abs() < 1e-13, "G({kappa}, {d:?}) = {g}");
        }
    }
}
