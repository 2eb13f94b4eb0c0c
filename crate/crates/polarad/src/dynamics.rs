//! Single-excitation dynamics: steady state under a weak drive, free decay
//! after the drive is switched off, and exponential fits of the emitted
//! power.
//!
//! Times are in units of the free-space lifetime 1/Gamma; the evolution
//! matrix comes from [`crate::coupling::evolution_matrix`].

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, Solve};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Weak-drive geometry: which way the exciting beam propagates relative
/// to the atom line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveDirection {
    /// towards the surface; every atom sees the same phase
    #[default]
    NormalZ,
    /// along the atom line; atom a picks up a phase e^{i kd a}
    AlongY,
}

/// Rabi frequencies seen by each atom for a plane-wave drive.
pub fn drive_vector(direction: DriveDirection, rabi: f64, n: usize, kd: f64) -> Array1<Complex64> {
    Array1::from_shape_fn(n, |a| match direction {
        DriveDirection::NormalZ => Complex64::new(rabi, 0.0),
        DriveDirection::AlongY => Complex64::new(0.0, kd * a as f64).exp() * rabi,
    })
}

/// Stationary amplitudes under constant drive: solves M beta = (i/2) Omega.
pub fn steady_state(m: &Array2<Complex64>, omega: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    let rhs = omega.mapv(|w| Complex64::new(0.0, 0.5) * w);
    m.solve(&rhs)
        .map_err(|e| Error::Numeric(format!("steady-state solve failed: {e}")))
}

fn norm1(a: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        let col: f64 = (0..a.nrows()).map(|i| a[[i, j]].norm()).sum();
        worst = worst.max(col);
    }
    worst
}

/// Matrix exponential by Pade approximation with scaling and squaring.
pub fn expm(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    const THETA_13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let nrm = norm1(a);
    let s = if nrm > THETA_13 {
        (nrm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let a = a.mapv(|v| v / 2.0f64.powi(s as i32));
    let eye = Array2::<Complex64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let u_inner = a6.mapv(|v| v * B[13]) + &a4.mapv(|v| v * B[11]) + &a2.mapv(|v| v * B[9]);
    let u = a.dot(
        &(a6.dot(&u_inner)
            + &a6.mapv(|v| v * B[7])
            + &a4.mapv(|v| v * B[5])
            + &a2.mapv(|v| v * B[3])
            + &eye.mapv(|v| v * B[1])),
    );
    let v_inner = a6.mapv(|v| v * B[12]) + &a4.mapv(|v| v * B[10]) + &a2.mapv(|v| v * B[8]);
    let v = a6.dot(&v_inner)
        + &a6.mapv(|x| x * B[6])
        + &a4.mapv(|x| x * B[4])
        + &a2.mapv(|x| x * B[2])
        + &eye.mapv(|x| x * B[0]);
    let denom = &v - &u;
    let numer = &v + &u;
    let inv = denom
        .inv()
        .map_err(|e| Error::Numeric(format!("matrix exponential solve failed: {e}")))?;
    let mut r = inv.dot(&numer);
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

enum Propagation {
    Eigen {
        vecs: Array2<Complex64>,
        vals: Array1<Complex64>,
        coeffs: Array1<Complex64>,
    },
    Exponential,
}

/// Amplitudes beta(t) = e^{M t} beta0 at each requested time.
///
/// Uses the eigendecomposition of M when its eigenvector basis is well
/// conditioned, and falls back to the scaled-and-squared exponential when
/// the matrix is close to defective.
pub fn evolve(
    m: &Array2<Complex64>,
    beta0: &Array1<Complex64>,
    ts: &[f64],
) -> Result<Vec<Array1<Complex64>>> {
    let n = m.nrows();
    if beta0.len() != n {
        return Err(Error::Config(format!(
            "initial amplitudes have length {}, matrix is {n}x{n}",
            beta0.len()
        )));
    }
    let plan = match m.eig() {
        Ok((vals, vecs)) => match vecs.inv() {
            Ok(inv) if norm1(&vecs) * norm1(&inv) < 1e8 => {
                let coeffs = inv.dot(beta0);
                Propagation::Eigen { vecs, vals, coeffs }
            }
            _ => Propagation::Exponential,
        },
        Err(_) => Propagation::Exponential,
    };
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Config(format!("evolution times must be nonnegative, got {t}")));
        }
        let beta = match &plan {
            Propagation::Eigen { vecs, vals, coeffs } => {
                let weights =
                    Array1::from_shape_fn(n, |j| (vals[j] * t).exp() * coeffs[j]);
                vecs.dot(&weights)
            }
            Propagation::Exponential => expm(&m.mapv(|v| v * t))?.dot(beta0),
        };
        out.push(beta);
    }
    Ok(out)
}

/// Total emitted power P = beta^dagger Gamma beta.
pub fn fluorescence(gamma: &Array2<f64>, beta: &Array1<Complex64>) -> f64 {
    let n = gamma.nrows();
    let mut p = 0.0;
    for a in 0..n {
        for b in 0..n {
            p += (beta[a].conj() * gamma[[a, b]] * beta[b]).re;
        }
    }
    p
}

/// Emitted power along a free-decay trajectory starting from `beta0`.
pub fn decay_trace(
    m: &Array2<Complex64>,
    gamma: &Array2<f64>,
    beta0: &Array1<Complex64>,
    ts: &[f64],
) -> Result<Vec<f64>> {
    Ok(evolve(m, beta0, ts)?
        .iter()
        .map(|b| fluorescence(gamma, b))
        .collect())
}

/// Result of an exponential fit P(t) ~ e^{-t/tau}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecayFit {
    pub tau: f64,
    /// end of the time window the fit used
    pub window_end: f64,
}

/// End of the standard fit window: one free-space lifetime, shortened when
/// the on-site decay is faster so the fit still sees the initial slope.
pub fn auto_fit_window(m: &Array2<Complex64>) -> f64 {
    let fastest = (0..m.nrows())
        .map(|a| 2.0 * m[[a, a]].re.abs())
        .fold(0.0f64, f64::max);
    if fastest > 0.0 {
        (3.0 / fastest).min(1.0)
    } else {
        1.0
    }
}

/// Least-squares exponential fit of `ps` over times up to `t_end`.
pub fn fit_decay(ts: &[f64], ps: &[f64], t_end: f64) -> Result<DecayFit> {
    if ts.len() != ps.len() {
        return Err(Error::Config("time and power arrays differ in length".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &p) in ts.iter().zip(ps) {
        if t <= t_end * (1.0 + 1e-12) {
            if !(p > 0.0) {
                return Err(Error::Numeric(format!(
                    "power is not positive at t={t} (P={p}); cannot fit an exponential"
                )));
            }
            xs.push(t);
            ys.push(p.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::Config(format!(
            "fit window [0, {t_end}] contains {} samples; need at least 2",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    let slope = cov / var;
    if !(slope < 0.0) {
        return Err(Error::Numeric(format!(
            "fluorescence does not decay over the fit window (slope {slope:.3e})"
        )));
    }
    Ok(DecayFit {
        tau: -1.0 / slope,
        window_end: t_end,
    })
}

/// Full pipeline: evolve from `beta0`, fit the emitted power over the
/// standard window sampled at 400 uniform points.
pub fn fitted_decay_time(
    m: &Array2<Complex64>,
    gamma: &Array2<f64>,
    beta0: &Array1<Complex64>,
) -> Result<DecayFit> {
    let w = auto_fit_window(m);
    let npts = 400;
    let ts: Vec<f64> = (0..npts)
        .map(|i| w * i as f64 / (npts - 1) as f64)
        .collect();
    let ps = decay_trace(m, gamma, beta0, &ts)?;
    fit_decay(&ts, &ps, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{
        build_matrices, evolution_matrix, AtomArray, BuildOptions, DetuningConvention,
    };
    use crate::green_free::CouplingScale;
    use approx::assert_relative_eq;
    use ndarray::array;

    const EPS_RES: Complex64 = Complex64::new(-0.95, 0.11);

    fn free_system(n: usize, kd: f64, scale: CouplingScale) -> (Array2<Complex64>, Array2<f64>) {
        let array = AtomArray::line(n, kd, 0.0);
        let opts = BuildOptions {
            scale,
            ..Default::default()
        };
        let mats = build_matrices(&array, None, &opts).unwrap();
        let m = evolution_matrix(&mats, 0.0, DetuningConvention::FromShifted);
        (m, mats.gamma)
    }

    #[test]
    fn single_atom_exact_decay() {
        let (m, gamma) = free_system(1, 1.0, CouplingScale::Physical);
        let beta0 = array![Complex64::new(1.0, 0.0)];
        let fit = fitted_decay_time(&m, &gamma, &beta0).unwrap();
        assert_relative_eq!(fit.tau, 1.0, max_relative = 1e-10);
        assert_relative_eq!(fit.window_end, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn steady_state_solves_governing_equation() {
        let delta = 10.0;
        let rabi = 1e-3;
        let (m1, _) = free_system(1, 1.0, CouplingScale::Physical);
        let m = m1.mapv(|v| v + Complex64::new(0.0, delta));
        let omega = drive_vector(DriveDirection::NormalZ, rabi, 1, 1.0);
        let beta = steady_state(&m, &omega).unwrap();
        // |beta| = (Omega/2) / sqrt(delta^2 + 1/4)
        let expected = 0.5 * rabi / (delta * delta + 0.25).sqrt();
        assert_relative_eq!(beta[0].norm(), expected, max_relative = 1e-12);
        let residual = (&m.dot(&beta)
            - &omega.mapv(|w| Complex64::new(0.0, 0.5) * w))
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        assert!(residual < 1e-18);
    }

    #[test]
    fn symmetric_two_atom_mode_decays_at_collective_rate() {
        let (m, gamma) = free_system(2, 0.2, CouplingScale::Physical);
        let beta0 = array![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let g12 = gamma[[0, 1]];
        assert!(g12 > 0.9); // nearly superradiant at small spacing
        let fit = fitted_decay_time(&m, &gamma, &beta0).unwrap();
        assert_relative_eq!(fit.tau, 1.0 / (1.0 + g12), max_relative = 1e-8);
    }

    #[test]
    fn fluorescence_equals_matrix_identity() {
        let array = AtomArray::line(4, 1.0, 0.5);
        let mats = build_matrices(&array, Some(EPS_RES), &BuildOptions::default()).unwrap();
        let m = evolution_matrix(&mats, 7.0, DetuningConvention::FromShifted);
        let beta = Array1::from_shape_fn(4, |a| Complex64::new(0.3 * a as f64 - 0.2, 0.1 * a as f64));
        let p = fluorescence(&mats.gamma, &beta);
        // Gamma = -(M + M^dagger) regardless of the detuning on the diagonal
        let mb = m.dot(&beta);
        let p_from_m: f64 = -2.0
            * beta
                .iter()
                .zip(mb.iter())
                .map(|(b, v)| (b.conj() * v).re)
                .sum::<f64>();
        assert_relative_eq!(p, p_from_m, max_relative = 1e-12);
    }

    #[test]
    fn exponential_path_matches_eigen_path() {
        let m = array![
            [
                Complex64::new(-0.5, 2.0),
                Complex64::new(0.1, -0.3),
                Complex64::new(0.0, 0.05)
            ],
            [
                Complex64::new(0.1, -0.3),
                Complex64::new(-0.8, 1.0),
                Complex64::new(-0.2, 0.0)
            ],
            [
                Complex64::new(0.0, 0.05),
                Complex64::new(-0.2, 0.0),
                Complex64::new(-0.3, -1.0)
            ]
        ];
        let beta0 = array![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.3, 0.1)
        ];
        let ts = [0.0, 0.37, 1.4, 3.0];
        let eig_path = evolve(&m, &beta0, &ts).unwrap();
        for (&t, via_eig) in ts.iter().zip(&eig_path) {
            let via_expm = expm(&m.mapv(|v| v * t)).unwrap().dot(&beta0);
            for a in 0..3 {
                assert!((via_eig[a] - via_expm[a]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn expm_of_diagonal_is_elementwise() {
        let m = array![
            [Complex64::new(-0.5, 1.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-8.0, -3.0)]
        ];
        let e = expm(&m).unwrap();
        for i in 0..2 {
            assert!((e[[i, i]] - m[[i, i]].exp()).norm() < 1e-13 * m[[i, i]].exp().norm());
        }
        assert!(e[[0, 1]].norm() < 1e-16);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let ts = [0.0, 0.5, 1.0];
        assert!(matches!(
            fit_decay(&ts, &[1.0, 0.5], 1.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            fit_decay(&ts, &[1.0, -0.5, 0.2], 1.0),
            Err(Error::Numeric(_))
        ));
        // growing signal has no decay time
        assert!(matches!(
            fit_decay(&ts, &[1.0, 2.0, 4.0], 1.0),
            Err(Error::Numeric(_))
        ));
        // window so short it contains a single sample
        assert!(matches!(
            fit_decay(&ts, &[1.0, 0.5, 0.25], 0.1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn auto_window_tracks_fast_surface_decay() {
        let (m_free, _) = free_system(3, 1.0, CouplingScale::Reduced);
        assert_relative_eq!(auto_fit_window(&m_free), 1.0, max_relative = 1e-12);

        let array = AtomArray::line(3, 1.0, 0.25);
        let mats = build_matrices(&array, Some(EPS_RES), &BuildOptions::default()).unwrap();
        let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
        let expected = 3.0 / mats.self_rate();
        assert_relative_eq!(auto_fit_window(&m), expected, max_relative = 1e-12);
    }

    #[test]
    fn negative_times_rejected() {
        let (m, _) = free_system(1, 1.0, CouplingScale::Physical);
        let beta0 = array![Complex64::new(1.0, 0.0)];
        assert!(matches!(
            evolve(&m, &beta0, &[-1.0]),
            Err(Error::Config(_))
        ));
    }
}
