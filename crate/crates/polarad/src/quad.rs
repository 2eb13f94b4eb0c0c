//! Adaptive Gauss-Kronrod quadrature (21-point rule) for a vector of
//! complex-valued integrands sharing the same evaluation points.
//!
//! Worst-segment-first refinement with a binary heap, as in QUADPACK's
//! QAGS loop but without extrapolation: the integrands here are smooth on
//! each segment (oscillatory at worst), so plain bisection converges.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BinaryHeap;

// 21-point Kronrod nodes (positive half), embedded 10-point Gauss weights,
// and Kronrod weights. Standard QUADPACK values.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Vec<Complex64>,
    /// per-component absolute error estimate
    pub abs_err: Vec<f64>,
    /// number of GK21 segments evaluated in total
    pub segments: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    err: Vec<f64>,
    key: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key
            .partial_cmp(&other.key)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

fn gk21<F>(f: &F, a: f64, b: f64, dim: usize) -> Segment
where
    F: Fn(f64, &mut [Complex64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fc = vec![Complex64::new(0.0, 0.0); dim];
    let mut flo = vec![Complex64::new(0.0, 0.0); dim];
    let mut fhi = vec![Complex64::new(0.0, 0.0); dim];

    f(center, &mut fc);
    let mut kron: Vec<Complex64> = fc.iter().map(|v| v * WGK[10]).collect();
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];

    for j in 0..10 {
        let dx = half * XGK[j];
        f(center - dx, &mut flo);
        f(center + dx, &mut fhi);
        for i in 0..dim {
            let sum = flo[i] + fhi[i];
            kron[i] += WGK[j] * sum;
            if j % 2 == 1 {
                // odd Kronrod indices are the embedded Gauss nodes
                gauss[i] += WG[j / 2] * sum;
            }
        }
    }

    let value: Vec<Complex64> = kron.iter().map(|v| v * half).collect();
    let err: Vec<f64> = kron
        .iter()
        .zip(gauss.iter())
        .map(|(k, g)| ((k - g) * half).norm())
        .collect();
    let key = err.iter().cloned().fold(0.0f64, f64::max);
    Segment {
        a,
        b,
        value,
        err,
        key,
    }
}

/// Integrate `dim` complex components of `f` over `[a, b]`.
///
/// Refines until every component satisfies
/// `err_i <= max(abs_tol, rel_tol * |I_i|)`, or errors out after
/// `max_subdivisions` bisections.
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult>
where
    F: Fn(f64, &mut [Complex64]),
{
    integrate_with_breakpoints(f, &[a, b], dim, rel_tol, abs_tol, max_subdivisions)
}

/// Same as [`integrate`], seeding the subdivision with fixed interior
/// breakpoints (e.g. near a known pole of the integrand).
pub fn integrate_with_breakpoints<F>(
    f: F,
    points: &[f64],
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult>
where
    F: Fn(f64, &mut [Complex64]),
{
    if points.len() < 2 {
        return Err(Error::Config("integration needs at least two endpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut segments = 0usize;
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Config(format!(
                "integration breakpoints must increase: {} before {}",
                w[0], w[1]
            )));
        }
        heap.push(gk21(&f, w[0], w[1], dim));
        segments += 1;
    }

    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    let mut total_err = vec![0.0f64; dim];
    loop {
        total.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        total_err.iter_mut().for_each(|e| *e = 0.0);
        for seg in heap.iter() {
            for i in 0..dim {
                total[i] += seg.value[i];
                total_err[i] += seg.err[i];
            }
        }
        let converged = (0..dim)
            .all(|i| total_err[i] <= abs_tol.max(rel_tol * total[i].norm()));
        if converged {
            return Ok(QuadResult {
                value: total,
                abs_err: total_err,
                segments,
            });
        }
        if segments >= max_subdivisions {
            return Err(Error::Numeric(format!(
                "quadrature did not converge within {max_subdivisions} segments \
                 (worst component error {:.3e})",
                total_err.iter().cloned().fold(0.0f64, f64::max)
            )));
        }
        let worst = heap.pop().expect("heap cannot be empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(Error::Numeric(format!(
                "quadrature interval [{}, {}] cannot be bisected further",
                worst.a, worst.b
            )));
        }
        heap.push(gk21(&f, worst.a, mid, dim));
        heap.push(gk21(&f, mid, worst.b, dim));
        segments += 1;
    }
}
