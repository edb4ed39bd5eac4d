//! Dense linear-algebra helpers: operator norms and extreme eigenvalues of
//! Hermitian operators via Lanczos, and low-rank norms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Dense SVD is used up to this dimension, Lanczos beyond.
const DENSE_LIMIT: usize = 160;

fn start_vector(n: usize) -> CVec {
    let v = CVec::from_fn(n, |j, _| {
        let t = j as f64;
        C64::new((1.7 * t + 0.3).sin() + 1.1, (2.3 * t).cos() * 0.5)
    });
    let nrm = v.norm();
    v / C64::new(nrm, 0.0)
}

/// Smallest and largest eigenvalue of a Hermitian operator given by its action.
pub fn lanczos_extremes(n: usize, apply: &dyn Fn(&CVec) -> CVec, tol: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let kmax = n.min(400);
    let mut basis: Vec<CVec> = Vec::with_capacity(kmax);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut v = start_vector(n);
    let mut prev = (f64::NAN, f64::NAN);
    for k in 0..kmax {
        basis.push(v.clone());
        let mut w = apply(&v);
        let a = v.dotc(&w).re;
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w.axpy(-c, b, C64::new(1.0, 0.0));
            }
        }
        let bn = w.norm();
        let done = bn <= 1e-14 * alpha.iter().fold(1e-300f64, |m, x| m.max(x.abs()));
        if k % 5 == 4 || done || k + 1 == kmax {
            let ext = tridiag_extremes(&alpha, &beta);
            let scale = ext.0.abs().max(ext.1.abs()).max(1e-300);
            if done
                || ((ext.0 - prev.0).abs() <= tol * scale && (ext.1 - prev.1).abs() <= tol * scale)
            {
                return ext;
            }
            prev = ext;
        }
        if done {
            break;
        }
        beta.push(bn);
        v = w / C64::new(bn, 0.0);
    }
    tridiag_extremes(&alpha, &beta)
}

fn tridiag_extremes(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let ev = SymmetricEigen::new(t).eigenvalues;
    (ev.min(), ev.max())
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return 0.0;
    }
    if r.min(c) <= DENSE_LIMIT {
        return a.clone().singular_values().max();
    }
    let ah = a.adjoint();
    let apply = |v: &CVec| &ah * (a * v);
    lanczos_extremes(c, &apply, 1e-13).1.max(0.0).sqrt()
}

/// Smallest singular value of a square matrix.
pub fn min_singular(a: &CMat) -> f64 {
    let n = a.nrows();
    if n <= DENSE_LIMIT {
        return a.clone().singular_values().min();
    }
    let ah = a.adjoint();
    let apply = |v: &CVec| &ah * (a * v);
    let (lo, hi) = lanczos_extremes(n, &apply, 1e-13);
    if lo > 1e-8 * hi {
        return lo.max(0.0).sqrt();
    }
    // nearly singular: work with the inverse instead of the Gram matrix
    match a.clone().lu().try_inverse() {
        Some(inv) => 1.0 / op_norm(&inv),
        None => 0.0,
    }
}

/// Largest |eigenvalue| of a Hermitian matrix.
pub fn hermitian_radius(a: &CMat) -> f64 {
    let n = a.nrows();
    if n <= DENSE_LIMIT {
        return a.clone().symmetric_eigenvalues().amax();
    }
    let apply = |v: &CVec| a * v;
    let (lo, hi) = lanczos_extremes(n, &apply, 1e-13);
    lo.abs().max(hi.abs())
}

/// Norm of the product U V for tall U (n x r) and wide V (r x m).
pub fn factored_norm(u: &CMat, v: &CMat) -> f64 {
    let qu = u.clone().qr();
    let qv = v.adjoint().qr();
    let core = qu.r() * qv.r().adjoint();
    core.singular_values().max()
}
