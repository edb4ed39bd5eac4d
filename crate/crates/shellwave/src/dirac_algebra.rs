//! Dirac matrices in two and three dimensions, rotated frames, closed-form
//! exponentials of matrices with scalar square, and the 2x2 transfer
//! matrices of the one-dimensional zero-mode problem.

use crate::error::{Error, Result};
use crate::special_functions::{branch_sqrt, sinc_c};
use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;

const FRAME_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli(j: usize) -> Matrix2<C64> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match j {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("pauli index {j}"),
    }
}

pub fn to_dyn(m: &Matrix2<C64>) -> CMat {
    CMat::from_fn(2, 2, |r, s| m[(r, s)])
}

pub fn to_fixed(m: &CMat) -> Matrix2<C64> {
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// A representation of the Dirac matrices together with a rotation frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracRep {
    pub theta: usize,
    pub n: usize,
    /// Unrotated alpha_1..alpha_theta.
    pub alphas: Vec<CMat>,
    pub beta: CMat,
    /// Rotation kappa, columns are the images kappa e_j.
    pub frame: DMatrix<f64>,
}

pub fn dirac_rep(theta: usize, frame: Option<DMatrix<f64>>) -> Result<DiracRep> {
    if theta != 2 && theta != 3 {
        return Err(Error::Dimension(format!("theta = {theta}")));
    }
    let frame = frame.unwrap_or_else(|| DMatrix::identity(theta, theta));
    if frame.nrows() != theta || frame.ncols() != theta {
        return Err(Error::Dimension(format!(
            "frame is {}x{}, expected {theta}x{theta}",
            frame.nrows(),
            frame.ncols()
        )));
    }
    let defect = (frame.transpose() * &frame - DMatrix::identity(theta, theta)).amax();
    let det = frame.determinant();
    if defect > FRAME_TOL || (det - 1.0).abs() > FRAME_TOL {
        return Err(Error::Frame(format!("orthogonality defect {defect:e}, det {det}")));
    }
    let (alphas, beta) = if theta == 2 {
        (vec![to_dyn(&pauli(1)), to_dyn(&pauli(2))], to_dyn(&pauli(3)))
    } else {
        let zero = Matrix2::<C64>::zeros();
        let block = |a: &Matrix2<C64>, b: &Matrix2<C64>, cc: &Matrix2<C64>, d: &Matrix2<C64>| {
            let mut m = CMat::zeros(4, 4);
            for r in 0..2 {
                for s in 0..2 {
                    m[(r, s)] = a[(r, s)];
                    m[(r, s + 2)] = b[(r, s)];
                    m[(r + 2, s)] = cc[(r, s)];
                    m[(r + 2, s + 2)] = d[(r, s)];
                }
            }
            m
        };
        let alphas = (1..=3)
            .map(|j| block(&zero, &pauli(j), &pauli(j), &zero))
            .collect();
        let beta = block(&pauli(0), &zero, &zero, &(-pauli(0)));
        (alphas, beta)
    };
    Ok(DiracRep { theta, n: if theta == 2 { 2 } else { 4 }, alphas, beta, frame })
}

/// The rotation by angle `phi` in the plane, as a frame for theta = 2.
pub fn planar_rotation(phi: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[phi.cos(), -phi.sin(), phi.sin(), phi.cos()])
}

impl DiracRep {
    pub fn identity_n(&self) -> CMat {
        CMat::identity(self.n, self.n)
    }

    /// alpha . v for a vector given in the unrotated coordinates.
    pub fn alpha_raw(&self, v: &[C64]) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for (a, &vj) in self.alphas.iter().zip(v) {
            m += a * vj;
        }
        m
    }

    /// alpha~_j = alpha . (kappa e_j), j = 1..theta.
    pub fn alpha_tilde(&self, j: usize) -> CMat {
        let col: Vec<C64> = (0..self.theta).map(|i| c(self.frame[(i, j - 1)], 0.0)).collect();
        self.alpha_raw(&col)
    }

    /// The normal matrix alpha~_theta.
    pub fn alpha_normal(&self) -> CMat {
        self.alpha_tilde(self.theta)
    }

    /// Sum_j alpha~_j v_j over the first `v.len()` rotated directions.
    pub fn alpha_tilde_dot(&self, v: &[f64]) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for (j, &vj) in v.iter().enumerate() {
            m += self.alpha_tilde(j + 1) * c(vj, 0.0);
        }
        m
    }
}

/// Sum_j alpha~_j v_j with the rotated family of `rep`.
pub fn alpha_dot(rep: &DiracRep, v: &[C64]) -> Result<CMat> {
    if v.len() != rep.theta {
        return Err(Error::Dimension(format!("vector of length {} for theta = {}", v.len(), rep.theta)));
    }
    let mut m = CMat::zeros(rep.n, rep.n);
    for (j, &vj) in v.iter().enumerate() {
        m += rep.alpha_tilde(j + 1) * vj;
    }
    Ok(m)
}

/// exp(M) for M with M^2 = s I, as cosh(r) I + sinh(r)/r M with r^2 = s.
pub fn scalar_square_exp(m: &CMat, s: C64) -> Result<CMat> {
    let n = m.nrows();
    let defect = (m * m - CMat::identity(n, n) * s).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > 1e-10 * s.norm().max(1.0) {
        return Err(Error::SquareNotScalar(defect));
    }
    let r = branch_sqrt(s);
    let ir = r * c(0.0, 1.0);
    // cosh r = cos(ir), sinh(r)/r = sin(ir)/(ir)
    Ok(CMat::identity(n, n) * ir.cos() + m * sinc_c(ir))
}

/// Fixed-size variant for the 2x2 transfer matrices.
pub fn scalar_square_exp2(m: &Matrix2<C64>, s: C64) -> Result<Matrix2<C64>> {
    Ok(to_fixed(&scalar_square_exp(&to_dyn(m), s)?))
}

/// The matrices of the first-order system u' = A u (free) and u' = B u
/// (inside the slab) for the fiber operator
/// -i s1 d/dx + xi s2 + m s3 + (eta + tau s3) chi/(2 eps) at energy zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberTransferMatrices {
    pub a: Matrix2<C64>,
    pub b: Matrix2<C64>,
    pub xi: f64,
    pub m: f64,
    pub eta: f64,
    pub tau: f64,
    pub eps: f64,
    /// sqrt(xi^2 + m^2)
    pub upsilon: f64,
    /// branch_sqrt(d - 4 eps^2 upsilon^2 - 4 eps tau m)
    pub mu: C64,
}

pub fn fiber_transfer(xi: f64, m: f64, eta: f64, tau: f64, eps: f64) -> Result<FiberTransferMatrices> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let i = c(0.0, 1.0);
    let a = Matrix2::new(c(xi, 0.0), i * m, -i * m, c(-xi, 0.0));
    let v = pauli(0) * c(eta, 0.0) + pauli(3) * c(tau, 0.0);
    let b = a - pauli(1) * v * (i / (2.0 * eps));
    let upsilon = xi.hypot(m);
    let d = eta * eta - tau * tau;
    let mu = branch_sqrt(c(d - 4.0 * eps * eps * upsilon * upsilon - 4.0 * eps * tau * m, 0.0));
    Ok(FiberTransferMatrices { a, b, xi, m, eta, tau, eps, upsilon, mu })
}

impl FiberTransferMatrices {
    /// Eigenvector of A for +upsilon, left unnormalized.
    pub fn a_plus(&self) -> Result<Vector2<C64>> {
        self.check_nondegenerate()?;
        Ok(Vector2::new(c(0.0, -self.m), c(self.xi - self.upsilon, 0.0)))
    }

    /// Eigenvector of A for -upsilon, left unnormalized.
    pub fn a_minus(&self) -> Result<Vector2<C64>> {
        self.check_nondegenerate()?;
        Ok(Vector2::new(c(self.xi - self.upsilon, 0.0), c(0.0, -self.m)))
    }

    fn check_nondegenerate(&self) -> Result<()> {
        // A = 0 here and the two eigenvalues coincide
        if self.m == 0.0 && self.xi == 0.0 {
            return Err(Error::DegenerateFiber("xi = m = 0".into()));
        }
        Ok(())
    }

    /// exp(x A), using A^2 = upsilon^2 I.
    pub fn exp_a(&self, x: f64) -> Matrix2<C64> {
        let s = c((x * self.upsilon).powi(2), 0.0);
        scalar_square_exp2(&(self.a * c(x, 0.0)), s).expect("A^2 is scalar")
    }

    /// exp(x B), using (2 i eps B)^2 = mu^2 I.
    pub fn exp_b(&self, x: f64) -> Matrix2<C64> {
        let s = -(self.mu * self.mu) * (x / (2.0 * self.eps)).powi(2);
        scalar_square_exp2(&(self.b * c(x, 0.0)), s).expect("B^2 is scalar")
    }
}
