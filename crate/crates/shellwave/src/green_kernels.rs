//! Free Dirac Green's functions in the plane and in space, and their partial
//! Fourier transform along a flat interface (the fiber kernel).

use crate::dirac_algebra::{CMat, DiracRep};
use crate::error::{Error, Result};
use crate::special_functions::{branch_sqrt, mod_bessel_k};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn ci(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// G_z(x) of (-i alpha.grad + m beta - z)^{-1} in the unrotated coordinates.
pub fn green_full(rep: &DiracRep, z: C64, m: f64, x: &[f64]) -> Result<CMat> {
    if x.len() != rep.theta {
        return Err(Error::Dimension(format!("point of length {} for theta = {}", x.len(), rep.theta)));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::Origin);
    }
    let n = rep.n;
    let id = CMat::identity(n, n);
    let xc: Vec<C64> = x.iter().map(|&v| ci(v, 0.0)).collect();
    let ax = rep.alpha_raw(&xc);
    let sq = branch_sqrt(z * z - m * m);
    let i = ci(0.0, 1.0);
    if rep.theta == 2 {
        let w = -i * sq * r;
        let k0 = mod_bessel_k(0, w)?;
        let k1 = mod_bessel_k(1, w)?;
        Ok(ax * (sq * k1 / (2.0 * PI * r)) + (&rep.beta * ci(m, 0.0) + id * z) * (k0 / (2.0 * PI)))
    } else {
        let e = (i * sq * r).exp() / (4.0 * PI * r);
        Ok((id * z + &rep.beta * ci(m, 0.0) + ax * (i * (ci(1.0, 0.0) - i * sq * r) / (r * r))) * e)
    }
}

/// Parameters of one fiber: dimension, mass, spectral parameter, tangential
/// momentum |xi'| w' and the Dirac representation (with its frame).
#[derive(Debug, Clone)]
pub struct FiberContext {
    pub theta: usize,
    pub m: f64,
    pub z: C64,
    pub xi_mag: f64,
    pub w_prime: Vec<f64>,
    pub rep: DiracRep,
}

impl FiberContext {
    pub fn new(rep: DiracRep, m: f64, z: C64, xi_mag: f64, w_prime: Vec<f64>) -> Result<Self> {
        if z.im == 0.0 {
            return Err(Error::Domain(format!("z = {z} must be off the real axis")));
        }
        if w_prime.len() != rep.theta - 1 {
            return Err(Error::Dimension(format!("w' of length {}", w_prime.len())));
        }
        let nrm = w_prime.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("w' not a unit vector (|w'| = {nrm})")));
        }
        if xi_mag < 0.0 {
            return Err(Error::Domain(format!("|xi'| = {xi_mag} < 0")));
        }
        Ok(FiberContext { theta: rep.theta, m, z, xi_mag, w_prime, rep })
    }

    /// Planar fiber with signed tangential momentum xi (w' = sign xi).
    pub fn planar(rep: DiracRep, m: f64, z: C64, xi: f64) -> Result<Self> {
        let w = if xi < 0.0 { -1.0 } else { 1.0 };
        Self::new(rep, m, z, xi.abs(), vec![w])
    }

    pub fn xi_vec(&self) -> Vec<f64> {
        self.w_prime.iter().map(|w| w * self.xi_mag).collect()
    }

    /// k = sqrt(z^2 - m^2 - |xi'|^2), Im k > 0.
    pub fn k(&self) -> C64 {
        branch_sqrt(self.z * self.z - self.m * self.m - self.xi_mag * self.xi_mag)
    }

    /// alpha~'.xi' + m beta + z.
    pub fn tangential_part(&self) -> CMat {
        self.rep.alpha_tilde_dot(&self.xi_vec()) + &self.rep.beta * ci(self.m, 0.0) + self.rep.identity_n() * self.z
    }

    pub fn normal(&self) -> CMat {
        self.rep.alpha_normal()
    }

    /// The two constant matrices P+- with fiber_green(s) = P_{sign s} e^{i k |s|}.
    pub fn green_parts(&self) -> (CMat, CMat) {
        let half_i = ci(0.0, 0.5);
        let t = self.tangential_part() / self.k();
        let nu = self.normal();
        ((&t + &nu) * half_i, (&t - &nu) * half_i)
    }

    /// The boundary operator fiber C_z(xi') = (alpha~'.xi' + m beta + z) i/(2k).
    pub fn boundary_matrix(&self) -> CMat {
        self.tangential_part() * (ci(0.0, 0.5) / self.k())
    }

    pub fn with_xi(&self, xi_mag: f64) -> Self {
        let mut c = self.clone();
        c.xi_mag = xi_mag;
        c
    }

    pub fn with_z(&self, z: C64) -> Self {
        let mut c = self.clone();
        c.z = z;
        c
    }
}

/// ((alpha~'.xi' + m beta + z)/k + alpha~_theta sign s) (i/2) e^{i k |s|},
/// stored without the (2 pi)^{-(theta-1)/2} Fourier normalisation.
pub fn fiber_green(ctx: &FiberContext, s: f64) -> Result<CMat> {
    if s == 0.0 {
        return Err(Error::ZeroDisplacement);
    }
    Ok(fiber_green_signed(ctx, s))
}

/// Like `fiber_green` but with sign(0) = 0 (the average of both sides).
pub fn fiber_green_signed(ctx: &FiberContext, s: f64) -> CMat {
    let (pp, pm) = ctx.green_parts();
    let e = (ci(0.0, 1.0) * ctx.k() * s.abs()).exp();
    if s > 0.0 {
        pp * e
    } else if s < 0.0 {
        pm * e
    } else {
        (pp + pm) * (e * 0.5)
    }
}
