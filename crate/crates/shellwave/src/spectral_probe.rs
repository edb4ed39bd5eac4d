//! Zero modes of the fiber operators
//! -i s1 d/dx + xi s2 + m s3 + (eta + tau s3) chi_(-eps,eps)/(2 eps)
//! for d = eta^2 - tau^2 > pi^2/4, and the shell-side exclusion test.

use crate::coupling_calculus::{Coupling, CLASS_TOL};
use crate::dirac_algebra::{fiber_transfer, pauli, FiberTransferMatrices};
use crate::error::{Error, Result};
use crate::special_functions::{a0, sinc, sinc_c, u0};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const BISECTION_TOL: f64 = 1e-12;
const CONDITION_GATE: f64 = 1e-8;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// cos(mu) + (d - mu^2 - 2 eps tau m)/sqrt(d - mu^2 - 4 eps tau m) sinc(mu).
pub fn zero_mode_condition(mu: f64, d: f64, eps: f64, tau: f64, m: f64) -> Result<f64> {
    let rad = d - mu * mu - 4.0 * eps * tau * m;
    if !(rad > 0.0) {
        return Err(Error::Domain(format!("d - mu^2 - 4 eps tau m = {rad} <= 0")));
    }
    Ok(mu.cos() + (d - mu * mu - 2.0 * eps * tau * m) / rad.sqrt() * sinc(mu))
}

fn excluded_d(d: f64) -> bool {
    let k = (d.sqrt() / PI - 1.0) / 2.0;
    let kr = k.round();
    kr >= 0.0 && (((2.0 * kr + 1.0) * PI).powi(2) - d).abs() <= CLASS_TOL * d.max(1.0)
}

fn check_hypotheses(d: f64) -> Result<()> {
    if !(d > PI * PI / 4.0) {
        return Err(Error::Hypothesis(format!("zero modes need d > pi^2/4, got d = {d}")));
    }
    if excluded_d(d) {
        return Err(Error::Hypothesis(format!("d = {d} is an excluded value (2k+1)^2 pi^2")));
    }
    Ok(())
}

/// F(a) = a - (d - u0(a)^2 - 2 eps tau m)/sqrt(d - u0(a)^2 - 4 eps tau m).
pub fn f_a_eps(a: f64, d: f64, tau: f64, m: f64, eps: f64) -> Result<f64> {
    let u = u0(a)?;
    let rad = d - u * u - 4.0 * eps * tau * m;
    if !(rad > 0.0) {
        return Err(Error::EpsTooLarge(format!("radicand {rad} <= 0 at a = {a}")));
    }
    Ok(a - (d - u * u - 2.0 * eps * tau * m) / rad.sqrt())
}

/// Root of F in (0, a0(b_eps)) together with every bisection midpoint visited.
pub fn solve_a_eps_traced(d: f64, tau: f64, m: f64, eps: f64) -> Result<(f64, Vec<f64>)> {
    check_hypotheses(d)?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let b2 = d.min(PI * PI) - 4.0 * eps * ((tau * m).abs() + 1.0);
    if !(b2 > PI * PI / 4.0) || b2.sqrt() >= PI {
        return Err(Error::EpsTooLarge(format!("b_eps^2 = {b2} leaves (pi/2, pi)")));
    }
    let mut hi = a0(b2.sqrt())?;
    let mut lo = 0.0;
    let f_lo = f_a_eps(lo, d, tau, m, eps)?;
    let f_hi = f_a_eps(hi, d, tau, m, eps)?;
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::EpsTooLarge(format!("F(0) = {f_lo}, F(a0(b_eps)) = {f_hi}: no sign change")));
    }
    let mut trace = Vec::new();
    while hi - lo > BISECTION_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        trace.push(mid);
        if f_a_eps(mid, d, tau, m, eps)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), trace))
}

pub fn solve_a_eps(d: f64, tau: f64, m: f64, eps: f64) -> Result<f64> {
    solve_a_eps_traced(d, tau, m, eps).map(|r| r.0)
}

/// xi_eps = sqrt(d - u0(a)^2 - 4 eps^2 m^2 - 4 eps tau m)/(2 eps).
pub fn xi_eps(d: f64, tau: f64, m: f64, eps: f64, a_eps: f64) -> Result<f64> {
    let u = u0(a_eps)?;
    let rad = d - u * u - 4.0 * eps * eps * m * m - 4.0 * eps * tau * m;
    if !(rad > 0.0) || !(eps > 0.0) {
        return Err(Error::Domain(format!("xi_eps radicand {rad} <= 0")));
    }
    Ok(rad.sqrt() / (2.0 * eps))
}

/// mu_{xi,eps} = sqrt(d - 4 eps^2 (xi^2 + m^2) - 4 eps tau m), possibly imaginary.
pub fn mu_of(xi: f64, eps: f64, cpl: Coupling, m: f64) -> C64 {
    crate::special_functions::branch_sqrt(c(
        cpl.d() - 4.0 * eps * eps * (xi * xi + m * m) - 4.0 * eps * cpl.tau * m,
        0.0,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeCertificate {
    pub xi: f64,
    pub eps: f64,
    pub m: f64,
    pub coupling: Coupling,
    /// The a with mu = u0(a), i.e. the ratio in the zero-mode condition.
    pub a_eps: f64,
    pub mu: f64,
    pub c1: C64,
    pub c3: C64,
    pub w1: Vector2<C64>,
    pub w2: Vector2<C64>,
    pub w3: Vector2<C64>,
    pub residual_condition: f64,
    pub residual_ode: f64,
    pub residual_continuity: f64,
    pub residual_decay: f64,
    tm: FiberTransferMatrices,
}

impl ZeroModeCertificate {
    /// u(x) on the three pieces.
    pub fn eval(&self, x: f64) -> Vector2<C64> {
        if x < -self.eps {
            self.tm.exp_a(x) * self.w1
        } else if x <= self.eps {
            self.tm.exp_b(x) * self.w2
        } else {
            self.tm.exp_a(x) * self.w3
        }
    }

    /// (H u)(x) with the derivative by central differences of step h.
    pub fn apply_h(&self, x: f64, h: f64) -> Vector2<C64> {
        let du = (self.eval(x + h) - self.eval(x - h)) / c(2.0 * h, 0.0);
        let i = c(0.0, 1.0);
        let mut pot = pauli(2) * c(self.xi, 0.0) + pauli(3) * c(self.m, 0.0);
        if x.abs() < self.eps {
            pot += (pauli(0) * c(self.coupling.eta, 0.0) + pauli(3) * c(self.coupling.tau, 0.0)) / c(2.0 * self.eps, 0.0);
        }
        -(pauli(1) * du) * i + pot * self.eval(x)
    }
}

/// Build and certify the kernel element of H_{V_eps}[xi] for q = chi/2.
pub fn build_zero_mode(xi: f64, eps: f64, cpl: Coupling, m: f64) -> Result<ZeroModeCertificate> {
    let tm = fiber_transfer(xi, m, cpl.eta, cpl.tau, eps)?;
    let mu = tm.mu;
    let d = cpl.d();
    let two_eu = 2.0 * eps * tm.upsilon;
    let ratio = (d - mu * mu - 2.0 * eps * cpl.tau * m) / two_eu;
    let cond = (mu.cos() + ratio * sinc_c(mu)).norm();
    if !(cond <= CONDITION_GATE) {
        return Err(Error::ConditionNotMet(cond));
    }
    if mu.im.abs() > 0.0 {
        return Err(Error::ConditionNotMet(cond));
    }
    let a_plus = tm.a_plus()?;
    let a_minus = tm.a_minus()?;
    let i = c(0.0, 1.0);
    let v = pauli(0) * c(cpl.eta, 0.0) + pauli(3) * c(cpl.tau, 0.0);
    let c3 = c(1.0, 0.0);
    let proj = a_plus.dotc(&((pauli(1) * v * i) * a_minus));
    let c1 = c3 * proj * sinc_c(mu) / a_plus.norm_squared();
    let w1 = a_plus * c1;
    let w3 = a_minus * c3;
    let w2 = tm.exp_b(eps) * tm.exp_a(-eps) * w1;

    let left = (tm.exp_a(-eps) * w1 - tm.exp_b(-eps) * w2).norm();
    let right = (tm.exp_a(eps) * w3 - tm.exp_b(eps) * w2).norm();
    let scale = (tm.exp_b(-eps) * w2).norm().max((tm.exp_b(eps) * w2).norm());
    let residual_continuity = left.max(right) / scale;
    let ups = tm.upsilon;
    let residual_decay = ((tm.a * a_plus - a_plus * c(ups, 0.0)).norm() / (ups * a_plus.norm()))
        .max((tm.a * a_minus + a_minus * c(ups, 0.0)).norm() / (ups * a_minus.norm()));

    let mut cert = ZeroModeCertificate {
        xi,
        eps,
        m,
        coupling: cpl,
        a_eps: ratio.re,
        mu: mu.re,
        c1,
        c3,
        w1,
        w2,
        w3,
        residual_condition: cond,
        residual_ode: f64::NAN,
        residual_continuity,
        residual_decay,
        tm,
    };
    cert.residual_ode = ode_residual(&cert, 200);
    Ok(cert)
}

/// max |H u| / max |u| over `n` points of [-L, L], L = eps + 8/upsilon,
/// skipping 1e-4 neighbourhoods of the interfaces.
fn ode_residual(cert: &ZeroModeCertificate, n: usize) -> f64 {
    let l = cert.eps + 8.0 / cert.tm.upsilon;
    let h = 1e-7 * l.min(1.0);
    let xs: Vec<f64> = (0..n)
        .map(|j| -l + 2.0 * l * (j as f64 + 0.5) / n as f64)
        .filter(|x| (x.abs() - cert.eps).abs() > 1e-4)
        .collect();
    let umax = xs.iter().map(|&x| cert.eval(x).norm()).fold(0.0, f64::max);
    let scale = umax * (cert.tm.upsilon + cert.mu / (2.0 * cert.eps));
    xs.iter().map(|&x| cert.apply_h(x, h).norm()).fold(0.0, f64::max) / scale
}

/// The quoted sufficient criterion for 0 not in the shell spectrum:
/// m != 0 and (d~ - 4) m tau~ <= 0.
pub fn shell_zero_excluded(m: f64, target: Coupling) -> Result<bool> {
    if (target.d() - 4.0).abs() <= CLASS_TOL {
        return Err(Error::CriticalTarget(format!("d~ = {}", target.d())));
    }
    Ok(m != 0.0 && (target.d() - 4.0) * m * target.tau <= 0.0)
}

/// Smallest singular value of the 2x2 system that matches the decaying
/// solutions on both sides of the shell at energy 0 and momentum xi
/// (normalised eigenvectors, so 0 means a fiber zero mode).
pub fn shell_fiber_min_singular(xi: f64, m: f64, target: Coupling) -> Result<f64> {
    let tm = fiber_transfer(xi, m, 0.0, 0.0, 1.0)?;
    let ap = tm.a_plus()?;
    let am = tm.a_minus()?;
    let (ap, am) = (ap / c(ap.norm(), 0.0), am / c(am.norm(), 0.0));
    let i = c(0.0, 1.0);
    let half_v = (pauli(0) * c(target.eta, 0.0) + pauli(3) * c(target.tau, 0.0)) / c(2.0, 0.0);
    // Omega_+ = {x < 0}: i s1 (u(0-) - u(0+)) + V~/2 (u(0-) + u(0+)) = 0
    let col1 = (pauli(1) * i + half_v) * ap;
    let col2 = (-pauli(1) * i + half_v) * am;
    let m2 = Matrix2::from_columns(&[col1, col2]);
    Ok(m2.singular_values().min())
}

/// Minimum of `shell_fiber_min_singular` over a symmetric log grid |xi| <= xi_max.
pub fn shell_scan(m: f64, target: Coupling, xi_max: f64, n: usize) -> Result<(f64, f64)> {
    let mut best = (f64::INFINITY, 0.0);
    let mut grid = vec![0.0];
    for j in 0..n {
        let x = (1e-3f64.ln() + (xi_max.ln() - 1e-3f64.ln()) * j as f64 / (n - 1).max(1) as f64).exp();
        grid.push(x);
        grid.push(-x);
    }
    for xi in grid {
        if xi == 0.0 && m == 0.0 {
            continue;
        }
        let s = shell_fiber_min_singular(xi, m, target)?;
        if s < best.0 {
            best = (s, xi);
        }
    }
    Ok(best)
}
