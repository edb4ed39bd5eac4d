//! Coupling constants (eta, tau), their classification by d = eta^2 - tau^2,
//! the squeezed and magnetic rescalings, their inverse, and the constant C2
//! bounding the auxiliary inverses.

use crate::error::{Error, Result};
use crate::special_functions::tanc;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

pub const CLASS_TOL: f64 = 1e-10;

/// Electrostatic strength `eta` and Lorentz-scalar strength `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub eta: f64,
    pub tau: f64,
}

impl Coupling {
    pub fn new(eta: f64, tau: f64) -> Self {
        Coupling { eta, tau }
    }

    pub fn d(&self) -> f64 {
        self.eta * self.eta - self.tau * self.tau
    }

    pub fn scaled(&self, f: f64) -> Coupling {
        Coupling::new(self.eta * f, self.tau * f)
    }

    /// |eta| + |tau|
    pub fn l1(&self) -> f64 {
        self.eta.abs() + self.tau.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassVariant {
    Subcritical,
    SupercriticalNoncritical,
    CriticalShell,
    ScalingSingular,
    /// d < 0. This label is ours; the regime is unnamed in the literature.
    Hyperbolic,
}

impl ClassVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ClassVariant::Subcritical => "Subcritical",
            ClassVariant::SupercriticalNoncritical => "SupercriticalNoncritical",
            ClassVariant::CriticalShell => "CriticalShell",
            ClassVariant::ScalingSingular => "ScalingSingular",
            ClassVariant::Hyperbolic => "Hyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingClass {
    pub variant: ClassVariant,
    pub d: f64,
    pub d_tilde: Option<f64>,
}

/// Nearest odd k with |d - k^2 pi^2 / 4| small, as the distance.
fn dist_to_odd_square(d: f64, scale: f64) -> f64 {
    if d < 0.0 {
        return f64::INFINITY;
    }
    let r = d.sqrt() / (PI / 2.0 * scale);
    let k = ((r - 1.0) / 2.0).round().max(0.0);
    let odd = 2.0 * k + 1.0;
    (d - (odd * PI / 2.0 * scale).powi(2)).abs()
}

/// d~ = 4 tan^2(sqrt(d)/2), with the tanh form for d < 0.
pub fn d_tilde_of(d: f64) -> f64 {
    if d < 0.0 {
        -4.0 * ((-d).sqrt() / 2.0).tanh().powi(2)
    } else {
        4.0 * (d.sqrt() / 2.0).tan().powi(2)
    }
}

pub fn classify(c: Coupling) -> CouplingClass {
    let d = c.d();
    // (2k+1)^2 pi^2 = zeros of cos(sqrt(d)/2)
    if dist_to_odd_square(d, 2.0) <= CLASS_TOL {
        return CouplingClass { variant: ClassVariant::ScalingSingular, d, d_tilde: None };
    }
    let variant = if dist_to_odd_square(d, 1.0) <= CLASS_TOL {
        ClassVariant::CriticalShell
    } else if d < 0.0 {
        ClassVariant::Hyperbolic
    } else if d < PI * PI / 4.0 {
        ClassVariant::Subcritical
    } else {
        ClassVariant::SupercriticalNoncritical
    };
    let d_tilde = if variant == ClassVariant::CriticalShell { 4.0 } else { d_tilde_of(d) };
    CouplingClass { variant, d, d_tilde: Some(d_tilde) }
}

/// The factor tanc(sqrt(d)/2) of the squeezed rescaling.
pub fn squeezed_factor(d: f64) -> Result<f64> {
    if dist_to_odd_square(d, 2.0) <= CLASS_TOL {
        return Err(Error::ScalingSingular(d));
    }
    if d < 0.0 {
        let x = (-d).sqrt() / 2.0;
        return Ok(if x == 0.0 { 1.0 } else { x.tanh() / x });
    }
    tanc(C64::new(d.sqrt() / 2.0, 0.0))
        .map(|t| t.re)
        .map_err(|_| Error::ScalingSingular(d))
}

/// (eta~, tau~) = tanc(sqrt(d)/2) (eta, tau).
pub fn rescale_squeezed(c: Coupling) -> Result<Coupling> {
    Ok(c.scaled(squeezed_factor(c.d())?))
}

/// The factor -2/(sqrt(d) tan(sqrt(d)/2)) of the magnetic rescaling.
pub fn magnetic_factor(d: f64) -> Result<f64> {
    if d.abs() <= CLASS_TOL || d >= PI * PI / 4.0 - CLASS_TOL {
        return Err(Error::Hypothesis(format!("magnetic rescaling needs 0 < |d| and d < pi^2/4, got d = {d}")));
    }
    if d > 0.0 {
        let r = d.sqrt();
        Ok(-2.0 / (r * (r / 2.0).tan()))
    } else {
        // sqrt(d) tan(sqrt(d)/2) = -sqrt|d| tanh(sqrt|d|/2)
        let r = (-d).sqrt();
        Ok(2.0 / (r * (r / 2.0).tanh()))
    }
}

pub fn rescale_magnetic(c: Coupling) -> Result<Coupling> {
    Ok(c.scaled(magnetic_factor(c.d())?))
}

/// Preimage of a shell coupling under the squeezed map (|d~| < 4) or the
/// magnetic map (|d~| > 4). The flag reports which branch was used.
pub fn inverse_design(target: Coupling) -> Result<(Coupling, bool)> {
    let dt = target.d();
    if (dt.abs() - 4.0).abs() <= CLASS_TOL {
        return Err(Error::CriticalTarget(format!("d~ = {dt}")));
    }
    let s = dt.abs().sqrt();
    if dt.abs() < 4.0 {
        // 2 arctan(sqrt(d~)/2)/sqrt(d~), arctan(0)/0 = 1
        let f = if s == 0.0 {
            1.0
        } else if dt > 0.0 {
            2.0 * (s / 2.0).atan() / s
        } else {
            2.0 * (s / 2.0).atanh() / s
        };
        Ok((target.scaled(f), false))
    } else {
        let f = if dt > 0.0 {
            -2.0 * (2.0 / s).atan() / s
        } else {
            2.0 * (2.0 / s).atanh() / s
        };
        Ok((target.scaled(f), true))
    }
}

/// c(d) = 4d/pi^2 for d >= 0 and 0 otherwise.
pub fn volterra_defect(d: f64) -> f64 {
    if d >= 0.0 {
        4.0 * d / (PI * PI)
    } else {
        0.0
    }
}

/// C2 = 4 |q|_inf (|eta|+|tau|)(1 + (|eta|+|tau|) 2/pi) / ((1 - c(d)) pi) + 1.
pub fn bound_c2(c: Coupling, q_sup: f64) -> Result<f64> {
    let d = c.d();
    if d >= PI * PI / 4.0 {
        return Err(Error::Hypothesis(format!("C2 needs d < pi^2/4, got {d}")));
    }
    let l = c.l1();
    Ok(4.0 * q_sup * l * (1.0 + l * 2.0 / PI) / ((1.0 - volterra_defect(d)) * PI) + 1.0)
}
