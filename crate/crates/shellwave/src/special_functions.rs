//! Scalar special functions with the branch conventions used throughout the
//! crate: the square root with positive imaginary part, tan(w)/w, sin(w)/w,
//! K0/K1 at complex argument and the pair a0/u0.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_RADIUS: f64 = 1e-2;
const POLE_TOL: f64 = 1e-12;
/// Below this modulus K0/K1 use the ascending series, above it Steed's
/// continued fraction.
pub const BESSEL_CROSSOVER: f64 = 2.0;

/// Square root with Im r > 0 off the half line [0, inf), and the
/// nonnegative root on it.
pub fn branch_sqrt(w: C64) -> C64 {
    if w.im == 0.0 && w.re >= 0.0 {
        return C64::new(w.re.sqrt(), 0.0);
    }
    let r = w.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// tan(w)/w with value 1 at the origin.
pub fn tanc(w: C64) -> Result<C64> {
    let k = ((w.re - FRAC_PI_2) / PI).round();
    let pole = C64::new(k * PI + FRAC_PI_2, 0.0);
    if (w - pole).norm() < POLE_TOL {
        return Err(Error::Pole(format!("{w}")));
    }
    if w.norm() < SERIES_RADIUS {
        let w2 = w * w;
        let c = [
            1.0,
            1.0 / 3.0,
            2.0 / 15.0,
            17.0 / 315.0,
            62.0 / 2835.0,
            1382.0 / 155925.0,
        ];
        return Ok(horner(&c, w2));
    }
    if w.re == 0.0 {
        let x = w.im;
        return Ok(C64::new(x.tanh() / x, 0.0));
    }
    Ok(w.tan() / w)
}

/// sin(w)/w with value 1 at the origin.
pub fn sinc_c(w: C64) -> C64 {
    if w.norm() < SERIES_RADIUS {
        let w2 = w * w;
        let c = [
            1.0,
            -1.0 / 6.0,
            1.0 / 120.0,
            -1.0 / 5040.0,
            1.0 / 362880.0,
            -1.0 / 39916800.0,
        ];
        return horner(&c, w2);
    }
    w.sin() / w
}

pub fn sinc(x: f64) -> f64 {
    sinc_c(C64::new(x, 0.0)).re
}

fn horner(c: &[f64], x: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * x + ck)
}

/// Modified Bessel function of the second kind, order 0 or 1, principal branch.
pub fn mod_bessel_k(order: u32, w: C64) -> Result<C64> {
    if order > 1 {
        return Err(Error::Domain(format!("order {order} not in {{0,1}}")));
    }
    if w.norm() == 0.0 {
        return Err(Error::Domain("K_nu at w = 0".into()));
    }
    if w.im == 0.0 && w.re < 0.0 {
        return Err(Error::Domain(format!("{w} on the branch cut")));
    }
    // the continued fraction is only used in the right half-plane
    let (k0, k1) = if w.norm() <= BESSEL_CROSSOVER || w.re < 0.0 {
        k01_series(w)
    } else {
        k01_steed(w)?
    };
    Ok(if order == 0 { k0 } else { k1 })
}

/// Both K0 and K1 from the ascending series (A&S 9.6.13, 9.6.11).
pub fn k01_series(w: C64) -> (C64, C64) {
    let y = w * w * 0.25;
    let lg = (w * 0.5).ln();
    let mut term0 = C64::new(1.0, 0.0); // (y^k)/(k!)^2
    let mut term1 = C64::new(1.0, 0.0); // (y^k)/(k!(k+1)!)
    let mut i0 = C64::new(0.0, 0.0);
    let mut i1s = C64::new(0.0, 0.0);
    let mut k0tail = C64::new(0.0, 0.0);
    let mut k1tail = C64::new(0.0, 0.0);
    let mut h = 0.0; // harmonic number H_k
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            term0 *= y / (kf * kf);
            term1 *= y / (kf * (kf + 1.0));
            h += 1.0 / kf;
        }
        i0 += term0;
        i1s += term1;
        k0tail += term0 * h;
        // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
        k1tail += term1 * (2.0 * h + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if term0.norm() * (1.0 + h) < 1e-18 * i0.norm() && k > 2 {
            break;
        }
    }
    let k0 = -(lg + EULER_GAMMA) * i0 + k0tail;
    let i1 = w * 0.5 * i1s;
    let k1 = w.inv() + lg * i1 - w * 0.25 * k1tail;
    (k0, k1)
}

/// K0 and K1 from Steed's continued fraction (Temme's CF2) for Re w > 0.
/// Converges quickly once |w| >= 2, also close to the imaginary axis.
pub fn k01_steed(w: C64) -> Result<(C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let mut b = (one + w) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = C64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = C64::new(0.25, 0.0);
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 1..20000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + a * d).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).norm() < 2.0 * f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Domain(format!("continued fraction stalled at {w}")));
    }
    h *= a1;
    let k0 = (C64::new(PI, 0.0) / (w * 2.0)).sqrt() * (-w).exp() / s;
    let k1 = k0 * (w + 0.5 - h) / w;
    Ok((k0, k1))
}

/// a0(u) = -u cot u on [pi/2, pi).
pub fn a0(u: f64) -> Result<f64> {
    if !(FRAC_PI_2..PI).contains(&u) {
        return Err(Error::Domain(format!("a0 needs u in [pi/2, pi), got {u}")));
    }
    Ok(a0_raw(u))
}

fn a0_raw(u: f64) -> f64 {
    -u * u.cos() / u.sin()
}

/// Inverse of a0: the unique u in [pi/2, pi) with -u cot u = a.
pub fn u0(a: f64) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("u0 needs a >= 0, got {a}")));
    }
    if a == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let mut lo = FRAC_PI_2;
    let mut hi = PI - 1e-9;
    while a0_raw(hi) < a {
        let next = PI - (PI - hi) * 0.1;
        if next >= PI {
            return Err(Error::Domain(format!("a = {a} beyond double resolution")));
        }
        lo = hi;
        hi = next;
    }
    let tol = 1e-12 * a.max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if a0_raw(mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 * (PI - hi).max(1e-300) {
            break;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..50 {
        let f = a0_raw(u) - a;
        if f.abs() <= 0.25 * tol {
            break;
        }
        let sn = u.sin();
        let df = -u.cos() / sn + u / (sn * sn);
        let next = u - f / df;
        u = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if a0_raw(u) < a {
            lo = u;
        } else {
            hi = u;
        }
    }
    Ok(u)
}
