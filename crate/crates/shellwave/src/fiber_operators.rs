//! Nystrom discretisation of the integral operators acting on
//! L^2((-1,1); C^N): the fibers D_{eps,xi'}(z), the auxiliary operator
//! h_{rho,w'}, the sign-kernel operator T, and the norm/inverse toolkit.

use crate::coupling_calculus::Coupling;
use crate::dirac_algebra::{CMat, DiracRep};
use crate::error::{Error, Result};
use crate::green_kernels::FiberContext;
use crate::linalg::{hermitian_radius, min_singular, op_norm};
use crate::quadrature::{barycentric_weights, gauss_legendre, lagrange_row};
use num_complex::Complex64 as C64;

pub const DEFAULT_NODES: usize = 200;
const SINGULAR_COND: f64 = 1e12;

fn ci(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Gauss-Legendre nodes and weights on (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::Domain(format!("quadrature needs n >= 8, got {n}")));
        }
        let (nodes, weights) = gauss_legendre(n);
        Ok(QuadratureGrid { n, nodes, weights })
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid::new(DEFAULT_NODES).expect("default size is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    HalfIndicator,
    Tabulated,
}

/// The transverse profile q >= 0 with unit mass on (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileQ {
    pub kind: ProfileKind,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub sup_norm: f64,
    bw: Vec<f64>,
}

impl ProfileQ {
    /// q = 1/2 on (-1, 1).
    pub fn half_indicator(grid: &QuadratureGrid) -> Self {
        ProfileQ {
            kind: ProfileKind::HalfIndicator,
            nodes: grid.nodes.clone(),
            values: vec![0.5; grid.n],
            sup_norm: 0.5,
            bw: Vec::new(),
        }
    }

    /// Profile from nonnegative samples at the grid nodes, rescaled to unit
    /// mass under the grid quadrature.
    pub fn tabulated(grid: &QuadratureGrid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Dimension(format!("{} samples for {} nodes", values.len(), grid.n)));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Domain("profile samples must be finite and nonnegative".into()));
        }
        let mass: f64 = values.iter().zip(&grid.weights).map(|(v, w)| v * w).sum();
        if !(mass > 0.0) {
            return Err(Error::Domain("profile has zero mass".into()));
        }
        let values: Vec<f64> = values.iter().map(|v| v / mass).collect();
        let sup_norm = values.iter().cloned().fold(0.0, f64::max);
        Ok(ProfileQ {
            kind: ProfileKind::Tabulated,
            nodes: grid.nodes.clone(),
            bw: barycentric_weights(&grid.nodes),
            values,
            sup_norm,
        })
    }

    pub fn from_fn(grid: &QuadratureGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v: Vec<f64> = grid.nodes.iter().map(|&s| f(s)).collect();
        Self::tabulated(grid, &v)
    }

    /// q(s) for any s in [-1, 1]; tabulated profiles are interpolated.
    pub fn eval(&self, s: f64) -> f64 {
        if !(-1.0..=1.0).contains(&s) {
            return 0.0;
        }
        match self.kind {
            ProfileKind::HalfIndicator => 0.5,
            ProfileKind::Tabulated => lagrange_row(&self.nodes, &self.bw, s)
                .iter()
                .zip(&self.values)
                .map(|(l, v)| l * v)
                .sum::<f64>()
                .max(0.0),
        }
    }

    pub fn values_on(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&s| self.eval(s)).collect()
    }

    /// Values at the nodes of `grid` (exact when it is the defining grid).
    pub fn on_grid(&self, grid: &QuadratureGrid) -> Vec<f64> {
        if grid.nodes == self.nodes {
            self.values.clone()
        } else {
            self.values_on(&grid.nodes)
        }
    }

    pub fn mass(&self, grid: &QuadratureGrid) -> f64 {
        self.on_grid(grid).iter().zip(&grid.weights).map(|(v, w)| v * w).sum()
    }

    /// Integral of q over (-1, x), exact for the half indicator.
    pub fn primitive(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        match self.kind {
            ProfileKind::HalfIndicator => 0.5 * (x + 1.0),
            ProfileKind::Tabulated => {
                if x <= -1.0 {
                    return 0.0;
                }
                let (t, w) = crate::quadrature::gauss_on(-1.0, x, 64);
                t.iter().zip(&w).map(|(s, v)| self.eval(*s) * v).sum()
            }
        }
    }
}

/// V = eta I + tau beta in the representation `rep`.
pub fn coupling_matrix(rep: &DiracRep, c: Coupling) -> CMat {
    rep.identity_n() * ci(c.eta, 0.0) + &rep.beta * ci(c.tau, 0.0)
}

/// A discretised operator on L^2((-1,1); C^N), node-major blocks, with the
/// symmetric sqrt(weight) scaling so the matrix 2-norm is the operator norm.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub mat: CMat,
    pub n_nodes: usize,
    pub n_spin: usize,
}

impl KernelMatrix {
    pub fn identity(n_nodes: usize, n_spin: usize) -> Self {
        let d = n_nodes * n_spin;
        KernelMatrix { mat: CMat::identity(d, d), n_nodes, n_spin }
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.mat)
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &KernelMatrix) -> KernelMatrix {
        KernelMatrix { mat: &self.mat - &other.mat, n_nodes: self.n_nodes, n_spin: self.n_spin }
    }

    /// Assemble from a block kernel k(t_i, t_j) with sqrt-weight scaling.
    pub fn assemble(grid: &QuadratureGrid, n_spin: usize, k: impl Fn(usize, usize) -> CMat) -> Self {
        let n = grid.n;
        let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let mut mat = CMat::zeros(n * n_spin, n * n_spin);
        for i in 0..n {
            for j in 0..n {
                let blk = k(i, j);
                let s = ci(sw[i] * sw[j], 0.0);
                for a in 0..n_spin {
                    for b in 0..n_spin {
                        mat[(i * n_spin + a, j * n_spin + b)] = blk[(a, b)] * s;
                    }
                }
            }
        }
        KernelMatrix { mat, n_nodes: n, n_spin }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Discretised D_{eps,xi'}(z): kernel
/// ((alpha~'.xi' + m beta + z)/k + alpha~_theta sign(t-s)) (i/2) e^{i k eps |t-s|}.
pub fn op_frak_d(ctx: &FiberContext, grid: &QuadratureGrid, eps: f64) -> KernelMatrix {
    let k = ctx.k();
    let t = ctx.tangential_part() / k;
    let nu = ctx.normal();
    let half_i = ci(0.0, 0.5);
    let x = &grid.nodes;
    KernelMatrix::assemble(grid, ctx.rep.n, |i, j| {
        let d = x[i] - x[j];
        let e = if eps == 0.0 { ci(1.0, 0.0) } else { (ci(0.0, 1.0) * k * (eps * d.abs())).exp() };
        (&t + &nu * ci(sign(d), 0.0)) * (half_i * e)
    })
}

/// Discretised h_{rho,w'}: kernel (alpha~'.w' + i alpha~_theta sign(t-s)) e^{-rho|t-s|}/2.
pub fn op_frak_h(rho: f64, w_prime: &[f64], grid: &QuadratureGrid, rep: &DiracRep) -> KernelMatrix {
    let aw = rep.alpha_tilde_dot(w_prime);
    let nu = rep.alpha_normal();
    let x = &grid.nodes;
    KernelMatrix::assemble(grid, rep.n, |i, j| {
        let d = x[i] - x[j];
        (&aw + &nu * ci(0.0, sign(d))) * ci(0.5 * (-rho * d.abs()).exp(), 0.0)
    })
}

/// Discretised T(nu): kernel (i/2) sign(t-s) nu.
pub fn op_t(grid: &QuadratureGrid, rep: &DiracRep, nu_matrix: &CMat) -> KernelMatrix {
    let x = &grid.nodes;
    KernelMatrix::assemble(grid, rep.n, |i, j| nu_matrix * ci(0.0, 0.5 * sign(x[i] - x[j])))
}

/// Spectral radius of sqrt(q) h_{rho,w'} sqrt(q).
pub fn volterra_radius(rho: f64, w_prime: &[f64], q: &ProfileQ, grid: &QuadratureGrid, rep: &DiracRep) -> f64 {
    let mut h = op_frak_h(rho, w_prime, grid, rep).mat;
    let sq: Vec<f64> = q.on_grid(grid).iter().map(|v| v.sqrt()).collect();
    let n = rep.n;
    for r in 0..h.nrows() {
        for c in 0..h.ncols() {
            h[(r, c)] *= sq[r / n] * sq[c / n];
        }
    }
    hermitian_radius(&h)
}

/// I + K Q q in the sqrt-weight coordinates.
fn i_plus(k: &KernelMatrix, coupling: &CMat, q: &ProfileQ, grid: &QuadratureGrid) -> Result<CMat> {
    if k.n_nodes != grid.n || coupling.nrows() != k.n_spin {
        return Err(Error::Dimension("kernel, grid and coupling sizes disagree".into()));
    }
    let qv = q.on_grid(grid);
    let ns = k.n_spin;
    let d = k.mat.nrows();
    let mut m = CMat::identity(d, d);
    for j in 0..k.n_nodes {
        let blk = coupling * ci(qv[j], 0.0);
        for c in 0..ns {
            for r in 0..d {
                let mut acc = ci(0.0, 0.0);
                for b in 0..ns {
                    acc += k.mat[(r, j * ns + b)] * blk[(b, c)];
                }
                m[(r, j * ns + c)] += acc;
            }
        }
    }
    Ok(m)
}

/// Norm of (I + K Q q)^{-1}, without forming the inverse.
pub fn inverse_i_plus_norm(k: &KernelMatrix, coupling: &CMat, q: &ProfileQ, grid: &QuadratureGrid) -> Result<f64> {
    let m = i_plus(k, coupling, q, grid)?;
    let smin = min_singular(&m);
    let smax = op_norm(&m);
    if !(smin > 0.0) || smax / smin > SINGULAR_COND {
        return Err(Error::Singular(if smin > 0.0 { smax / smin } else { f64::INFINITY }));
    }
    Ok(1.0 / smin)
}

/// (I + K Q q)^{-1} and its operator norm.
pub fn inverse_i_plus(
    k: &KernelMatrix,
    coupling: &CMat,
    q: &ProfileQ,
    grid: &QuadratureGrid,
) -> Result<(KernelMatrix, f64)> {
    let norm = inverse_i_plus_norm(k, coupling, q, grid)?;
    let m = i_plus(k, coupling, q, grid)?;
    let inv = m.lu().try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
    Ok((KernelMatrix { mat: inv, n_nodes: k.n_nodes, n_spin: k.n_spin }, norm))
}

// 15-point Gauss-Kronrod rule with its embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod on [a, b]; bisects the worst interval until the
/// summed error estimate is below `rel` times the total. None if it never settles.
pub fn adaptive_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> Option<f64> {
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..5000 {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return None;
        }
        if err <= rel * total.abs() || err < 1e-300 {
            return Some(total);
        }
        let (iw, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(iw);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return None;
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    None
}

/// ||k~||_{L^1(R^dim)} for a radial bound k~(|x'-y'|); by the Schur test an
/// upper bound for any kernel dominated by k~.
pub fn schur_bound(kernel_bound: &dyn Fn(f64) -> f64, domain_dim: usize) -> Result<f64> {
    let sphere = match domain_dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => return Err(Error::Dimension(format!("domain dimension {domain_dim}"))),
    };
    // r = t/(1-t) maps [0, 1) onto [0, inf)
    let g = |t: f64| {
        let r = t / (1.0 - t);
        let jac = 1.0 / ((1.0 - t) * (1.0 - t));
        kernel_bound(r) * r.powi(domain_dim as i32 - 1) * jac
    };
    match adaptive_integral(&g, 0.0, 1.0, 1e-11) {
        Some(v) if v.is_finite() && v * sphere <= 1e12 => Ok(v * sphere),
        Some(v) => Err(Error::DivergentBound(v * sphere)),
        None => Err(Error::DivergentBound(f64::INFINITY)),
    }
}
