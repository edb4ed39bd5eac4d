//! Fiberized Krein resolvent formulas on the flat interface (theta = 2):
//! the squeezed potential V q(x/eps)/eps (optionally with the magnetic
//! term), the delta-shell limit, fiber norms, sup over fibers and rate fits.
//!
//! The slab integral equation is solved by product integration on Gauss
//! panels in the scaled variable t = x/eps, so kernel jumps at t = s and at
//! t = y/eps are integrated exactly rather than smeared.

use crate::coupling_calculus::{
    classify, inverse_design, rescale_magnetic, rescale_squeezed, ClassVariant, Coupling,
};
use crate::dirac_algebra::CMat;
use crate::error::{Error, Result};
use crate::fiber_operators::{coupling_matrix, KernelMatrix, ProfileQ, QuadratureGrid};
use crate::green_kernels::{fiber_green_signed, FiberContext};
use crate::linalg::op_norm;
use crate::parallel::{try_par_map, Exec};
use crate::quadrature::PanelGrid;
use num_complex::Complex64 as C64;

const SLAB_P: usize = 16;
const OUTER_P: usize = 12;
const DECAY_MARGIN: f64 = 20.0;
const TRUNCATION_TOL: f64 = 1e-8;

fn ci(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_planar(ctx: &FiberContext) -> Result<()> {
    if ctx.theta != 2 {
        return Err(Error::Dimension(format!("resolvent assembly is planar only, got theta = {}", ctx.theta)));
    }
    Ok(())
}

/// Truncated transverse axis [-L, L] with composite Gauss panels: breaks at
/// 0 and +-eps, slab panels no wider than ~1.5/Im k, outer panels no wider
/// than 3/|k|.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseGrid {
    pub half_width: f64,
    pub eps: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TransverseGrid {
    /// Decay-adapted grid: L = eps + 20/Im k.
    pub fn for_fiber(ctx: &FiberContext, eps: f64) -> Result<Self> {
        let kappa = ctx.k().im;
        Self::with_half_width(ctx, eps, eps + DECAY_MARGIN / kappa)
    }

    pub fn with_half_width(ctx: &FiberContext, eps: f64, l: f64) -> Result<Self> {
        if !(eps >= 0.0) || !(l > eps) {
            return Err(Error::Domain(format!("need 0 <= eps < L, got eps = {eps}, L = {l}")));
        }
        let k = ctx.k();
        let kappa = k.im;
        if (-kappa * (l - eps)).exp() >= TRUNCATION_TOL {
            return Err(Error::Truncation(format!(
                "e^(-Im k (L - eps)) = {:e} with Im k = {kappa}, L = {l}",
                (-kappa * (l - eps)).exp()
            )));
        }
        let mut right = vec![0.0];
        if eps > 0.0 {
            let n = ((eps * kappa / 1.5).ceil() as usize).max(1);
            right.extend((1..=n).map(|j| eps * j as f64 / n as f64));
        }
        let start = *right.last().unwrap();
        let n_out = (((l - start) * k.norm() / 3.0).ceil() as usize).max(2);
        right.extend((1..=n_out).map(|j| start + (l - start) * j as f64 / n_out as f64));

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let push_side = |sgn: f64, nodes: &mut Vec<f64>, weights: &mut Vec<f64>| {
            for w in right.windows(2) {
                let p = if w[1] <= eps + 1e-15 * l { SLAB_P } else { OUTER_P };
                let (x, v) = crate::quadrature::gauss_on(w[0], w[1], p);
                for (a, b) in x.into_iter().zip(v) {
                    nodes.push(sgn * a);
                    weights.push(b);
                }
            }
        };
        push_side(-1.0, &mut nodes, &mut weights);
        push_side(1.0, &mut nodes, &mut weights);
        let mut idx: Vec<usize> = (0..nodes.len()).collect();
        idx.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
        Ok(TransverseGrid {
            half_width: l,
            eps,
            nodes: idx.iter().map(|&i| nodes[i]).collect(),
            weights: idx.iter().map(|&i| weights[i]).collect(),
        })
    }

    pub fn n_x(&self) -> usize {
        self.nodes.len()
    }

    /// Weight the raw kernel on the nodes into an L^2 operator matrix.
    pub fn weigh(&self, raw: CMat) -> KernelMatrix {
        let sw: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let mut m = raw;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                m[(r, c)] *= sw[r / 2] * sw[c / 2];
            }
        }
        KernelMatrix { mat: m, n_nodes: self.n_x(), n_spin: 2 }
    }
}

fn put_block(m: &mut CMat, r: usize, c: usize, b: &CMat) {
    for a in 0..2 {
        for d in 0..2 {
            m[(2 * r + a, 2 * c + d)] = b[(a, d)];
        }
    }
}

/// Raw kernel of the free fiber resolvent, G(x - y), with G(0) averaged.
pub fn free_kernel(ctx: &FiberContext, xs: &[f64], ys: &[f64]) -> CMat {
    let mut m = CMat::zeros(2 * xs.len(), 2 * ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            put_block(&mut m, i, j, &fiber_green_signed(ctx, x - y));
        }
    }
    m
}

/// The slab problem (I + B_eps Q q) f = g in the variable t in (-1, 1).
struct Slab<'a> {
    k: C64,
    pp: CMat,
    pm: CMat,
    eps: f64,
    coupling: CMat,
    q: &'a ProfileQ,
    panels: usize,
}

impl<'a> Slab<'a> {
    fn new(ctx: &FiberContext, coupling: CMat, q: &'a ProfileQ, eps: f64) -> Self {
        let (pp, pm) = ctx.green_parts();
        let k = ctx.k();
        let panels = ((k.norm() * eps * 2.0 / 3.0).ceil() as usize).max(2);
        Slab { k, pp, pm, eps, coupling, q, panels }
    }

    fn grid(&self, extra: Option<f64>) -> PanelGrid {
        let e: Vec<f64> = extra.into_iter().filter(|t| t.abs() < 1.0).collect();
        PanelGrid::uniform_with(-1.0, 1.0, self.panels, &e, SLAB_P)
    }

    /// Q q(s_j) at every node.
    fn qblocks(&self, g: &PanelGrid) -> Vec<CMat> {
        g.nodes.iter().map(|&s| &self.coupling * ci(self.q.eval(s), 0.0)).collect()
    }

    fn expo(&self, d: f64) -> C64 {
        (ci(0.0, 1.0) * self.k * (self.eps * d)).exp()
    }

    /// LU factors of the product-integration matrix for I + B Q q.
    fn factor(&self, g: &PanelGrid, qb: &[CMat]) -> Result<nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>> {
        let n = g.len();
        let mut m = CMat::identity(2 * n, 2 * n);
        for i in 0..n {
            let ti = g.nodes[i];
            let (l, r) = g.split_weights(ti, &|s| self.expo(ti - s), &|s| self.expo(s - ti));
            for j in 0..n {
                let blk = (&self.pp * l[j] + &self.pm * r[j]) * &qb[j];
                for a in 0..2 {
                    for b in 0..2 {
                        m[(2 * i + a, 2 * j + b)] += blk[(a, b)];
                    }
                }
            }
        }
        let lu = m.lu();
        let diag_min = lu.u().diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let diag_max = lu.u().diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(diag_min > 0.0) || diag_max / diag_min > 1e12 {
            return Err(Error::Singular(diag_max / diag_min));
        }
        Ok(lu)
    }

    /// Row functional x -> A_eps(x) Q q, as a 2 x 2n matrix.
    fn a_row(&self, g: &PanelGrid, qb: &[CMat], x: f64) -> CMat {
        let n = g.len();
        let mut row = CMat::zeros(2, 2 * n);
        let i1 = ci(0.0, 1.0);
        if x.abs() >= self.eps {
            let (p, sg) = if x > 0.0 { (&self.pp, 1.0) } else { (&self.pm, -1.0) };
            let base = (i1 * self.k * x.abs()).exp();
            for j in 0..n {
                let w = base * (-i1 * self.k * (sg * self.eps * g.nodes[j])).exp() * g.weights[j];
                let blk = p * w * &qb[j];
                row.view_mut((0, 2 * j), (2, 2)).copy_from(&blk);
            }
        } else {
            let tau = x / self.eps;
            let (l, r) = g.split_weights(
                tau,
                &|s| (i1 * self.k * (x - self.eps * s)).exp(),
                &|s| (i1 * self.k * (self.eps * s - x)).exp(),
            );
            for j in 0..n {
                let blk = (&self.pp * l[j] + &self.pm * r[j]) * &qb[j];
                row.view_mut((0, 2 * j), (2, 2)).copy_from(&blk);
            }
        }
        row
    }

    fn a_rows(&self, g: &PanelGrid, qb: &[CMat], xs: &[f64]) -> CMat {
        let mut m = CMat::zeros(2 * xs.len(), 2 * g.len());
        for (i, &x) in xs.iter().enumerate() {
            m.view_mut((2 * i, 0), (2, 2 * g.len())).copy_from(&self.a_row(g, qb, x));
        }
        m
    }

    /// Columns g(t) = G(eps t - y) for each y.
    fn rhs(&self, g: &PanelGrid, ys: &[f64], ctx: &FiberContext) -> CMat {
        let mut m = CMat::zeros(2 * g.len(), 2 * ys.len());
        for (j, &y) in ys.iter().enumerate() {
            for (i, &t) in g.nodes.iter().enumerate() {
                put_block(&mut m, i, j, &fiber_green_signed(ctx, self.eps * t - y));
            }
        }
        m
    }

    /// Raw kernel -A (I + B Q q)^{-1} C on xs x ys.
    fn kernel(&self, ctx: &FiberContext, xs: &[f64], ys: &[f64]) -> Result<CMat> {
        let mut out = CMat::zeros(2 * xs.len(), 2 * ys.len());
        let (outside, inside): (Vec<usize>, Vec<usize>) =
            (0..ys.len()).partition(|&j| ys[j].abs() >= self.eps);
        if !outside.is_empty() {
            let g = self.grid(None);
            let qb = self.qblocks(&g);
            let lu = self.factor(&g, &qb)?;
            let yo: Vec<f64> = outside.iter().map(|&j| ys[j]).collect();
            let f = lu.solve(&self.rhs(&g, &yo, ctx)).ok_or(Error::Singular(f64::INFINITY))?;
            let k = -(self.a_rows(&g, &qb, xs) * f);
            for (c, &j) in outside.iter().enumerate() {
                out.columns_mut(2 * j, 2).copy_from(&k.columns(2 * c, 2));
            }
        }
        for &j in &inside {
            let g = self.grid(Some(ys[j] / self.eps));
            let qb = self.qblocks(&g);
            let lu = self.factor(&g, &qb)?;
            let f = lu.solve(&self.rhs(&g, &[ys[j]], ctx)).ok_or(Error::Singular(f64::INFINITY))?;
            let k = -(self.a_rows(&g, &qb, xs) * f);
            out.columns_mut(2 * j, 2).copy_from(&k);
        }
        Ok(out)
    }
}

fn squeezed_coupling(ctx: &FiberContext, c: Coupling, magnetic: bool) -> CMat {
    let v = coupling_matrix(&ctx.rep, c);
    if magnetic {
        v + ctx.normal() * ci(std::f64::consts::PI, 0.0)
    } else {
        v
    }
}

/// Raw kernel of (H_{V_eps}[xi] - z)^{-1} - (H_0[xi] - z)^{-1} at points xs x ys.
pub fn squeezed_kernel(
    ctx: &FiberContext,
    c: Coupling,
    q: &ProfileQ,
    eps: f64,
    magnetic: bool,
    xs: &[f64],
    ys: &[f64],
) -> Result<CMat> {
    check_planar(ctx)?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    if c.eta == 0.0 && c.tau == 0.0 && !magnetic {
        return Ok(CMat::zeros(2 * xs.len(), 2 * ys.len()));
    }
    Slab::new(ctx, squeezed_coupling(ctx, c, magnetic), q, eps).kernel(ctx, xs, ys)
}

pub fn squeezed_correction(
    ctx: &FiberContext,
    c: Coupling,
    q: &ProfileQ,
    eps: f64,
    magnetic: bool,
    _grid: &QuadratureGrid,
    xgrid: &TransverseGrid,
) -> Result<KernelMatrix> {
    Ok(xgrid.weigh(squeezed_kernel(ctx, c, q, eps, magnetic, &xgrid.nodes, &xgrid.nodes)?))
}

/// The 2x2 middle matrix E of the shell kernel -G(x) E G(-y), computed from
/// the squeezed coupling through the eps = 0 slab problem (I + B_0 Q q) u = I.
pub fn shell_middle_b0(ctx: &FiberContext, c: Coupling, q: &ProfileQ, magnetic: bool) -> Result<CMat> {
    check_planar(ctx)?;
    let slab = Slab::new(ctx, squeezed_coupling(ctx, c, magnetic), q, 0.0);
    let g = slab.grid(None);
    let qb = slab.qblocks(&g);
    let lu = slab.factor(&g, &qb)?;
    let n = g.len();
    let mut rhs = CMat::zeros(2 * n, 2);
    for i in 0..n {
        rhs[(2 * i, 0)] = ci(1.0, 0.0);
        rhs[(2 * i + 1, 1)] = ci(1.0, 0.0);
    }
    let u = lu.solve(&rhs).ok_or(Error::Singular(f64::INFINITY))?;
    let mut e = CMat::zeros(2, 2);
    for j in 0..n {
        e += &qb[j] * u.rows(2 * j, 2) * ci(g.weights[j], 0.0);
    }
    Ok(e)
}

/// The same matrix straight from the shell coupling: V~ (I + C_z V~)^{-1}.
pub fn shell_middle_direct(ctx: &FiberContext, shell: Coupling) -> Result<CMat> {
    check_planar(ctx)?;
    let vt = coupling_matrix(&ctx.rep, shell);
    let m = CMat::identity(2, 2) + ctx.boundary_matrix() * &vt;
    let sv = m.singular_values();
    if !(sv.min() > 0.0) || sv.max() / sv.min() > 1e12 {
        return Err(Error::Singular(sv.max() / sv.min()));
    }
    Ok(vt * m.try_inverse().ok_or(Error::Singular(f64::INFINITY))?)
}

/// Raw shell kernel -G(x) E G(-y).
pub fn shell_kernel_from_middle(ctx: &FiberContext, e: &CMat, xs: &[f64], ys: &[f64]) -> CMat {
    let left: Vec<CMat> = xs.iter().map(|&x| fiber_green_signed(ctx, x)).collect();
    let right: Vec<CMat> = ys.iter().map(|&y| e * fiber_green_signed(ctx, -y)).collect();
    let mut m = CMat::zeros(2 * xs.len(), 2 * ys.len());
    for (i, l) in left.iter().enumerate() {
        for (j, r) in right.iter().enumerate() {
            put_block(&mut m, i, j, &-(l * r));
        }
    }
    m
}

fn shell_precheck(c: Coupling) -> Result<Coupling> {
    let vt = rescale_squeezed(c)?;
    if classify(vt).variant == ClassVariant::CriticalShell {
        return Err(Error::Singular(f64::INFINITY));
    }
    Ok(vt)
}

/// Shell correction for the shell coupling rescale_squeezed(c), assembled
/// through the eps = 0 slab problem with the unscaled coupling c.
pub fn shell_correction(
    ctx: &FiberContext,
    c: Coupling,
    q: &ProfileQ,
    _grid: &QuadratureGrid,
    xgrid: &TransverseGrid,
) -> Result<KernelMatrix> {
    shell_precheck(c)?;
    let e = shell_middle_b0(ctx, c, q, false)?;
    Ok(xgrid.weigh(shell_kernel_from_middle(ctx, &e, &xgrid.nodes, &xgrid.nodes)))
}

/// Shell correction directly from a shell coupling V~.
pub fn shell_correction_direct(ctx: &FiberContext, shell: Coupling, xgrid: &TransverseGrid) -> Result<KernelMatrix> {
    let e = shell_middle_direct(ctx, shell)?;
    Ok(xgrid.weigh(shell_kernel_from_middle(ctx, &e, &xgrid.nodes, &xgrid.nodes)))
}

/// The shell coupling the squeezed family converges to.
pub fn limit_shell(c: Coupling, magnetic: bool) -> Result<Coupling> {
    if magnetic {
        rescale_magnetic(c)
    } else {
        shell_precheck(c)
    }
}

/// || squeezed correction - shell correction || on one fiber.
pub fn fiber_difference_norm(
    ctx: &FiberContext,
    c: Coupling,
    q: &ProfileQ,
    eps: f64,
    magnetic: bool,
    grid: &QuadratureGrid,
    xgrid: &TransverseGrid,
) -> Result<f64> {
    if c.eta == 0.0 && c.tau == 0.0 && !magnetic {
        return Ok(0.0);
    }
    let shell = limit_shell(c, magnetic)?;
    let sq = squeezed_correction(ctx, c, q, eps, magnetic, grid, xgrid)?;
    let sh = shell_correction_direct(ctx, shell, xgrid)?;
    Ok(sq.sub(&sh).norm())
}

/// Norm of the shell correction alone, the reference scale for fiber differences.
pub fn shell_norm(ctx: &FiberContext, c: Coupling, magnetic: bool, xgrid: &TransverseGrid) -> Result<f64> {
    Ok(shell_correction_direct(ctx, limit_shell(c, magnetic)?, xgrid)?.norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSup {
    pub value: f64,
    pub argmax_xi: f64,
    pub norms: Vec<(f64, f64)>,
    /// Set when the last three grid values are not strictly decreasing.
    pub tail_warning: bool,
}

/// Default xi grid: 0 followed by n-1 log-spaced points from 1e-2 to xi_max.
pub fn default_xi_grid(xi_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (a, b) = (1e-2f64.ln(), xi_max.max(0.02).ln());
    std::iter::once(0.0)
        .chain((0..n - 1).map(|j| (a + (b - a) * j as f64 / (n - 2).max(1) as f64).exp()))
        .collect()
}

/// max(50, 4 a_sup / (2 eps)) with a_sup = sqrt(max(d, 0)).
pub fn default_xi_max(c: Coupling, eps: f64) -> f64 {
    (4.0 * c.d().max(0.0).sqrt() / (2.0 * eps)).max(50.0)
}

/// Essential sup over the fibers, approximated on `xi_grid`.
pub fn sup_over_fibers(
    base: &FiberContext,
    c: Coupling,
    q: &ProfileQ,
    eps: f64,
    magnetic: bool,
    xi_grid: &[f64],
    grid: &QuadratureGrid,
    exec: Exec,
) -> Result<FiberSup> {
    if xi_grid.is_empty() {
        return Err(Error::Domain("empty xi grid".into()));
    }
    let norms = try_par_map(exec, xi_grid, |&xi| {
        let ctx = FiberContext::planar(base.rep.clone(), base.m, base.z, xi)?;
        let xg = TransverseGrid::for_fiber(&ctx, eps)?;
        Ok((xi, fiber_difference_norm(&ctx, c, q, eps, magnetic, grid, &xg)?))
    })?;
    let (argmax_xi, value) = norms
        .iter()
        .cloned()
        .fold((xi_grid[0], f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let n = norms.len();
    let tail_warning = n < 3 || !(norms[n - 1].1 < norms[n - 2].1 && norms[n - 2].1 < norms[n - 3].1);
    Ok(FiberSup { value, argmax_xi, norms, tail_warning })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub points: Vec<(f64, f64)>,
}

/// Least-squares line through (log eps, log norm).
pub fn rate_fit(eps_list: &[f64], norms: &[f64]) -> Result<RateFit> {
    if eps_list.len() != norms.len() {
        return Err(Error::Dimension("eps and norm lists differ in length".into()));
    }
    if eps_list.len() < 4 {
        return Err(Error::Domain(format!("need at least 4 points, got {}", eps_list.len())));
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0]) || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Domain("eps values must be positive and strictly decreasing".into()));
    }
    if let Some(v) = norms.iter().find(|v| !(**v > 1e-14)) {
        return Err(Error::DegenerateFit(format!("norm {v} too small to take a logarithm")));
    }
    let points: Vec<(f64, f64)> = eps_list.iter().zip(norms).map(|(e, v)| (e.ln(), v.ln())).collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = points.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok(RateFit { slope, intercept, max_abs_residual, points })
}

/// Gauge phase w_eps(x) = exp(i pi int_{-1}^{x/eps} q).
pub fn gauge_phase(q: &ProfileQ, eps: f64, x: f64) -> C64 {
    (ci(0.0, std::f64::consts::PI * q.primitive(x / eps))).exp()
}

/// Residual of the magnetic gauge identity
/// K_mag = conj(w) K w + (conj(w) R_0 w - R_0) on the transverse grid.
pub fn gauge_residual(
    ctx: &FiberContext,
    c: Coupling,
    q: &ProfileQ,
    eps: f64,
    xgrid: &TransverseGrid,
) -> Result<f64> {
    let xs = &xgrid.nodes;
    let km = squeezed_kernel(ctx, c, q, eps, true, xs, xs)?;
    let kv = squeezed_kernel(ctx, c, q, eps, false, xs, xs)?;
    let w: Vec<C64> = xs.iter().map(|&x| gauge_phase(q, eps, x)).collect();
    let mut diff = km;
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let f = w[i].conj() * w[j];
            let g0 = if i == j { CMat::zeros(2, 2) } else { fiber_green_signed(ctx, xs[i] - xs[j]) * (f - 1.0) };
            for a in 0..2 {
                for b in 0..2 {
                    diff[(2 * i + a, 2 * j + b)] -= kv[(2 * i + a, 2 * j + b)] * f + g0[(a, b)];
                }
            }
        }
    }
    Ok(op_norm(&xgrid.weigh(diff).mat))
}

/// Residual of the sign-flip equivalence between the shell couplings V~ and
/// (-4/d~) V~. The left side comes from V~ directly; the right side from the
/// squeezed preimage of (-4/d~) V~ through the eps = 0 slab problem.
pub fn unitary_equivalence_residual(
    ctx: &FiberContext,
    target: Coupling,
    q: &ProfileQ,
    _grid: &QuadratureGrid,
    xgrid: &TransverseGrid,
) -> Result<f64> {
    let dt = target.d();
    if dt.abs() <= 4.0 + 1e-10 {
        return Err(Error::CriticalTarget(format!("unitary equivalence needs |d~| > 4, got {dt}")));
    }
    let conj = target.scaled(-4.0 / dt);
    let (pre, needs_mag) = inverse_design(conj)?;
    debug_assert!(!needs_mag);
    let xs = &xgrid.nodes;
    let left = shell_kernel_from_middle(ctx, &shell_middle_direct(ctx, target)?, xs, xs);
    let inner = shell_kernel_from_middle(ctx, &shell_middle_b0(ctx, pre, q, false)?, xs, xs);
    let sgn: Vec<f64> = xs.iter().map(|&x| if x < 0.0 { 1.0 } else { -1.0 }).collect();
    let mut diff = left;
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let s = sgn[i] * sgn[j];
            let g0 = if s < 0.0 { fiber_green_signed(ctx, xs[i] - xs[j]) * ci(-2.0, 0.0) } else { CMat::zeros(2, 2) };
            for a in 0..2 {
                for b in 0..2 {
                    diff[(2 * i + a, 2 * j + b)] -= inner[(2 * i + a, 2 * j + b)] * s + g0[(a, b)];
                }
            }
        }
    }
    Ok(op_norm(&xgrid.weigh(diff).mat))
}
