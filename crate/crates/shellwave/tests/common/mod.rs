//! Finite-difference oracles for the fiber operators, independent of the
//! integral-equation machinery in the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

pub type M2 = Matrix2<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli(j: usize) -> M2 {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match j {
        0 => M2::new(o, z, z, o),
        1 => M2::new(z, o, o, z),
        2 => M2::new(z, -i, i, z),
        _ => M2::new(o, z, z, -o),
    }
}

/// Band matrix with kl sub- and ku super-diagonals, LU with partial pivoting.
pub struct BandLu {
    n: usize,
    kl: usize,
    w: usize,
    data: Vec<C64>,
    piv: Vec<usize>,
    factored: bool,
}

impl BandLu {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        BandLu { n, kl, w, data: vec![c(0.0, 0.0); n * w], piv: vec![0; n], factored: false }
    }

    fn idx(&self, r: usize, col: usize) -> usize {
        let off = col as isize - (r as isize - self.kl as isize);
        debug_assert!(off >= 0 && (off as usize) < self.w, "({r},{col}) outside band");
        r * self.w + off as usize
    }

    pub fn add(&mut self, r: usize, col: usize, v: C64) {
        let i = self.idx(r, col);
        self.data[i] += v;
    }

    fn get(&self, r: usize, col: usize) -> C64 {
        self.data[self.idx(r, col)]
    }

    fn hi(&self, i: usize) -> usize {
        (i + self.w - self.kl - 1).min(self.n - 1)
    }

    pub fn factor(&mut self) {
        let n = self.n;
        for i in 0..n {
            let last = (i + self.kl).min(n - 1);
            let mut p = i;
            for r in i..=last {
                if self.get(r, i).norm() > self.get(p, i).norm() {
                    p = r;
                }
            }
            self.piv[i] = p;
            if p != i {
                for col in i..=self.hi(i) {
                    let (a, b) = (self.idx(i, col), self.idx(p, col));
                    self.data.swap(a, b);
                }
            }
            let d = self.get(i, i);
            assert!(d.norm() > 0.0, "singular band matrix");
            for r in i + 1..=last {
                let l = self.get(r, i) / d;
                let ri = self.idx(r, i);
                self.data[ri] = l;
                if l.norm() == 0.0 {
                    continue;
                }
                for col in i + 1..=self.hi(i) {
                    let v = self.get(i, col);
                    let k = self.idx(r, col);
                    self.data[k] -= l * v;
                }
            }
        }
        self.factored = true;
    }

    pub fn solve(&self, b: &mut [C64]) {
        assert!(self.factored);
        let n = self.n;
        for i in 0..n {
            b.swap(i, self.piv[i]);
            let bi = b[i];
            for r in i + 1..=(i + self.kl).min(n - 1) {
                b[r] -= self.get(r, i) * bi;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for col in i + 1..=self.hi(i) {
                s -= self.get(i, col) * b[col];
            }
            b[i] = s / self.get(i, i);
        }
    }
}

/// First-order Hermitian scheme for -i s1 d/dx + M(x) - z on [-L, L] with
/// nodes x_j = -L + j h, in the basis where the derivative carries s1.
/// `cell(a, b)` returns the average of the Hermitian matrix field M over
/// [a, b]; an optional shell adds V~ delta acting on the two-sided average.
pub struct FdFiber {
    pub h: f64,
    pub l: f64,
    pub n: usize,
    lu: BandLu,
}

impl FdFiber {
    pub fn new(h: f64, l: f64, z: C64, cell: &dyn Fn(f64, f64) -> M2, shell: Option<M2>) -> Self {
        let n = (2.0 * l / h).round() as usize + 1;
        let mut lu = BandLu::new(2 * n, 5, 5);
        let i = c(0.0, 1.0);
        for j in 0..n {
            let x = -l + j as f64 * h;
            let m = cell(x - 0.5 * h, x + 0.5 * h);
            for a in 0..2 {
                for b in 0..2 {
                    lu.add(2 * j + a, 2 * j + b, m[(a, b)]);
                }
                lu.add(2 * j + a, 2 * j + a, -z);
            }
            // row 1: -i (u2(j+1) - u2(j))/h
            lu.add(2 * j, 2 * j + 1, i / h);
            if j + 1 < n {
                lu.add(2 * j, 2 * j + 3, -i / h);
            }
            // row 2: -i (u1(j) - u1(j-1))/h
            lu.add(2 * j + 1, 2 * j, -i / h);
            if j > 0 {
                lu.add(2 * j + 1, 2 * j - 2, i / h);
            }
        }
        if let Some(v) = shell {
            // u1 sits on x_j and u2 effectively on x_j - h/2, so the interface
            // is the u2 node j0: w = ((u1(j0-1) + u1(j0))/2, u2(j0)) are the
            // two-sided averages, and S* V~ S / h gives the exact discrete jump.
            let j0 = (l / h).round() as usize;
            let s: [Vec<(usize, f64)>; 2] = [vec![(2 * j0 - 2, 0.5), (2 * j0, 0.5)], vec![(2 * j0 + 1, 1.0)]];
            for a in 0..2 {
                for b in 0..2 {
                    for &(r, wr) in &s[a] {
                        for &(col, wc) in &s[b] {
                            lu.add(r, col, v[(a, b)] * (wr * wc / h));
                        }
                    }
                }
            }
        }
        lu.factor();
        FdFiber { h, l, n, lu }
    }

    fn pos(&self, x: f64) -> (usize, f64) {
        let t = (x + self.l) / self.h;
        let j = (t.floor() as usize).min(self.n - 2);
        (j, t - j as f64)
    }

    /// Raw resolvent kernel at xs x ys: for each y a smeared delta source,
    /// then linear interpolation in x.
    pub fn kernel(&self, xs: &[f64], ys: &[f64]) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(2 * xs.len(), 2 * ys.len());
        let xpos: Vec<(usize, f64)> = xs.iter().map(|&x| self.pos(x)).collect();
        for (cj, &y) in ys.iter().enumerate() {
            let (j, lam) = self.pos(y);
            for b in 0..2 {
                let mut rhs = vec![c(0.0, 0.0); 2 * self.n];
                rhs[2 * j + b] = c((1.0 - lam) / self.h, 0.0);
                rhs[2 * (j + 1) + b] = c(lam / self.h, 0.0);
                self.lu.solve(&mut rhs);
                for (ri, &(k, mu)) in xpos.iter().enumerate() {
                    for a in 0..2 {
                        out[(2 * ri + a, 2 * cj + b)] = rhs[2 * k + a] * (1.0 - mu) + rhs[2 * (k + 1) + a] * mu;
                    }
                }
            }
        }
        out
    }

    /// Apply (H - z) row by row to a grid function given at all nodes.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| -self.l + j as f64 * self.h).collect()
    }
}

/// Change of basis with U* s2 U = s1: the engine's frame (normal matrix s2)
/// to the oracle's frame (derivative on s1).
pub fn to_oracle_basis() -> M2 {
    M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))
}

/// Conjugate every 2x2 block of a kernel matrix: K -> U K U*.
pub fn conj_blocks(k: &DMatrix<C64>, u: &M2) -> DMatrix<C64> {
    let mut out = k.clone();
    for r in 0..k.nrows() / 2 {
        for s in 0..k.ncols() / 2 {
            let b = M2::new(k[(2 * r, 2 * s)], k[(2 * r, 2 * s + 1)], k[(2 * r + 1, 2 * s)], k[(2 * r + 1, 2 * s + 1)]);
            let t = u * b * u.adjoint();
            for a in 0..2 {
                for d in 0..2 {
                    out[(2 * r + a, 2 * s + d)] = t[(a, d)];
                }
            }
        }
    }
    out
}

/// Composite Gauss grid on [-lc, lc] with breaks at 0 and +-eps.
pub fn comparison_grid(lc: f64, eps: f64, width: f64, p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut br = vec![-lc, lc, 0.0];
    if eps > 0.0 {
        br.push(-eps);
        br.push(eps);
    }
    let mut x = eps.max(0.0);
    loop {
        x += width;
        if x >= lc - 1e-12 {
            break;
        }
        br.push(x);
        br.push(-x);
    }
    br.sort_by(|a, b| a.total_cmp(b));
    br.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let (gx, gw) = shellwave::quadrature::gauss_legendre(p);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in br.windows(2) {
        let (h, m) = (0.5 * (w[1] - w[0]), 0.5 * (w[1] + w[0]));
        for (t, v) in gx.iter().zip(&gw) {
            nodes.push(m + h * t);
            weights.push(v * h);
        }
    }
    (nodes, weights)
}

pub fn weighted_norm(k: &DMatrix<C64>, w: &[f64]) -> f64 {
    let mut m = k.clone();
    for r in 0..m.nrows() {
        for s in 0..m.ncols() {
            m[(r, s)] *= (w[r / 2] * w[s / 2]).sqrt();
        }
    }
    shellwave::linalg::op_norm(&m)
}

/// Second-order staggered scheme for the fiber operator in the sigma_1-normal frame at z = 0:
/// -i s1 d/dx + xi s2 + m s3 + (eta + tau s3) chi_(-eps,eps)/(2 eps).
/// u1 on x_j = -L + j h, u2 on x_j + h/2. Returns the smallest |eigenvalue|
/// (= smallest singular value, the matrix being Hermitian) by inverse iteration.
pub fn staggered_min_singular(xi: f64, m: f64, eta: f64, tau: f64, eps: f64, h: f64, l: f64) -> f64 {
    let n = (2.0 * l / h).round() as usize + 1;
    let i = c(0.0, 1.0);
    let frac = |a: f64, b: f64| ((b.min(eps) - a.max(-eps)).max(0.0)) / (b - a);
    let mut lu = BandLu::new(2 * n - 1, 1, 1);
    for j in 0..n {
        let x = -l + j as f64 * h;
        // u1 row: -i (u2(j+1/2) - u2(j-1/2))/h - i xi avg(u2) + (m + (eta + tau) chi/(2 eps)) u1
        let p1 = m + (eta + tau) / (2.0 * eps) * frac(x - 0.5 * h, x + 0.5 * h);
        lu.add(2 * j, 2 * j, c(p1, 0.0));
        if j + 1 < n {
            lu.add(2 * j, 2 * j + 1, -i / h - i * xi / 2.0);
        }
        if j > 0 {
            lu.add(2 * j, 2 * j - 1, i / h - i * xi / 2.0);
        }
        if j + 1 < n {
            // u2 row at x + h/2
            let p2 = -m + (eta - tau) / (2.0 * eps) * frac(x, x + h);
            lu.add(2 * j + 1, 2 * j + 1, c(p2, 0.0));
            lu.add(2 * j + 1, 2 * j, i / h + i * xi / 2.0);
            lu.add(2 * j + 1, 2 * j + 2, -i / h + i * xi / 2.0);
        }
    }
    lu.factor();
    let dim = 2 * n - 1;
    let mut v: Vec<C64> = (0..dim).map(|k| c(1.0 + (k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
    let mut lam = f64::INFINITY;
    for _ in 0..60 {
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= nv;
        }
        let mut w = v.clone();
        lu.solve(&mut w);
        let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let new = 1.0 / nw;
        let done = (new - lam).abs() <= 1e-10 * new;
        lam = new;
        v = w;
        if done {
            break;
        }
    }
    lam
}

/// Breaks on [0, t_max]: geometric near 0 (first width `h0`), then `cap`-wide.
fn graded_breaks(h0: f64, cap: f64, t_max: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut w = h0;
    while *b.last().unwrap() < t_max {
        let next = (b.last().unwrap() + w).min(t_max);
        b.push(next);
        w = (w * 1.6).min(cap);
    }
    b
}

fn gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    shellwave::quadrature::gauss_legendre(n)
}

/// Numerical partial Fourier transform of the full Green's function along the
/// interface: int e^{-i xi'.x'} G_z(kappa (x', s)) dx'.
pub fn partial_fourier(rep: &shellwave::dirac_algebra::DiracRep, z: C64, m: f64, xi: &[f64], s: f64) -> DMatrix<C64> {
    use shellwave::green_kernels::green_full;
    use shellwave::special_functions::branch_sqrt;
    let theta = rep.theta;
    let decay = branch_sqrt(z * z - m * m).im;
    let t_max = 40.0 / decay;
    let breaks = graded_breaks((s.abs() / 4.0).min(0.05), 0.5, t_max);
    let (x0, w0) = gl(20);
    let mut radial = Vec::new();
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        for (x, w) in x0.iter().zip(&w0) {
            radial.push((a + (b - a) * (x + 1.0) / 2.0, w * (b - a) / 2.0));
        }
    }
    let point = |tang: &[f64]| -> Vec<f64> {
        let mut loc = tang.to_vec();
        loc.push(s);
        (0..theta).map(|i| (0..theta).map(|j| rep.frame[(i, j)] * loc[j]).sum()).collect()
    };
    let mut acc = DMatrix::<C64>::zeros(rep.n, rep.n);
    let i = c(0.0, 1.0);
    if theta == 2 {
        for &(t, w) in &radial {
            for sgn in [1.0, -1.0] {
                let tt = sgn * t;
                let g = green_full(rep, z, m, &point(&[tt])).unwrap();
                acc += g * ((-i * xi[0] * tt).exp() * w);
            }
        }
    } else {
        let nphi = 256;
        let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
        for &(r, w) in &radial {
            for k in 0..nphi {
                let phi = k as f64 * dphi;
                let tang = [r * phi.cos(), r * phi.sin()];
                let g = green_full(rep, z, m, &point(&tang)).unwrap();
                let ph = (-i * (xi[0] * tang[0] + xi[1] * tang[1])).exp();
                acc += g * (ph * (w * r * dphi));
            }
        }
    }
    acc
}

/// Relative gaps between the library's fiber resolvent correction (squeezed
/// or shell) and the finite-difference oracle, one per step in `hs`.
pub fn krein_fd_gaps(
    cpl: shellwave::coupling_calculus::Coupling,
    eps: f64,
    xi: f64,
    magnetic: bool,
    shell: bool,
    hs: &[f64],
) -> Vec<f64> {
    use shellwave::dirac_algebra::{dirac_rep, to_fixed};
    use shellwave::fiber_operators::{coupling_matrix, ProfileQ, QuadratureGrid};
    use shellwave::green_kernels::FiberContext;
    use shellwave::resolvent_engine::{limit_shell, shell_kernel_from_middle, shell_middle_direct, squeezed_kernel};

    let z = c(0.0, 1.0);
    let g = QuadratureGrid::new(40).unwrap();
    let q = ProfileQ::half_indicator(&g);
    let ctx = FiberContext::planar(dirac_rep(2, None).unwrap(), 1.0, z, xi).unwrap();
    let (xs, ws) = comparison_grid(6.0, if shell { 0.0 } else { eps }, 0.5, 8);
    let limit = limit_shell(cpl, magnetic).unwrap();
    let kk = if shell {
        let e = shell_middle_direct(&ctx, limit).unwrap();
        shell_kernel_from_middle(&ctx, &e, &xs, &xs)
    } else {
        squeezed_kernel(&ctx, cpl, &q, eps, magnetic, &xs, &xs).unwrap()
    };
    let u = to_oracle_basis();
    let kk_v = conj_blocks(&kk, &u.adjoint());
    let rep = &ctx.rep;
    let mxi = to_fixed(&(rep.alpha_tilde_dot(&ctx.xi_vec()) + &rep.beta * c(1.0, 0.0)));
    let mut qm = to_fixed(&coupling_matrix(rep, cpl));
    if magnetic {
        qm += to_fixed(&rep.alpha_normal()) * c(std::f64::consts::PI, 0.0);
    }
    let mv = u.adjoint() * mxi * u;
    let qv = u.adjoint() * qm * u;
    let shell_m = shell.then(|| u.adjoint() * to_fixed(&coupling_matrix(rep, limit)) * u);
    let base = weighted_norm(&kk_v, &ws);
    hs.iter()
        .map(|&h| {
            let cell_v = |a: f64, b: f64| {
                if shell {
                    return mv;
                }
                let frac = (b.min(eps) - a.max(-eps)).max(0.0) / (b - a);
                mv + qv * c(frac * 0.5 / eps, 0.0)
            };
            let cell_0 = |_a: f64, _b: f64| mv;
            let fv = FdFiber::new(h, 12.0, z, &cell_v, shell_m);
            let f0 = FdFiber::new(h, 12.0, z, &cell_0, None);
            let kfd = fv.kernel(&xs, &xs) - f0.kernel(&xs, &xs);
            weighted_norm(&(&kfd - &kk_v), &ws) / base
        })
        .collect()
}

/// A random unit vector in R^dim.
pub fn random_unit(dim: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// A random nonnegative profile: either the half indicator, or a sum of
/// bumps on top of a one-sided step, normalised to unit mass.
pub fn random_profile(
    grid: &shellwave::fiber_operators::QuadratureGrid,
    rng: &mut impl rand::Rng,
) -> shellwave::fiber_operators::ProfileQ {
    use shellwave::fiber_operators::ProfileQ;
    if rng.random_bool(0.25) {
        return ProfileQ::half_indicator(grid);
    }
    let bumps: Vec<(f64, f64, f64)> = (0..rng.random_range(1..4))
        .map(|_| (rng.random_range(0.1..1.0), rng.random_range(-0.9..0.9), rng.random_range(0.1..0.6)))
        .collect();
    let step = rng.random_range(0.0..0.5);
    ProfileQ::from_fn(grid, |s| {
        let b: f64 = bumps.iter().map(|(a, c0, w)| a * (-((s - c0) / w).powi(2)).exp()).sum();
        b + if s < 0.0 { step } else { 0.0 }
    })
    .unwrap()
}

/// A random coupling with 0 <= d < pi^2/4.
pub fn random_subcritical(rng: &mut impl rand::Rng) -> shellwave::coupling_calculus::Coupling {
    use shellwave::coupling_calculus::{classify, ClassVariant, Coupling};
    loop {
        let eta = rng.random_range(-1.55..1.55);
        let tau = rng.random_range(-1.0..1.0) * eta;
        let cpl = Coupling::new(eta, tau);
        if classify(cpl).variant == ClassVariant::Subcritical {
            return cpl;
        }
    }
}

/// A random proper rotation of R^theta.
pub fn random_frame(theta: usize, rng: &mut impl rand::Rng) -> DMatrix<f64> {
    if theta == 2 {
        return shellwave::dirac_algebra::planar_rotation(rng.random_range(0.0..std::f64::consts::TAU));
    }
    let mut q = DMatrix::from_fn(theta, theta, |_, _| rng.random_range(-1.0..1.0)).qr().q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Relative gap between `fiber_green` and the numerical partial Fourier
/// transform at a random (frame, z, m, xi', s).
pub fn random_fourier_gap(theta: usize, rng: &mut impl rand::Rng) -> f64 {
    use shellwave::green_kernels::{fiber_green, FiberContext};
    let rep = shellwave::dirac_algebra::dirac_rep(theta, Some(random_frame(theta, rng))).unwrap();
    let z = c(rng.random_range(-1.0..1.0), rng.random_range(0.5..1.5));
    let m = rng.random_range(0.0..2.0);
    let xi: Vec<f64> = (0..theta - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
    let s = rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mag = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let w: Vec<f64> = xi.iter().map(|v| v / mag).collect();
    let num = partial_fourier(&rep, z, m, &xi, s);
    let ctx = FiberContext::new(rep, m, z, mag, w).unwrap();
    let g = fiber_green(&ctx, s).unwrap();
    (num - &g).camax() / g.camax()
}
