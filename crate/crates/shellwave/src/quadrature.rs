//! Gauss-Legendre rules, composite panel grids and product-integration
//! weights for kernels that are smooth on either side of a split point.

use num_complex::Complex64 as C64;

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let pnm1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
    (pn, d)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}

/// Barycentric weights for Lagrange interpolation on arbitrary nodes.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let span = nodes[n - 1] - nodes[0];
    let scale = if span > 0.0 { 4.0 / span } else { 1.0 };
    (0..n)
        .map(|j| {
            let mut p = 1.0;
            for k in 0..n {
                if k != j {
                    p *= (nodes[j] - nodes[k]) * scale;
                }
            }
            1.0 / p
        })
        .collect()
}

/// Values L_j(x) of all Lagrange basis polynomials at x.
pub fn lagrange_row(nodes: &[f64], bw: &[f64], x: f64) -> Vec<f64> {
    if let Some(j) = nodes.iter().position(|&t| t == x) {
        let mut r = vec![0.0; nodes.len()];
        r[j] = 1.0;
        return r;
    }
    let terms: Vec<f64> = nodes.iter().zip(bw).map(|(t, b)| b / (x - t)).collect();
    let s: f64 = terms.iter().sum();
    terms.iter().map(|t| t / s).collect()
}

/// Composite Gauss-Legendre grid with `p` nodes per panel.
#[derive(Debug, Clone)]
pub struct PanelGrid {
    pub breaks: Vec<f64>,
    pub p: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    ref_nodes: Vec<f64>,
    ref_bw: Vec<f64>,
    sub_nodes: Vec<f64>,
    sub_weights: Vec<f64>,
}

impl PanelGrid {
    pub fn new(breaks: Vec<f64>, p: usize) -> Self {
        assert!(breaks.len() >= 2 && breaks.windows(2).all(|w| w[1] > w[0]));
        let (rx, rw) = gauss_legendre(p);
        let mut nodes = Vec::with_capacity(p * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let h = 0.5 * (w[1] - w[0]);
            let c = 0.5 * (w[1] + w[0]);
            for (t, v) in rx.iter().zip(&rw) {
                nodes.push(c + h * t);
                weights.push(v * h);
            }
        }
        let ref_bw = barycentric_weights(&rx);
        let (sub_nodes, sub_weights) = gauss_legendre(p + 8);
        PanelGrid { breaks, p, nodes, weights, ref_nodes: rx, ref_bw, sub_nodes, sub_weights }
    }

    /// Uniform panels on [a, b] with the extra break points `extra` inserted.
    pub fn uniform_with(a: f64, b: f64, panels: usize, extra: &[f64], p: usize) -> Self {
        let mut br: Vec<f64> = (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
        for &e in extra {
            if e > a && e < b {
                br.push(e);
            }
        }
        br.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let span = b - a;
        br.dedup_by(|x, y| (*x - *y).abs() < 1e-9 * span);
        PanelGrid::new(br, p)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    fn panel_of(&self, t: f64) -> Option<usize> {
        if t < self.breaks[0] || t > *self.breaks.last().unwrap() {
            return None;
        }
        let k = self.breaks.partition_point(|&b| b <= t);
        Some(k.saturating_sub(1).min(self.panels() - 1))
    }

    /// Interpolation row of the panel-local Lagrange basis at t (global indexing).
    pub fn interp_row(&self, t: f64) -> Vec<(usize, f64)> {
        let k = self.panel_of(t).expect("point inside the grid");
        let (a, b) = (self.breaks[k], self.breaks[k + 1]);
        let u = (2.0 * t - a - b) / (b - a);
        lagrange_row(&self.ref_nodes, &self.ref_bw, u)
            .into_iter()
            .enumerate()
            .map(|(j, v)| (k * self.p + j, v))
            .collect()
    }

    /// Accumulate into `out` the weights of int_{lo}^{hi} f(s) L_j(s) ds for
    /// the panel k, where [lo, hi] lies inside that panel.
    fn partial_panel(&self, k: usize, lo: f64, hi: f64, f: &dyn Fn(f64) -> C64, out: &mut [C64]) {
        if hi <= lo {
            return;
        }
        let (a, b) = (self.breaks[k], self.breaks[k + 1]);
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        for (t, w) in self.sub_nodes.iter().zip(&self.sub_weights) {
            let s = c + h * t;
            let fs = f(s) * (w * h);
            let u = (2.0 * s - a - b) / (b - a);
            for (j, l) in lagrange_row(&self.ref_nodes, &self.ref_bw, u).iter().enumerate() {
                out[k * self.p + j] += fs * *l;
            }
        }
    }

    /// Weights c_j with int_{-1..1} K(tau, s) phi(s) ds ~ sum_j c_j phi(s_j),
    /// where K = fl(s) for s < tau and fr(s) for s > tau, both smooth.
    /// Returns the two halves (left part, right part) separately.
    pub fn split_weights(
        &self,
        tau: f64,
        fl: &dyn Fn(f64) -> C64,
        fr: &dyn Fn(f64) -> C64,
    ) -> (Vec<C64>, Vec<C64>) {
        let n = self.len();
        let mut left = vec![C64::new(0.0, 0.0); n];
        let mut right = vec![C64::new(0.0, 0.0); n];
        let on_break = self.breaks.contains(&tau);
        let split = if on_break { None } else { self.panel_of(tau) };
        for k in 0..self.panels() {
            if Some(k) == split {
                self.partial_panel(k, self.breaks[k], tau, fl, &mut left);
                self.partial_panel(k, tau, self.breaks[k + 1], fr, &mut right);
                continue;
            }
            let is_left = self.breaks[k + 1] <= tau;
            for j in k * self.p..(k + 1) * self.p {
                let s = self.nodes[j];
                if is_left {
                    left[j] = fl(s) * self.weights[j];
                } else {
                    right[j] = fr(s) * self.weights[j];
                }
            }
        }
        (left, right)
    }
}
