//! Sine eigenbasis on the uniform interior grid of (0, 1). The functions
//! `sqrt(2) sin(m pi x)` are orthonormal in L^2 and exactly orthogonal in
//! the discrete inner product `h sum_j` at `x_j = j/(N+1)` for `m <= N`, so
//! nodal and modal representations convert without loss.

use std::f64::consts::{PI, SQRT_2};

pub(crate) struct SineBasis {
    n: usize,
    /// `sin(pi k / (n+1))` for `k` in `0..2(n+1)`; by periodicity
    /// `sin(m pi x_j)` is `table[m j mod 2(n+1)]`.
    table: Vec<f64>,
}

impl SineBasis {
    pub(crate) fn new(n: usize) -> Self {
        let np1 = n + 1;
        let table = (0..2 * np1).map(|k| (PI * k as f64 / np1 as f64).sin()).collect();
        SineBasis { n, table }
    }

    #[inline]
    pub(crate) fn sin_at(&self, m: usize, j: usize) -> f64 {
        self.table[(m * j) % (2 * (self.n + 1))]
    }

    /// Coefficients against `sqrt(2) sin(m pi x)` for `m = 1..=count`;
    /// exact on the grid when `count <= n`.
    pub(crate) fn analyze(&self, nodal: &[f64], count: usize) -> Vec<f64> {
        debug_assert_eq!(nodal.len(), self.n);
        let h = 1.0 / (self.n + 1) as f64;
        (1..=count)
            .map(|m| {
                let s: f64 =
                    nodal.iter().enumerate().map(|(i, &v)| v * self.sin_at(m, i + 1)).sum();
                SQRT_2 * h * s
            })
            .collect()
    }

    /// Nodal samples of `sum_m coeffs[m-1] sqrt(2) sin(m pi x)`.
    pub(crate) fn synthesize_into(&self, coeffs: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        for (i, slot) in out.iter_mut().enumerate() {
            let j = i + 1;
            let mut s = 0.0;
            for (m, &c) in coeffs.iter().enumerate() {
                s += c * self.sin_at(m + 1, j);
            }
            *slot = SQRT_2 * s;
        }
    }

    pub(crate) fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.synthesize_into(coeffs, &mut out);
        out
    }
}

/// Exact conservative evolution of mode coefficients to time `t`: the pair
/// for mode `m` rotates at frequency `m pi`. Shorter inputs are padded
/// with zeros.
pub fn evolve_conservative(w0: &[f64], v0: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let count = w0.len().max(v0.len());
    let mut w = Vec::with_capacity(count);
    let mut v = Vec::with_capacity(count);
    for m in 1..=count {
        let om = m as f64 * PI;
        let a = w0.get(m - 1).copied().unwrap_or(0.0);
        let b = v0.get(m - 1).copied().unwrap_or(0.0);
        let (s, c) = (om * t).sin_cos();
        w.push(a * c + b / om * s);
        v.push(-a * om * s + b * c);
    }
    (w, v)
}
