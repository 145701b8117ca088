//! The `M^d`-point trigonometric cubature baseline and its aliasing sum.
//!
//! Cubature on the uniform grid `x_m = (2m/M - 1) pi`, `m = 1..M`, returns
//! `u_hat(q) + E_q u` where `E_q u = sum_{r != 0} u_hat(q + M r)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::NodalField;
use crate::transform::{Spectrum, WaveSet};

use std::f64::consts::PI;

/// Uniform trigonometric grid with `M` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrigGrid {
    dim: usize,
    points: usize,
}

impl TrigGrid {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if points == 0 || !(1..=3).contains(&dim) {
            return Err(Error::Param(format!("grid needs M >= 1 and d in 1..=3, got M={points}, d={dim}")));
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based per-axis indices of node `i`, axis 1 varying fastest.
    fn indices(&self, mut i: usize) -> Vec<usize> {
        (0..self.dim)
            .map(|_| {
                let m = i % self.points + 1;
                i /= self.points;
                m
            })
            .collect()
    }

    pub fn node(&self, i: usize) -> Vec<f64> {
        let m = self.points as f64;
        self.indices(i).into_iter().map(|mi| (2.0 * mi as f64 / m - 1.0) * PI).collect()
    }

    /// Samples `f` (writing `components` values) at every node, in node order.
    pub fn sample<F>(&self, components: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
    {
        let chunks: Vec<Result<Vec<f64>>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let mut out = vec![0.0; components];
                f(&self.node(i), &mut out)?;
                Ok(out)
            })
            .collect();
        let mut values = Vec::with_capacity(self.len() * components);
        for c in chunks {
            values.extend(c?);
        }
        Ok(values)
    }

    /// `(1/M^d) sum_m u(x_m) exp(-i q.x_m)` for pre-sampled values, summed in
    /// node order.
    pub fn cubature(&self, samples: &[f64], components: usize, waves: &WaveSet) -> Result<Spectrum> {
        if samples.len() != self.len() * components {
            return Err(Error::Shape(format!("{} samples for {} nodes", samples.len(), self.len())));
        }
        if waves.dim() != self.dim {
            return Err(Error::Shape("wave set dimension differs from grid".into()));
        }
        let m = self.points as i64;
        // q.x_m = pi * sum_a q_a (2 m_a - M) / M, reduced modulo 2M
        let period = 2 * m;
        let table: Vec<Complex64> = (0..period)
            .map(|n| {
                let (s, c) = exact_sin_cos(n, m);
                Complex64::new(c, -s)
            })
            .collect();
        let node_idx: Vec<Vec<usize>> = (0..self.len()).map(|i| self.indices(i)).collect();
        let norm = 1.0 / self.len() as f64;
        let values: Vec<Complex64> = (0..waves.len())
            .into_par_iter()
            .flat_map_iter(|w| {
                let q = waves.get(w);
                let mut acc = vec![Complex64::new(0.0, 0.0); components];
                for (i, idx) in node_idx.iter().enumerate() {
                    let n: i64 = idx.iter().zip(q).map(|(&mi, &qa)| qa * (2 * mi as i64 - m)).sum();
                    let e = table[n.rem_euclid(period) as usize];
                    for (c, a) in acc.iter_mut().enumerate() {
                        *a += e * samples[i * components + c];
                    }
                }
                acc.into_iter().map(move |a| a * norm)
            })
            .collect();
        Spectrum::new(waves.clone(), components, values)
    }
}

/// `(sin(pi n / m), cos(pi n / m))` with exact zeros and ones on the axes.
fn exact_sin_cos(n: i64, m: i64) -> (f64, f64) {
    if (2 * n) % m == 0 {
        return [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)][((2 * n / m) % 4) as usize];
    }
    (PI * n as f64 / m as f64).sin_cos()
}

/// Cubature of the assembled interpolant of `field`.
pub fn cubature_transform(field: &NodalField, grid: &TrigGrid, waves: &WaveSet) -> Result<Spectrum> {
    if grid.dim() != field.mesh().dim() {
        return Err(Error::Shape("grid and mesh dimensions differ".into()));
    }
    let c = field.components();
    let samples = grid.sample(c, |x, out| {
        out.copy_from_slice(&field.eval(x)?);
        Ok(())
    })?;
    grid.cubature(&samples, c, waves)
}

/// Truncated aliasing sum with a size estimate for what was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasingSum {
    pub value: Complex64,
    /// Largest coefficient magnitude on the outermost shell `|r|_inf = R`
    /// times the number of points on that shell.
    pub tail_estimate: f64,
}

/// `sum_{0 < |r|_inf <= R} u_hat(q + M r)`, in lexicographic order of `r`.
pub fn aliasing_error<F>(spectrum: F, q: &[i64], points: usize, radius: usize) -> Result<AliasingSum>
where
    F: Fn(&[i64]) -> Complex64,
{
    if radius < 1 {
        return Err(Error::Param("truncation radius must be at least 1".into()));
    }
    let d = q.len();
    let m = points as i64;
    let rad = radius as i64;
    let side = 2 * radius + 1;
    let mut value = Complex64::new(0.0, 0.0);
    let mut shell_max = 0.0f64;
    let mut shell_count = 0usize;
    let mut shifted = vec![0i64; d];
    let mut r = vec![0i64; d];
    for i in 0..side.pow(d as u32) {
        let mut rest = i;
        for a in (0..d).rev() {
            r[a] = (rest % side) as i64 - rad;
            rest /= side;
        }
        let norm = r.iter().map(|v| v.abs()).max().unwrap_or(0);
        if norm == 0 {
            continue;
        }
        for a in 0..d {
            shifted[a] = q[a] + m * r[a];
        }
        let v = spectrum(&shifted);
        value += v;
        if norm == rad {
            shell_max = shell_max.max(v.norm());
            shell_count += 1;
        }
    }
    Ok(AliasingSum { value, tail_estimate: shell_max * shell_count as f64 })
}

/// Every `q + M r` with `|r|_inf <= R`, for building one plan that serves
/// many aliasing sums.
pub fn aliasing_waves(qs: &WaveSet, points: usize, radius: usize) -> Result<WaveSet> {
    let d = qs.dim();
    let side = 2 * radius + 1;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for q in qs.iter() {
        for i in 0..side.pow(d as u32) {
            let mut rest = i;
            let mut s = q.to_vec();
            for v in s.iter_mut().rev() {
                *v += points as i64 * ((rest % side) as i64 - radius as i64);
                rest /= side;
            }
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    out.sort();
    WaveSet::new(d, out)
}
