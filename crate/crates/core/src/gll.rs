//! Gauss-Lobatto-Legendre rules and the nodal/modal tables built on them.
//!
//! Nodes are `-1`, `+1` and the roots of `L'_P`. The cardinal interpolants
//! `phi_j` are stored through their Legendre expansion
//! `phi_j(xi) = sum_p c[j][p] L_p(xi)` with the closed-form coefficients
//! `c[j][p] = w_j L_p(xi_j) / sum_j' w_j' L_p(xi_j')^2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest degree accepted for element bases.
pub const MAX_DEGREE: usize = 64;

/// Largest degree accepted for quadrature-only rules (used by oracles).
pub const MAX_QUADRATURE_DEGREE: usize = 4096;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_STEPS: usize = 100;
const DOMAIN_SLACK: f64 = 1e-12;

/// Classical Legendre polynomial `L_p(xi)`, normalized so that `L_p(1) = 1`.
pub fn legendre_eval(p: usize, xi: f64) -> Result<f64> {
    if !xi.is_finite() || xi.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain { value: xi });
    }
    Ok(legendre(p, xi))
}

/// Unchecked three-term recurrence.
pub(crate) fn legendre(p: usize, xi: f64) -> f64 {
    legendre_pair(p, xi).0
}

/// Returns `(L_p(xi), L_{p-1}(xi))`; the second entry is 0 for p = 0.
fn legendre_pair(p: usize, xi: f64) -> (f64, f64) {
    if p == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = xi;
    for k in 1..p {
        let next = ((2 * k + 1) as f64 * xi * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Fills `out[p] = L_p(xi)` for `p = 0..out.len()`.
pub fn legendre_all(xi: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = xi;
    for k in 1..n - 1 {
        out[k + 1] = ((2 * k + 1) as f64 * xi * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
    }
}

/// Degree-P Gauss-Lobatto-Legendre quadrature rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GllRule {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GllRule {
    /// Rule for an element basis, `1 <= degree <= MAX_DEGREE`.
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::Degree { degree, min: 1, max: MAX_DEGREE });
        }
        Self::build(degree)
    }

    /// Rule used purely for quadrature, allowing degrees up to
    /// `MAX_QUADRATURE_DEGREE`.
    pub fn quadrature(degree: usize) -> Result<Self> {
        if !(1..=MAX_QUADRATURE_DEGREE).contains(&degree) {
            return Err(Error::Degree { degree, min: 1, max: MAX_QUADRATURE_DEGREE });
        }
        Self::build(degree)
    }

    fn build(p: usize) -> Result<Self> {
        let n = p + 1;
        let mut nodes = vec![0.0; n];
        nodes[0] = -1.0;
        nodes[p] = 1.0;

        // Newton on L'_P for the lower half; the upper half follows by symmetry.
        let pp1 = (p * (p + 1)) as f64;
        for j in 1..=p / 2 {
            let mut x = -(PI * j as f64 / p as f64).cos();
            let mut converged = false;
            for _ in 0..NEWTON_MAX_STEPS {
                let (lp, lpm1) = legendre_pair(p, x);
                let one_m_x2 = 1.0 - x * x;
                let d1 = p as f64 * (lpm1 - x * lp) / one_m_x2;
                let d2 = (2.0 * x * d1 - pp1 * lp) / one_m_x2;
                let dx = d1 / d2;
                x -= dx;
                if dx.abs() <= NEWTON_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged || !x.is_finite() {
                return Err(Error::NoConvergence { degree: p });
            }
            nodes[j] = x;
        }
        for j in 1..n / 2 {
            nodes[p - j] = -nodes[j];
        }
        if p.is_multiple_of(2) {
            nodes[p / 2] = 0.0;
        }

        let mut weights = vec![0.0; n];
        for j in 0..=p / 2 {
            let lp = legendre(p, nodes[j]);
            let w = 2.0 / (pp1 * lp * lp);
            weights[j] = w;
            weights[p - j] = w;
        }
        Ok(Self { degree: p, nodes, weights })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_j w_j f(xi_j)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Legendre coefficients of the cardinal GLL interpolants, row-major by node.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreCoeffTable {
    degree: usize,
    coeffs: Vec<f64>,
}

impl LegendreCoeffTable {
    pub fn new(rule: &GllRule) -> Self {
        let p = rule.degree();
        let n = p + 1;
        let mut lvals = vec![0.0; n * n]; // lvals[j * n + q] = L_q(xi_j)
        for (j, &x) in rule.nodes().iter().enumerate() {
            legendre_all(x, &mut lvals[j * n..(j + 1) * n]);
        }
        let norms: Vec<f64> = (0..n)
            .map(|q| (0..n).map(|j| rule.weights()[j] * lvals[j * n + q] * lvals[j * n + q]).sum())
            .collect();
        let mut coeffs = vec![0.0; n * n];
        for j in 0..n {
            for q in 0..n {
                coeffs[j * n + q] = rule.weights()[j] * lvals[j * n + q] / norms[q];
            }
        }
        Self { degree: p, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Row `j`: the Legendre coefficients of `phi_j`.
    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.degree + 1;
        &self.coeffs[j * n..(j + 1) * n]
    }

    pub fn get(&self, j: usize, p: usize) -> f64 {
        self.coeffs[j * (self.degree + 1) + p]
    }

    /// Cardinal interpolant `phi_j(xi)`.
    pub fn interp_eval(&self, j: usize, xi: f64) -> Result<f64> {
        let n = self.degree + 1;
        if j >= n {
            return Err(Error::Index { index: j, limit: n });
        }
        if !xi.is_finite() || xi.abs() > 1.0 + DOMAIN_SLACK {
            return Err(Error::Domain { value: xi });
        }
        let mut l = vec![0.0; n];
        legendre_all(xi, &mut l);
        Ok(self.row(j).iter().zip(&l).map(|(c, l)| c * l).sum())
    }

    /// Writes `out[j] = phi_j(xi)` for every node, using `scratch` for the
    /// Legendre values. Both slices must have length P+1.
    pub fn eval_all(&self, xi: f64, scratch: &mut [f64], out: &mut [f64]) {
        legendre_all(xi, scratch);
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.row(j).iter().zip(scratch.iter()).map(|(c, l)| c * l).sum();
        }
    }
}

/// A rule together with its coefficient table; what every element shares.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub rule: GllRule,
    pub table: LegendreCoeffTable,
}

impl Basis {
    pub fn new(degree: usize) -> Result<Self> {
        let rule = GllRule::new(degree)?;
        let table = LegendreCoeffTable::new(&rule);
        Ok(Self { rule, table })
    }

    pub fn degree(&self) -> usize {
        self.rule.degree()
    }
}
