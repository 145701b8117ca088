//! Spherical Bessel functions of the first kind, `B_p(r) = j_p(r)`.
//!
//! `B_p(r) = (i^p / 2) * integral_{-1}^{1} exp(-i r xi) L_p(xi) dxi`, which is
//! how these enter the element transform. Small arguments use the ascending
//! series; larger ones use Miller's downward recurrence normalized against
//! the closed forms of `B_0` or `B_1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gll::{legendre_all, GllRule, MAX_DEGREE};

const SERIES_RADIUS: f64 = 0.5;
const SERIES_REL_TOL: f64 = 1e-18;
const MILLER_EXTRA: usize = 32;
const FLUSH: f64 = 1e-292;
const RESCALE_AT: f64 = 1e250;
// Above this the upward recurrence is stable for every supported degree.
const UPWARD_FROM: f64 = 1e4;

/// `B_0(r) .. B_P(r)` at one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselColumn {
    r: f64,
    values: Vec<f64>,
}

impl BesselColumn {
    pub fn new(r: f64, max_degree: usize) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::NonFinite(format!("Bessel argument {r}")));
        }
        if max_degree > MAX_DEGREE {
            return Err(Error::Degree { degree: max_degree, min: 0, max: MAX_DEGREE });
        }
        let mut values = vec![0.0; max_degree + 1];
        fill_column(r.abs(), &mut values);
        if r < 0.0 {
            for v in values.iter_mut().skip(1).step_by(2) {
                *v = -*v;
            }
        }
        for v in values.iter_mut() {
            if v.abs() < FLUSH {
                *v = 0.0;
            }
        }
        Ok(Self { r, values })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, p: usize) -> f64 {
        self.values[p]
    }
}

/// Convenience wrapper around [`BesselColumn::new`].
pub fn bessel_column(r: f64, max_degree: usize) -> Result<BesselColumn> {
    BesselColumn::new(r, max_degree)
}

/// `r >= 0`; writes `B_0(r)..B_{out.len()-1}(r)`.
fn fill_column(r: f64, out: &mut [f64]) {
    if r < SERIES_RADIUS {
        ascending_series(r, out);
    } else if r >= UPWARD_FROM {
        upward(r, out);
    } else {
        miller(r, out);
    }
}

fn ascending_series(r: f64, out: &mut [f64]) {
    let x = -0.5 * r * r;
    let mut lead = 1.0; // r^p / (2p+1)!!
    for (p, o) in out.iter_mut().enumerate() {
        if p > 0 {
            lead *= r / (2 * p + 1) as f64;
        }
        if lead == 0.0 {
            *o = 0.0;
            continue;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0.. {
            term *= x / ((k + 1) as f64 * (2 * p + 2 * k + 3) as f64);
            sum += term;
            if term.abs() <= SERIES_REL_TOL * sum.abs() {
                break;
            }
        }
        *o = lead * sum;
    }
}

fn miller(r: f64, out: &mut [f64]) {
    let pmax = out.len() - 1;
    // B_0 and B_1 are always needed for the normalization.
    let keep = pmax.max(1);
    // the turning-point layer widens like r^(1/3)
    let start = pmax + r.ceil() as usize + MILLER_EXTRA + (12.0 * r.cbrt()).ceil() as usize;
    let mut stored = vec![0.0; keep + 1];

    let mut upper = 0.0; // f_{k+1}
    let mut cur = 1e-300; // f_k
    let mut k = start;
    loop {
        if k <= keep {
            stored[k] = cur;
        }
        if k == 0 {
            break;
        }
        let lower = (2 * k + 1) as f64 / r * cur - upper;
        upper = cur;
        cur = lower;
        k -= 1;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            upper /= RESCALE_AT;
            for s in stored.iter_mut() {
                *s /= RESCALE_AT;
            }
        }
    }

    let (s, c) = r.sin_cos();
    let b0 = s / r;
    let b1 = s / (r * r) - c / r;
    let scale = if b0.abs() >= b1.abs() { b0 / stored[0] } else { b1 / stored[1] };
    for (o, f) in out.iter_mut().zip(&stored) {
        *o = f * scale;
    }
    out[0] = b0;
    if pmax >= 1 {
        out[1] = b1;
    }
}

fn upward(r: f64, out: &mut [f64]) {
    let (s, c) = r.sin_cos();
    out[0] = s / r;
    if out.len() > 1 {
        out[1] = s / (r * r) - c / r;
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = (2 * k + 1) as f64 / r * out[k] - out[k - 1];
    }
}

/// `i^p` as one of `1, i, -1, -i`.
pub fn i_pow(p: usize) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `i^{-p}`.
pub fn i_pow_neg(p: usize) -> Complex64 {
    i_pow(p).conj()
}

/// `|B_p(r) - (i^p/2) * GLL[exp(-i r xi) L_p(xi)]|` with a rule of degree
/// `oracle_degree`.
pub fn bessel_identity_residual(r: f64, p: usize, oracle_degree: usize) -> Result<f64> {
    let needed = 100usize.max(r.abs().ceil() as usize + 2 * p + 20);
    if oracle_degree < needed {
        return Err(Error::Param(format!(
            "oracle degree {oracle_degree} too small for r={r}, p={p} (need {needed})"
        )));
    }
    let b = BesselColumn::new(r, p)?.get(p);
    let rule = GllRule::quadrature(oracle_degree)?;
    let mut l = vec![0.0; p + 1];
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        legendre_all(x, &mut l);
        acc += Complex64::from_polar(w * l[p], -r * x);
    }
    let quad = i_pow(p) * acc * 0.5;
    Ok((Complex64::new(b, 0.0) - quad).norm())
}
