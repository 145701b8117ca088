//! Exact Fourier-series coefficients of a nodal field.
//!
//! For an affine element the Fourier coefficient of a mapped basis function
//! factors as
//!
//! ```text
//! phi_hat(j, k, q) = |det h_k| / pi^d * exp(-i q.a_k)
//!                    * prod_alpha sum_p c[j_alpha][p] i^{-p} B_p(q.h_k^alpha)
//! ```
//!
//! and `u_hat(q) = sum_k sum_j phi_hat(j, k, q) u(j, k)`. A [`TransformPlan`]
//! holds the phase, the volume factor and one index per axis into a table of
//! distinct per-axis vectors; equal Bessel arguments share one entry.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;

use crate::bessel::BesselColumn;
use crate::error::{Error, Result};
use crate::field::NodalField;
use crate::gll::{GllRule, LegendreCoeffTable};
use crate::mesh::{rational_to_f64, Element, Mesh};

/// A list of distinct integer wavevectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveSet {
    dim: usize,
    flat: Vec<i64>,
    index: HashMap<Vec<i64>, usize>,
}

impl WaveSet {
    pub fn new(dim: usize, waves: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Waves("dimension must be positive".into()));
        }
        let mut flat = Vec::with_capacity(dim * waves.len());
        let mut index = HashMap::with_capacity(waves.len());
        for (i, q) in waves.into_iter().enumerate() {
            if q.len() != dim {
                return Err(Error::Waves(format!("wavevector {q:?} is not {dim}-dimensional")));
            }
            flat.extend_from_slice(&q);
            if index.insert(q.clone(), i).is_some() {
                return Err(Error::Waves(format!("duplicate wavevector {q:?}")));
            }
        }
        Ok(Self { dim, flat, index })
    }

    /// All `q` with `|q^alpha| <= qmax`, sorted lexicographically.
    pub fn centered_box(dim: usize, qmax: i64) -> Result<Self> {
        if qmax < 0 {
            return Err(Error::Waves(format!("negative qmax {qmax}")));
        }
        let side = (2 * qmax + 1) as usize;
        let count = side.pow(dim as u32);
        let waves = (0..count)
            .map(|mut i| {
                let mut q = vec![0i64; dim];
                for a in (0..dim).rev() {
                    q[a] = (i % side) as i64 - qmax;
                    i /= side;
                }
                q
            })
            .collect();
        Self::new(dim, waves)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, i: usize) -> &[i64] {
        &self.flat[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.flat.chunks_exact(self.dim)
    }

    pub fn position(&self, q: &[i64]) -> Option<usize> {
        self.index.get(q).copied()
    }

    /// Indices in lexicographic order of the wavevectors.
    pub fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.get(a).cmp(self.get(b)));
        order
    }
}

/// Complex coefficients per wavevector and component.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    waves: WaveSet,
    components: usize,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(waves: WaveSet, components: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != waves.len() * components {
            return Err(Error::Shape(format!(
                "{} values for {} wavevectors x {components} components",
                values.len(),
                waves.len()
            )));
        }
        Ok(Self { waves, components, values })
    }

    /// Spectrum built from a coefficient function `f(q, component)`.
    pub fn from_fn<F: Fn(&[i64], usize) -> Complex64>(waves: WaveSet, components: usize, f: F) -> Self {
        let values = waves.iter().flat_map(|q| (0..components).map(move |c| (q, c))).map(|(q, c)| f(q, c)).collect();
        Self { waves, components, values }
    }

    pub fn waves(&self) -> &WaveSet {
        &self.waves
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, wave: usize, component: usize) -> Complex64 {
        self.values[wave * self.components + component]
    }

    pub fn lookup(&self, q: &[i64], component: usize) -> Option<Complex64> {
        self.waves.position(q).map(|i| self.get(i, component))
    }

    /// Largest `|u(-q) - conj(u(q))| / max|u|` over pairs present in the set.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for (i, q) in self.waves.iter().enumerate() {
            let neg: Vec<i64> = q.iter().map(|v| -v).collect();
            if let Some(n) = self.waves.position(&neg) {
                for c in 0..self.components {
                    worst = worst.max((self.get(n, c) - self.get(i, c).conj()).norm());
                }
            }
        }
        worst / scale
    }

    /// CSV with header `q1,..,qd,component,re,im,abs`, rows sorted by `q`
    /// then component, floats with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, extra: Option<(&str, String)>) -> Result<()> {
        let d = self.waves.dim();
        let mut header: Vec<String> = (1..=d).map(|a| format!("q{a}")).collect();
        header.extend(["component", "re", "im", "abs"].map(String::from));
        if let Some((name, _)) = &extra {
            header.push(name.to_string());
        }
        writeln!(out, "{}", header.join(","))?;
        for i in self.waves.sorted_order() {
            let q = self.waves.get(i);
            for c in 0..self.components {
                let v = self.get(i, c);
                let mut row: Vec<String> = q.iter().map(i64::to_string).collect();
                row.push(c.to_string());
                row.push(fmt_f64(v.re));
                row.push(fmt_f64(v.im));
                row.push(fmt_f64(v.norm()));
                if let Some((_, value)) = &extra {
                    row.push(value.clone());
                }
                writeln!(out, "{}", row.join(","))?;
            }
        }
        Ok(())
    }

    /// Reads the CSV written by [`Spectrum::write_csv`]; extra trailing
    /// columns are ignored.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Spectrum> {
        let mut rdr = csv::ReaderBuilder::new().from_reader(input);
        let headers = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
        let d = headers.iter().take_while(|h| h.starts_with('q')).count();
        let names: Vec<&str> = headers.iter().skip(d).take(3).collect();
        if d == 0 || names != ["component", "re", "im"] {
            return Err(Error::Format("not a spectrum CSV".into()));
        }
        let mut rows: Vec<(Vec<i64>, usize, Complex64)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            let num = |i: usize| rec.get(i).ok_or_else(|| Error::Format("short row".into()));
            let q = (0..d)
                .map(|a| num(a)?.trim().parse::<i64>().map_err(|e| Error::Format(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let c = num(d)?.trim().parse::<usize>().map_err(|e| Error::Format(e.to_string()))?;
            let re = num(d + 1)?.trim().parse::<f64>().map_err(|e| Error::Format(e.to_string()))?;
            let im = num(d + 2)?.trim().parse::<f64>().map_err(|e| Error::Format(e.to_string()))?;
            rows.push((q, c, Complex64::new(re, im)));
        }
        let components = rows.iter().map(|r| r.1 + 1).max().unwrap_or(1);
        let mut waves: Vec<Vec<i64>> = Vec::new();
        let mut seen = HashMap::new();
        for (q, _, _) in &rows {
            if !seen.contains_key(q) {
                seen.insert(q.clone(), waves.len());
                waves.push(q.clone());
            }
        }
        let mut values = vec![Complex64::new(0.0, 0.0); waves.len() * components];
        let mut filled = vec![false; values.len()];
        for (q, c, v) in rows {
            let i = seen[&q] * components + c;
            if filled[i] {
                return Err(Error::Format(format!("duplicate row for {q:?} component {c}")));
            }
            filled[i] = true;
            values[i] = v;
        }
        if filled.iter().any(|f| !f) {
            return Err(Error::Format("missing component rows".into()));
        }
        Spectrum::new(WaveSet::new(d, waves)?, components, values)
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `sqrt(sum |u - u_ex|^2) / sqrt(sum |u_ex|^2)` over all wavevectors and
/// components.
pub fn rms_relative_error(spec: &Spectrum, exact: &Spectrum) -> Result<f64> {
    if spec.waves != exact.waves || spec.components != exact.components {
        return Err(Error::Shape("spectra have different wave sets".into()));
    }
    let num: f64 = spec.values.iter().zip(&exact.values).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = exact.values.iter().map(|b| b.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::Param("exact spectrum is identically zero".into()));
    }
    Ok((num / den).sqrt())
}

/// Cache key for the per-axis vectors: the argument `q.h^alpha` either as an
/// exact multiple of pi or by its bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgKey {
    OverPi(Rational64),
    Bits(u64),
}

/// Bessel argument `q.h_k^alpha` and its cache key.
pub fn bessel_argument(e: &Element, q: &[i64], axis: usize) -> (ArgKey, f64) {
    if let Some(ex) = e.exact() {
        let t = ex.half[axis] * q[axis];
        return (ArgKey::OverPi(t), rational_to_f64(t) * PI);
    }
    let d = e.dim();
    let v: f64 = (0..d).map(|b| q[b] as f64 * e.half_leg(b, axis)).sum::<f64>() + 0.0;
    (ArgKey::Bits(v.to_bits()), v)
}

/// `exp(-i q.a_k)`; exact centers are reduced modulo 2 pi before the
/// trigonometric evaluation.
pub fn element_phase(e: &Element, q: &[i64]) -> Complex64 {
    if let Some(ex) = e.exact() {
        let t = ex.center.iter().zip(q).fold(Rational64::from_integer(0), |acc, (&c, &qa)| acc + c * qa);
        let (s, c) = sin_cos_pi(t);
        return Complex64::new(c, -s);
    }
    let angle: f64 = e.center().iter().zip(q).map(|(a, &qa)| a * qa as f64).sum();
    Complex64::from_polar(1.0, -angle)
}

/// `(sin(pi t), cos(pi t))` with exact values at multiples of 1/2.
fn sin_cos_pi(t: Rational64) -> (f64, f64) {
    let two = Rational64::from_integer(2);
    let mut r = t % two;
    if r < Rational64::from_integer(0) {
        r += two;
    }
    // r in [0, 2)
    let half = Rational64::new(1, 2);
    if r.is_integer() || (r / half).is_integer() {
        let quarter = (r / half).to_integer();
        return [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)][quarter as usize];
    }
    let mut x = rational_to_f64(r);
    if x > 1.0 {
        x -= 2.0;
    }
    (PI * x).sin_cos()
}

/// `|det h_k| / pi^d`.
pub fn element_volume(e: &Element) -> f64 {
    if let Some(ex) = e.exact() {
        return rational_to_f64(ex.half.iter().fold(Rational64::from_integer(1), |acc, h| acc * h));
    }
    e.det().abs() / PI.powi(e.dim() as i32)
}

/// `s_j = sum_p c[j][p] i^{-p} B_p(r)` for every node `j`.
pub fn axis_vector(table: &LegendreCoeffTable, r: f64) -> Result<Vec<Complex64>> {
    let p = table.degree();
    let b = BesselColumn::new(r, p)?;
    Ok((0..=p)
        .map(|j| {
            let row = table.row(j);
            let mut re = 0.0;
            let mut im = 0.0;
            for (deg, (&c, &bp)) in row.iter().zip(b.values()).enumerate() {
                let t = c * bp;
                match deg % 4 {
                    0 => re += t,
                    1 => im -= t,
                    2 => re -= t,
                    _ => im += t,
                }
            }
            Complex64::new(re, im)
        })
        .collect())
}

/// Fourier coefficient of one mapped basis function, computed from scratch.
pub fn phi_hat(mesh: &Mesh, k: usize, j: &[usize], q: &[i64]) -> Result<Complex64> {
    let e = mesh.element(k);
    let d = mesh.dim();
    if j.len() != d || q.len() != d {
        return Err(Error::Shape("multi-index and wavevector must have length d".into()));
    }
    if let Some(&bad) = j.iter().find(|&&v| v > mesh.degree()) {
        return Err(Error::Index { index: bad, limit: mesh.degree() + 1 });
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for (a, &ja) in j.iter().enumerate().take(d) {
        let (_, r) = bessel_argument(e, q, a);
        prod *= axis_vector(&mesh.basis().table, r)?[ja];
    }
    Ok(element_volume(e) * element_phase(e, q) * prod)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PlanEntry {
    phase: Complex64,
    axes: [u32; 3],
}

/// Precomputed factors for one mesh and one wave set.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    mesh: Arc<Mesh>,
    waves: WaveSet,
    volumes: Vec<f64>,
    keys: Vec<ArgKey>,
    vectors: Vec<Vec<Complex64>>,
    // entries[k * waves.len() + i]
    entries: Vec<PlanEntry>,
}

impl TransformPlan {
    pub fn new(mesh: Arc<Mesh>, waves: WaveSet) -> Result<Self> {
        let d = mesh.dim();
        if waves.dim() != d {
            return Err(Error::Shape(format!("wave set is {}-dimensional, mesh is {d}", waves.dim())));
        }
        let nq = waves.len();
        let mut key_index: HashMap<ArgKey, u32> = HashMap::new();
        let mut keys = Vec::new();
        let mut args = Vec::new();
        let mut axes_of = Vec::with_capacity(mesh.len() * nq);
        for e in mesh.elements() {
            for q in waves.iter() {
                let mut axes = [0u32; 3];
                for (a, slot) in axes.iter_mut().enumerate().take(d) {
                    let (key, r) = bessel_argument(e, q, a);
                    *slot = *key_index.entry(key).or_insert_with(|| {
                        keys.push(key);
                        args.push(r);
                        (keys.len() - 1) as u32
                    });
                }
                axes_of.push(axes);
            }
        }
        let table = &mesh.basis().table;
        let vectors = args.par_iter().map(|&r| axis_vector(table, r)).collect::<Result<Vec<_>>>()?;
        let phases: Vec<Complex64> = mesh
            .elements()
            .par_iter()
            .flat_map_iter(|e| waves.iter().map(move |q| element_phase(e, q)))
            .collect();
        let entries = phases.into_iter().zip(axes_of).map(|(phase, axes)| PlanEntry { phase, axes }).collect();
        let volumes = mesh.elements().iter().map(element_volume).collect();
        Ok(Self { mesh, waves, volumes, keys, vectors, entries })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn waves(&self) -> &WaveSet {
        &self.waves
    }

    /// Number of distinct Bessel arguments (and per-axis vectors).
    pub fn distinct_arguments(&self) -> usize {
        self.keys.len()
    }

    pub fn argument_keys(&self) -> &[ArgKey] {
        &self.keys
    }

    pub fn phase(&self, k: usize, wave: usize) -> Complex64 {
        self.entries[k * self.waves.len() + wave].phase
    }

    pub fn volume(&self, k: usize) -> f64 {
        self.volumes[k]
    }

    /// Per-axis vector `s^alpha` for element `k` and wavevector `wave`.
    pub fn axis(&self, k: usize, wave: usize, axis: usize) -> &[Complex64] {
        &self.vectors[self.entries[k * self.waves.len() + wave].axes[axis] as usize]
    }

    /// `phi_hat` assembled from the cached factors.
    pub fn phi_hat(&self, k: usize, j: &[usize], wave: usize) -> Complex64 {
        let mut prod = Complex64::new(1.0, 0.0);
        for (a, &ja) in j.iter().enumerate() {
            prod *= self.axis(k, wave, a)[ja];
        }
        self.volumes[k] * self.phase(k, wave) * prod
    }
}

/// How the element and node sums are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    #[default]
    Plain,
    /// Neumaier-compensated sums for both the node and the element loops.
    Compensated,
}

#[derive(Default, Clone, Copy)]
struct Acc {
    sum: Complex64,
    comp: Complex64,
}

impl Acc {
    fn add(&mut self, v: Complex64, mode: Summation) {
        match mode {
            Summation::Plain => self.sum += v,
            Summation::Compensated => {
                self.sum.re = neumaier(self.sum.re, v.re, &mut self.comp.re);
                self.sum.im = neumaier(self.sum.im, v.im, &mut self.comp.im);
            }
        }
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// `u_hat(q) = sum_k vol_k phase_{k,q} sum_j (prod_alpha s^alpha_{j_alpha}) u(j, k)`,
/// elements in index order and nodes lexicographic, for every wavevector.
pub fn transform(field: &NodalField, plan: &TransformPlan) -> Result<Spectrum> {
    transform_with(field, plan, Summation::Plain)
}

pub fn transform_with(field: &NodalField, plan: &TransformPlan, mode: Summation) -> Result<Spectrum> {
    if !Arc::ptr_eq(field.mesh(), plan.mesh()) && **field.mesh() != **plan.mesh() {
        return Err(Error::Shape("field and plan use different meshes".into()));
    }
    let mesh = plan.mesh();
    let d = mesh.dim();
    let n = mesh.degree() + 1;
    let per = mesh.nodes_per_element();
    let c = field.components();
    let nq = plan.waves.len();

    let values: Vec<Complex64> = (0..nq)
        .into_par_iter()
        .flat_map_iter(|wave| {
            let mut totals = vec![Acc::default(); c];
            let mut weights = vec![Complex64::new(0.0, 0.0); per];
            for k in 0..mesh.len() {
                let axes: Vec<&[Complex64]> = (0..d).map(|a| plan.axis(k, wave, a)).collect();
                for (j, w) in weights.iter_mut().enumerate() {
                    let mut rest = j;
                    let mut prod = axes[0][rest % n];
                    for ax in &axes[1..] {
                        rest /= n;
                        prod *= ax[rest % n];
                    }
                    *w = prod;
                }
                let scale = plan.volumes[k] * plan.phase(k, wave);
                let vals = field.element_values(k);
                for (comp, total) in totals.iter_mut().enumerate() {
                    let mut inner = Acc::default();
                    for (j, w) in weights.iter().enumerate() {
                        inner.add(w * vals[j * c + comp], mode);
                    }
                    total.add(scale * inner.total(), mode);
                }
            }
            totals.into_iter().map(|t| t.total())
        })
        .collect();
    Spectrum::new(plan.waves.clone(), c, values)
}

/// Reference coefficients from tensor GLL quadrature of degree `degree` on
/// every element, applied to the interpolant times `exp(-i q.x)`. Independent
/// of the Bessel closed form; accurate once `degree` resolves `|q.h_k|`.
pub fn quadrature_transform(field: &NodalField, waves: &WaveSet, degree: usize) -> Result<Spectrum> {
    let mesh = field.mesh();
    let d = mesh.dim();
    if waves.dim() != d {
        return Err(Error::Shape("wave set dimension differs from mesh".into()));
    }
    let rule = GllRule::quadrature(degree)?;
    let m = degree + 1;
    let points = m.pow(d as u32);
    let c = field.components();
    let norm = (2.0 * PI).powi(d as i32);
    // per element: physical points, weight * volume, interpolant values
    let samples: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..mesh.len())
        .into_par_iter()
        .map(|k| {
            let e = mesh.element(k);
            let vol = e.det().abs() / norm;
            let mut xs = Vec::with_capacity(points * d);
            let mut ws = Vec::with_capacity(points);
            let mut us = Vec::with_capacity(points * c);
            let mut xi = vec![0.0; d];
            for i in 0..points {
                let mut rest = i;
                let mut w = vol;
                for x in xi.iter_mut() {
                    *x = rule.nodes()[rest % m];
                    w *= rule.weights()[rest % m];
                    rest /= m;
                }
                xs.extend(e.map_to_physical(&xi));
                ws.push(w);
                us.extend(field.eval_in_element(k, &xi));
            }
            (xs, ws, us)
        })
        .collect();
    let values: Vec<Complex64> = (0..waves.len())
        .into_par_iter()
        .flat_map_iter(|wave| {
            let q = waves.get(wave);
            let mut acc = vec![Complex64::new(0.0, 0.0); c];
            for (xs, ws, us) in &samples {
                for (i, w) in ws.iter().enumerate() {
                    let arg: f64 = q.iter().zip(&xs[i * d..(i + 1) * d]).map(|(&qa, xa)| qa as f64 * xa).sum();
                    let e = Complex64::from_polar(*w, -arg);
                    for (comp, a) in acc.iter_mut().enumerate() {
                        *a += e * us[i * c + comp];
                    }
                }
            }
            acc
        })
        .collect();
    Spectrum::new(waves.clone(), c, values)
}
