//! Affine parallelepiped elements tiling `[-pi, pi]^d`.
//!
//! Element `k` is the image of the reference cube under
//! `x = a_k + h_k * xi`, where the columns of `h_k` are the half-legs.
//! Generated meshes are axis-aligned and carry their box coordinates as exact
//! rational multiples of pi next to the float values; validation and Bessel
//! cache keys use the exact form whenever every element has one.

use std::f64::consts::PI;
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gll::Basis;

const REF_SLACK: f64 = 1e-12;
const VOLUME_REL_TOL: f64 = 1e-12;

/// Box coordinates of an axis-aligned element as multiples of pi.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactBox {
    pub center: Vec<Rational64>,
    pub half: Vec<Rational64>,
}

impl ExactBox {
    fn lo(&self, axis: usize) -> Rational64 {
        self.center[axis] - self.half[axis]
    }

    fn hi(&self, axis: usize) -> Rational64 {
        self.center[axis] + self.half[axis]
    }
}

pub(crate) fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// An affine element `x = a + h * xi`.
#[derive(Debug, Clone)]
pub struct Element {
    center: Vec<f64>,
    // Row-major d x d; column alpha is the half-leg h^alpha.
    half_legs: Vec<f64>,
    inverse: Vec<f64>,
    det: f64,
    exact: Option<ExactBox>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.center == other.center && self.half_legs == other.half_legs && self.exact == other.exact
    }
}

impl Element {
    /// General parallelepiped from a center and a row-major half-leg matrix.
    pub fn new(center: Vec<f64>, half_legs: Vec<f64>) -> Result<Self> {
        let d = center.len();
        if !(1..=3).contains(&d) || half_legs.len() != d * d {
            return Err(Error::Mesh(format!(
                "element needs d in 1..=3 and a d x d matrix, got d={d} with {} entries",
                half_legs.len()
            )));
        }
        if center.iter().chain(&half_legs).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("element geometry".into()));
        }
        let det = determinant(&half_legs, d);
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Mesh("singular half-leg matrix".into()));
        }
        let inverse = invert(&half_legs, d, det);
        Ok(Self { center, half_legs, inverse, det, exact: None })
    }

    /// Axis-aligned box with exact center and half-widths (multiples of pi).
    pub fn from_exact(exact: ExactBox) -> Result<Self> {
        let d = exact.center.len();
        if exact.half.len() != d {
            return Err(Error::Mesh("center and half-width lengths differ".into()));
        }
        if exact.half.iter().any(|h| *h <= Rational64::from_integer(0)) {
            return Err(Error::Mesh("half-widths must be positive".into()));
        }
        let center = exact.center.iter().map(|&c| rational_to_f64(c) * PI).collect();
        let mut half_legs = vec![0.0; d * d];
        for (a, &h) in exact.half.iter().enumerate() {
            half_legs[a * d + a] = rational_to_f64(h) * PI;
        }
        let mut e = Self::new(center, half_legs)?;
        e.exact = Some(exact);
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Entry `(row, col)` of the half-leg matrix.
    pub fn half_leg(&self, row: usize, col: usize) -> f64 {
        self.half_legs[row * self.dim() + col]
    }

    pub fn half_leg_matrix(&self) -> &[f64] {
        &self.half_legs
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn exact(&self) -> Option<&ExactBox> {
        self.exact.as_ref()
    }

    pub fn is_axis_aligned(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| {
            (0..d).all(|c| if r == c { self.half_legs[r * d + c] > 0.0 } else { self.half_legs[r * d + c] == 0.0 })
        })
    }

    /// `(lo, hi)` per axis of the bounding box.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let d = self.dim();
        (0..d)
            .map(|r| {
                let ext: f64 = (0..d).map(|c| self.half_legs[r * d + c].abs()).sum();
                (self.center[r] - ext, self.center[r] + ext)
            })
            .collect()
    }

    pub fn map_to_physical(&self, xi: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|r| self.center[r] + (0..d).map(|c| self.half_legs[r * d + c] * xi[c]).sum::<f64>())
            .collect()
    }

    /// Unclamped `h^{-1}(x - a)`.
    pub fn reference_coords(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let dx: Vec<f64> = (0..d).map(|r| x[r] - self.center[r]).collect();
        (0..d).map(|r| (0..d).map(|c| self.inverse[r * d + c] * dx[c]).sum()).collect()
    }

    /// Inverse map, clamped to the reference cube; fails for points more
    /// than 1e-12 outside it.
    pub fn map_to_reference(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut xi = self.reference_coords(x);
        if xi.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + REF_SLACK) {
            return Err(Error::OutsideElement(x.to_vec()));
        }
        for v in xi.iter_mut() {
            *v = v.clamp(-1.0, 1.0);
        }
        Ok(xi)
    }

    fn contains(&self, x: &[f64], slack: f64) -> bool {
        self.reference_coords(x).iter().all(|v| v.abs() <= 1.0 + slack)
    }

    /// The `2^d` children of an axis-aligned element, axis 1 varying fastest.
    fn bisect(&self) -> Result<Vec<Element>> {
        let d = self.dim();
        if !self.is_axis_aligned() {
            return Err(Error::Mesh("only axis-aligned elements can be refined".into()));
        }
        let mut out = Vec::with_capacity(1 << d);
        for corner in 0..(1usize << d) {
            let sign = |a: usize| if corner >> a & 1 == 1 { 1i64 } else { -1 };
            if let Some(ex) = &self.exact {
                let half: Vec<Rational64> = ex.half.iter().map(|h| h / 2).collect();
                let center = (0..d).map(|a| ex.center[a] + half[a] * sign(a)).collect();
                out.push(Element::from_exact(ExactBox { center, half })?);
            } else {
                let mut legs = vec![0.0; d * d];
                let mut center = self.center.clone();
                for a in 0..d {
                    let h = 0.5 * self.half_legs[a * d + a];
                    legs[a * d + a] = h;
                    center[a] += sign(a) as f64 * h;
                }
                out.push(Element::new(center, legs)?);
            }
        }
        Ok(out)
    }
}

fn determinant(m: &[f64], d: usize) -> f64 {
    match d {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
    }
}

fn invert(m: &[f64], d: usize, det: f64) -> Vec<f64> {
    match d {
        1 => vec![1.0 / m[0]],
        2 => vec![m[3] / det, -m[1] / det, -m[2] / det, m[0] / det],
        _ => {
            let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0 * 3 + c0] * m[r1 * 3 + c1] - m[r0 * 3 + c1] * m[r1 * 3 + c0];
            // inverse = adj / det, adj[r][c] = cofactor[c][r]
            vec![
                cof(1, 2, 1, 2) / det,
                -cof(0, 2, 1, 2) / det,
                cof(0, 1, 1, 2) / det,
                -cof(1, 2, 0, 2) / det,
                cof(0, 2, 0, 2) / det,
                -cof(0, 1, 0, 2) / det,
                cof(1, 2, 0, 1) / det,
                -cof(0, 2, 0, 1) / det,
                cof(0, 1, 0, 1) / det,
            ]
        }
    }
}

/// A validated partition of `[-pi, pi]^d` sharing one polynomial degree.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    degree: usize,
    elements: Vec<Element>,
    basis: Arc<Basis>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.degree == other.degree && self.elements == other.elements
    }
}

impl Mesh {
    pub fn new(dim: usize, degree: usize, elements: Vec<Element>) -> Result<Self> {
        let basis = Arc::new(Basis::new(degree)?);
        let mesh = Self { dim, degree, elements, basis };
        mesh.validate()?;
        Ok(mesh)
    }

    /// `n` equal boxes per axis, axis 1 varying fastest.
    pub fn uniform(dim: usize, per_axis: usize, degree: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) || per_axis == 0 {
            return Err(Error::Mesh(format!("bad uniform mesh d={dim} n={per_axis}")));
        }
        let n = per_axis as i64;
        let half = Rational64::new(1, n);
        let total = per_axis.pow(dim as u32);
        let mut elements = Vec::with_capacity(total);
        for k in 0..total {
            let mut rest = k;
            let mut center = Vec::with_capacity(dim);
            for _ in 0..dim {
                let i = (rest % per_axis) as i64;
                rest /= per_axis;
                // a = (2i + 1)/n - 1 in units of pi
                center.push(Rational64::new(2 * i + 1, n) - 1);
            }
            elements.push(Element::from_exact(ExactBox { center, half: vec![half; dim] })?);
        }
        Self::new(dim, degree, elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &Element {
        &self.elements[k]
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// `(P+1)^d`.
    pub fn nodes_per_element(&self) -> usize {
        (self.degree + 1).pow(self.dim as u32)
    }

    pub fn is_exact(&self) -> bool {
        self.elements.iter().all(|e| e.exact.is_some())
    }

    pub fn is_axis_aligned(&self) -> bool {
        self.elements.iter().all(Element::is_axis_aligned)
    }

    /// Checks volume closure, containment and disjoint interiors.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if !(1..=3).contains(&d) {
            return Err(Error::Mesh(format!("dimension {d} unsupported")));
        }
        if self.elements.is_empty() {
            return Err(Error::Mesh("no elements".into()));
        }
        if let Some(k) = self.elements.iter().position(|e| e.dim() != d) {
            return Err(Error::Mesh(format!("element {k} has the wrong dimension")));
        }

        let scale = (1u64 << d) as f64;
        let volume: f64 = self.elements.iter().map(|e| scale * e.det.abs()).sum();
        let target = (2.0 * PI).powi(d as i32);
        if self.is_exact() {
            let mut total = Rational64::from_integer(0);
            for e in &self.elements {
                let ex = e.exact.as_ref().unwrap();
                total += ex.half.iter().fold(Rational64::from_integer(1), |acc, h| acc * h);
            }
            if total != Rational64::from_integer(1) {
                return Err(Error::Mesh(format!("element volumes sum to {total} of the domain")));
            }
        } else if ((volume - target) / target).abs() > VOLUME_REL_TOL {
            return Err(Error::Mesh(format!("element volumes sum to {volume}, expected {target}")));
        }

        let one = Rational64::from_integer(1);
        let tol = REF_SLACK * PI;
        for (k, e) in self.elements.iter().enumerate() {
            let inside = match &e.exact {
                Some(ex) => (0..d).all(|a| ex.lo(a) >= -one && ex.hi(a) <= one),
                None => e.bounds().iter().all(|&(lo, hi)| lo >= -PI - tol && hi <= PI + tol),
            };
            if !inside {
                return Err(Error::Mesh(format!("element {k} leaves the domain")));
            }
        }

        if self.is_axis_aligned() {
            let bounds: Vec<Vec<(f64, f64)>> = self.elements.iter().map(Element::bounds).collect();
            for i in 0..self.elements.len() {
                for j in i + 1..self.elements.len() {
                    let overlap = match (&self.elements[i].exact, &self.elements[j].exact) {
                        (Some(a), Some(b)) => (0..d).all(|x| a.lo(x) < b.hi(x) && b.lo(x) < a.hi(x)),
                        _ => (0..d).all(|x| {
                            let (a, b) = (bounds[i][x], bounds[j][x]);
                            a.1.min(b.1) - a.0.max(b.0) > tol
                        }),
                    };
                    if overlap {
                        return Err(Error::Mesh(format!("elements {i} and {j} overlap")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Physical GLL nodes: `K * (P+1)^d` points of `d` coordinates each,
    /// element-major, multi-index lexicographic with axis 1 fastest.
    pub fn node_positions(&self) -> Vec<f64> {
        let d = self.dim;
        let n = self.degree + 1;
        let per = self.nodes_per_element();
        let xi_1d = self.basis.rule.nodes();
        let mut out = Vec::with_capacity(self.len() * per * d);
        let mut xi = vec![0.0; d];
        for e in &self.elements {
            for j in 0..per {
                let mut rest = j;
                for x in xi.iter_mut() {
                    *x = xi_1d[rest % n];
                    rest /= n;
                }
                out.extend(e.map_to_physical(&xi));
            }
        }
        out
    }

    /// Index of the element owning `x`: the smallest index among elements
    /// whose closed box contains it.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| e.contains(x, 0.0))
            .or_else(|| self.elements.iter().position(|e| e.contains(x, REF_SLACK)))
    }

    /// Replaces every flagged element by its `2^d` children, in place.
    pub fn refine(&self, flags: &[bool]) -> Result<Mesh> {
        if flags.len() != self.len() {
            return Err(Error::Shape(format!("{} flags for {} elements", flags.len(), self.len())));
        }
        let mut elements = Vec::with_capacity(self.len());
        for (e, &flag) in self.elements.iter().zip(flags) {
            if flag {
                elements.extend(e.bisect()?);
            } else {
                elements.push(e.clone());
            }
        }
        Ok(Self { dim: self.dim, degree: self.degree, elements, basis: Arc::clone(&self.basis) })
            .and_then(|m| m.validate().map(|_| m))
    }

    /// Copy shifted by `shift * pi` with periodic wrap-around. Every exact
    /// element must land wholly inside the domain after wrapping.
    pub fn translate_periodic(&self, shift: &[Rational64]) -> Result<Mesh> {
        if shift.len() != self.dim || !self.is_exact() {
            return Err(Error::Mesh("periodic translation needs an exact mesh and a d-vector".into()));
        }
        let one = Rational64::from_integer(1);
        let two = Rational64::from_integer(2);
        let mut elements = Vec::with_capacity(self.len());
        for e in &self.elements {
            let ex = e.exact.as_ref().unwrap();
            let center = ex
                .center
                .iter()
                .zip(shift)
                .zip(&ex.half)
                .map(|((&c, &s), &h)| {
                    let mut c = c + s;
                    while c - h < -one {
                        c += two;
                    }
                    while c + h > one {
                        c -= two;
                    }
                    c
                })
                .collect();
            elements.push(Element::from_exact(ExactBox { center, half: ex.half.clone() })?);
        }
        Mesh::new(self.dim, self.degree, elements)
    }

    /// Same elements with a different polynomial degree.
    pub fn with_degree(&self, degree: usize) -> Result<Mesh> {
        Mesh::new(self.dim, degree, self.elements.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        let d = self.dim;
        let elements = self
            .elements
            .iter()
            .map(|e| ElementJson {
                a: e.center.clone(),
                h: (0..d).map(|r| e.half_legs[r * d..(r + 1) * d].to_vec()).collect(),
                a_over_pi: e.exact.as_ref().map(|ex| ex.center.iter().map(pair).collect()),
                h_over_pi: e.exact.as_ref().map(|ex| ex.half.iter().map(pair).collect()),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&MeshJson { d, p: self.degree, elements })?)
    }

    pub fn from_json(text: &str) -> Result<Mesh> {
        let raw: MeshJson = serde_json::from_str(text)?;
        let d = raw.d;
        let mut elements = Vec::with_capacity(raw.elements.len());
        for (k, ej) in raw.elements.into_iter().enumerate() {
            let e = match (ej.a_over_pi, ej.h_over_pi) {
                (Some(a), Some(h)) => {
                    let center = a.iter().map(|&p| unpair(p)).collect::<Result<Vec<_>>>()?;
                    let half = h.iter().map(|&p| unpair(p)).collect::<Result<Vec<_>>>()?;
                    let e = Element::from_exact(ExactBox { center, half })?;
                    let floats_agree = e.center.iter().zip(&ej.a).all(|(x, y)| (x - y).abs() <= 1e-12)
                        && ej.h.len() == d
                        && ej.h.iter().enumerate().all(|(r, row)| {
                            row.len() == d && row.iter().enumerate().all(|(c, v)| (e.half_leg(r, c) - v).abs() <= 1e-12)
                        });
                    if !floats_agree {
                        return Err(Error::Format(format!("element {k}: float and rational geometry disagree")));
                    }
                    e
                }
                _ => {
                    if ej.h.len() != d || ej.h.iter().any(|row| row.len() != d) {
                        return Err(Error::Format(format!("element {k}: h must be {d} x {d}")));
                    }
                    Element::new(ej.a, ej.h.concat())?
                }
            };
            elements.push(e);
        }
        Mesh::new(d, raw.p, elements)
    }
}

fn pair(r: &Rational64) -> [i64; 2] {
    [*r.numer(), *r.denom()]
}

fn unpair(p: [i64; 2]) -> Result<Rational64> {
    if p[1] == 0 {
        return Err(Error::Format("zero denominator".into()));
    }
    Ok(Rational64::new(p[0], p[1]))
}

#[derive(Serialize, Deserialize)]
struct MeshJson {
    d: usize,
    #[serde(rename = "P")]
    p: usize,
    elements: Vec<ElementJson>,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    a: Vec<f64>,
    h: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a_over_pi: Option<Vec<[i64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_over_pi: Option<Vec<[i64; 2]>>,
}
