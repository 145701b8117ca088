//! Nodal fields on a [`Mesh`] and their serialized forms.
//!
//! Values are ordered element-major, then multi-index lexicographic with
//! axis 1 fastest, then component.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

const MAGIC: &[u8; 4] = b"SEMF";
const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    mesh: Arc<Mesh>,
    components: usize,
    values: Vec<f64>,
}

impl NodalField {
    pub fn new(mesh: Arc<Mesh>, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::Shape("a field needs at least one component".into()));
        }
        let expect = components * mesh.len() * mesh.nodes_per_element();
        if values.len() != expect {
            return Err(Error::Shape(format!("{} values, expected {expect}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value {i}")));
        }
        Ok(Self { mesh, components, values })
    }

    /// Samples `f` at every mapped GLL node. `f` writes `components` values.
    pub fn sample<F>(mesh: Arc<Mesh>, components: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let d = mesh.dim();
        let nodes = mesh.node_positions();
        let mut values = vec![0.0; nodes.len() / d * components];
        for (x, out) in nodes.chunks_exact(d).zip(values.chunks_exact_mut(components)) {
            f(x, out);
            if out.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("sampled value at {x:?}")));
            }
        }
        Self::new(mesh, components, values)
    }

    /// Scalar convenience form of [`NodalField::sample`].
    pub fn sample_scalar<F: Fn(&[f64]) -> f64>(mesh: Arc<Mesh>, f: F) -> Result<Self> {
        Self::sample(mesh, 1, |x, out| out[0] = f(x))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values of element `k`, `(P+1)^d * C` entries.
    pub fn element_values(&self, k: usize) -> &[f64] {
        let per = self.mesh.nodes_per_element() * self.components;
        &self.values[k * per..(k + 1) * per]
    }

    /// Interpolant value at `x`; on shared faces the lowest-index element wins.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mesh = &self.mesh;
        if x.len() != mesh.dim() {
            return Err(Error::Shape(format!("point has {} coordinates, mesh has d={}", x.len(), mesh.dim())));
        }
        let k = mesh.locate(x).ok_or_else(|| Error::NotCovered(x.to_vec()))?;
        let xi = mesh.element(k).map_to_reference(x)?;
        Ok(self.eval_in_element(k, &xi))
    }

    /// Tensor-product interpolant of element `k` at reference point `xi`.
    pub fn eval_in_element(&self, k: usize, xi: &[f64]) -> Vec<f64> {
        let mesh = &self.mesh;
        let d = mesh.dim();
        let n = mesh.degree() + 1;
        let table = &mesh.basis().table;
        let mut scratch = vec![0.0; n];
        let mut phi = vec![0.0; d * n];
        for a in 0..d {
            table.eval_all(xi[a], &mut scratch, &mut phi[a * n..(a + 1) * n]);
        }
        let c = self.components;
        let vals = self.element_values(k);
        let mut out = vec![0.0; c];
        for j in 0..mesh.nodes_per_element() {
            let mut w = 1.0;
            let mut rest = j;
            for a in 0..d {
                w *= phi[a * n + rest % n];
                rest /= n;
            }
            for (o, v) in out.iter_mut().zip(&vals[j * c..(j + 1) * c]) {
                *o += w * v;
            }
        }
        out
    }

    /// Per-element refinement indicator: the largest, over components and
    /// axes, root-mean-square of the top-degree Legendre coefficient along
    /// the grid lines of that axis.
    pub fn tail_indicators(&self) -> Vec<f64> {
        let mesh = &self.mesh;
        let d = mesh.dim();
        let p = mesh.degree();
        let n = p + 1;
        let table = &mesh.basis().table;
        let top: Vec<f64> = (0..n).map(|j| table.get(j, p)).collect();
        let per = mesh.nodes_per_element();
        let lines = per / n;
        let c = self.components;
        (0..mesh.len())
            .map(|k| {
                let vals = self.element_values(k);
                let mut worst = 0.0f64;
                for comp in 0..c {
                    for axis in 0..d {
                        let stride = n.pow(axis as u32);
                        let mut energy = 0.0;
                        for line in 0..lines {
                            // index with the axis digit removed
                            let low = line % stride;
                            let high = line / stride;
                            let base = low + high * stride * n;
                            let coeff: f64 = (0..n).map(|j| top[j] * vals[(base + j * stride) * c + comp]).sum();
                            energy += coeff * coeff;
                        }
                        worst = worst.max((energy / lines as f64).sqrt());
                    }
                }
                worst
            })
            .collect()
    }

    /// Refines every element whose tail indicator exceeds `tol`.
    pub fn refine_by_indicator(&self, tol: f64) -> Result<Mesh> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Param(format!("tolerance must be positive, got {tol}")));
        }
        let flags: Vec<bool> = self.tail_indicators().iter().map(|&v| v > tol).collect();
        self.mesh.refine(&flags)
    }

    /// Little-endian binary form: 32-byte header then the values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        for v in [self.mesh.dim(), self.mesh.degree(), self.mesh.len(), self.components] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.extend_from_slice(&[0u8; 12]);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(mesh: Arc<Mesh>, bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[0..4] != MAGIC {
            return Err(Error::Format("missing SEMF header".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
        let (d, p, k, c) = (word(0), word(1), word(2), word(3));
        if (d, p, k) != (mesh.dim(), mesh.degree(), mesh.len()) {
            return Err(Error::Shape(format!(
                "field header (d={d}, P={p}, K={k}) does not match mesh (d={}, P={}, K={})",
                mesh.dim(),
                mesh.degree(),
                mesh.len()
            )));
        }
        let body = &bytes[HEADER_LEN..];
        if !body.len().is_multiple_of(8) {
            return Err(Error::Format("truncated value block".into()));
        }
        let values = body.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
        Self::new(mesh, c, values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&FieldJson { components: self.components, values: self.values.clone() })?)
    }

    pub fn from_json(mesh: Arc<Mesh>, text: &str) -> Result<Self> {
        let raw: FieldJson = serde_json::from_str(text)?;
        Self::new(mesh, raw.components, raw.values)
    }

    /// `alpha * self + beta * other` on the same mesh.
    pub fn combine(&self, alpha: f64, other: &NodalField, beta: f64) -> Result<Self> {
        if *self.mesh != *other.mesh || self.components != other.components {
            return Err(Error::Shape("fields live on different meshes".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        Self::new(Arc::clone(&self.mesh), self.components, values)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    components: usize,
    values: Vec<f64>,
}
