#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sem_fourier::{Mesh, NodalField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform start refined `rounds` times, each element flagged with probability one half.
pub fn random_mesh(rng: &mut ChaCha8Rng, dim: usize, per_axis: usize, degree: usize, rounds: usize, max_elements: usize) -> Mesh {
    let mut mesh = Mesh::uniform(dim, per_axis, degree).unwrap();
    for _ in 0..rounds {
        let flags: Vec<bool> = (0..mesh.len()).map(|_| rng.gen_bool(0.5)).collect();
        let grown = mesh.len() + flags.iter().filter(|&&f| f).count() * ((1 << dim) - 1);
        if grown > max_elements {
            break;
        }
        mesh = mesh.refine(&flags).unwrap();
    }
    mesh
}

pub fn random_field(rng: &mut ChaCha8Rng, mesh: Arc<Mesh>, components: usize) -> NodalField {
    let n = mesh.len() * mesh.nodes_per_element() * components;
    let values = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    NodalField::new(mesh, components, values).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI)).collect()
}
