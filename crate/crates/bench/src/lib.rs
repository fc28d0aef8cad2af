//! Shared fixtures for the criterion benchmarks.

use multicut_core::generate::{self, random_instance, InstanceSpec, Surface};
use multicut_core::EmbeddedGraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded planar instance with `t` terminals and all their pairs.
pub fn planar(vertices: usize, edges: usize, t: usize, seed: u64) -> EmbeddedGraph {
    instance(Surface::Plane, vertices, edges, t, seed)
}

pub fn torus(vertices: usize, edges: usize, t: usize, seed: u64) -> EmbeddedGraph {
    instance(Surface::Torus, vertices, edges, t, seed)
}

fn instance(surface: Surface, vertices: usize, edges: usize, t: usize, seed: u64) -> EmbeddedGraph {
    random_instance(&InstanceSpec {
        surface,
        vertices,
        edges,
        terminals: t,
        pairs: t * (t - 1) / 2,
        min_weight: 1,
        max_weight: 10,
        seed,
    })
    .expect("valid parameters")
}

/// `k` by `k` grid with weights in 1..=20 and `t` terminals, all pairs.
pub fn grid(k: usize, t: usize, seed: u64) -> EmbeddedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = generate::random_weights(&generate::grid(k, k), 1, 20, &mut rng);
    generate::random_terminals(&g, t, t * (t - 1) / 2, &mut rng)
}
