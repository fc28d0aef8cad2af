//! Fixture maps and seeded random instance generators.

use crate::embed::{rotation_from_gmap, Edge, EmbeddedGraph, VertexId, Weight};
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Builds a planar map from straight-line coordinates; rotations are sorted
/// counter-clockwise by angle.
pub fn from_coordinates(points: &[(f64, f64)], edges: &[(VertexId, VertexId)]) -> EmbeddedGraph {
    let mut rotation: Vec<Vec<(f64, usize)>> = vec![Vec::new(); points.len()];
    for (e, &(a, b)) in edges.iter().enumerate() {
        let ang = |from: usize, to: usize| {
            let (x0, y0) = points[from];
            let (x1, y1) = points[to];
            (y1 - y0).atan2(x1 - x0)
        };
        rotation[a].push((ang(a, b), 2 * e));
        rotation[b].push((ang(b, a), 2 * e + 1));
    }
    let rotation = rotation
        .into_iter()
        .map(|mut r| {
            r.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            r.into_iter().map(|(_, d)| d).collect()
        })
        .collect();
    let edges = edges.iter().map(|&(a, b)| Edge { tail: a, head: b, weight: 1, twisted: false }).collect();
    EmbeddedGraph::new(points.len(), edges, rotation, vec![], vec![]).expect("valid planar drawing")
}

/// The cube as a planar map (two nested squares joined by spokes).
pub fn cube() -> EmbeddedGraph {
    let pts = [
        (-2.0, -2.0),
        (2.0, -2.0),
        (2.0, 2.0),
        (-2.0, 2.0),
        (-1.0, -1.0),
        (1.0, -1.0),
        (1.0, 1.0),
        (-1.0, 1.0),
    ];
    let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)];
    from_coordinates(&pts, &edges)
}

/// `rows x cols` grid graph; vertex `(r, c)` has id `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> EmbeddedGraph {
    let mut pts = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            pts.push((c as f64, r as f64));
        }
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    from_coordinates(&pts, &edges)
}

/// A path on `n` vertices drawn on the sphere.
pub fn path(n: usize) -> EmbeddedGraph {
    let pts: Vec<_> = (0..n).map(|i| (i as f64, 0.0)).collect();
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    from_coordinates(&pts, &edges)
}

/// One vertex with two interleaved loops (rotation `a b a' b'`): the torus.
pub fn torus_bouquet(wa: Weight, wb: Weight) -> EmbeddedGraph {
    let edges = vec![
        Edge { tail: 0, head: 0, weight: wa, twisted: false },
        Edge { tail: 0, head: 0, weight: wb, twisted: false },
    ];
    EmbeddedGraph::new(1, edges, vec![vec![0, 2, 1, 3]], vec![], vec![]).unwrap()
}

/// One vertex with a single twisted loop: the projective plane.
pub fn projective_loop() -> EmbeddedGraph {
    let edges = vec![Edge { tail: 0, head: 0, weight: 1, twisted: true }];
    EmbeddedGraph::new(1, edges, vec![vec![0, 1]], vec![], vec![]).unwrap()
}

/// Random connected map on the surface of `base` with the given numbers of
/// vertices and edges, grown by pendant edges and chords inside faces (both
/// keep the surface). Flags of edge `e` are `4e..4e + 4`.
pub fn grow<R: Rng>(base: &EmbeddedGraph, vertices: usize, edges: usize, rng: &mut R) -> EmbeddedGraph {
    assert!(vertices >= base.num_vertices());
    let pendants = vertices - base.num_vertices();
    assert!(edges >= base.num_edges() + pendants, "not enough edges for the requested vertices");
    let chords = edges - base.num_edges() - pendants;
    let mut g = base.gmap();
    let mut ops: Vec<bool> = std::iter::repeat(true)
        .take(pendants)
        .chain(std::iter::repeat(false).take(chords))
        .collect();
    ops.shuffle(rng);
    for pendant in ops {
        if pendant {
            let c = rng.gen_range(0..g.len());
            g.add_pendant(c);
        } else {
            // pick a face with at least two corners, then two distinct corners on it
            let corners: Vec<usize> = loop {
                let x = rng.gen_range(0..g.len());
                let walk = g.face_walk(x);
                let c: Vec<usize> = walk.iter().copied().skip(1).step_by(2).collect();
                if c.len() >= 2 {
                    break c;
                }
            };
            let i = rng.gen_range(0..corners.len());
            let mut j = rng.gen_range(0..corners.len() - 1);
            if j >= i {
                j += 1;
            }
            g.insert_edge(corners[i], corners[j]).expect("corners share a face");
        }
    }
    let mut weights = vec![1; g.len() / 4];
    for (i, w) in base.edges().iter().map(|e| e.weight).enumerate() {
        weights[i] = w;
    }
    rotation_from_gmap(&g, &|x| x / 2, &weights).expect("grown map is valid")
}

pub fn random_planar<R: Rng>(vertices: usize, edges: usize, rng: &mut R) -> EmbeddedGraph {
    grow(&path(2), vertices, edges, rng)
}

pub fn random_torus<R: Rng>(vertices: usize, edges: usize, rng: &mut R) -> EmbeddedGraph {
    grow(&torus_bouquet(1, 1), vertices, edges, rng)
}

pub fn random_weights<R: Rng>(g: &EmbeddedGraph, lo: Weight, hi: Weight, rng: &mut R) -> EmbeddedGraph {
    let w: Vec<Weight> = (0..g.num_edges()).map(|_| rng.gen_range(lo..=hi)).collect();
    g.with_weights(&w).unwrap()
}

/// Picks `t` distinct terminals and `pairs` distinct terminal pairs.
pub fn random_terminals<R: Rng>(g: &EmbeddedGraph, t: usize, pairs: usize, rng: &mut R) -> EmbeddedGraph {
    let mut vs: Vec<VertexId> = (0..g.num_vertices()).collect();
    vs.shuffle(rng);
    let terms: Vec<VertexId> = vs[..t.min(vs.len())].to_vec();
    let mut all = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            all.push((terms[i], terms[j]));
        }
    }
    all.shuffle(rng);
    all.truncate(pairs);
    g.with_terminals(terms, all).unwrap()
}

/// All pairs of the given terminals (multiway cut).
pub fn all_pairs(g: &EmbeddedGraph, terms: &[VertexId]) -> EmbeddedGraph {
    let mut all = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            all.push((terms[i], terms[j]));
        }
    }
    g.with_terminals(terms.to_vec(), all).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Surface {
    Plane,
    Torus,
}

/// Parameters of [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct InstanceSpec {
    pub surface: Surface,
    pub vertices: usize,
    pub edges: usize,
    pub terminals: usize,
    pub pairs: usize,
    pub min_weight: Weight,
    pub max_weight: Weight,
    pub seed: u64,
}

/// Seeded random instance; the same spec always gives the same map.
pub fn random_instance(spec: &InstanceSpec) -> Result<EmbeddedGraph> {
    let base = match spec.surface {
        Surface::Plane => path(2),
        Surface::Torus => torus_bouquet(1, 1),
    };
    let min_edges = base.num_edges() + spec.vertices.saturating_sub(base.num_vertices());
    if spec.vertices < base.num_vertices() || spec.edges < min_edges {
        return Err(Error::Input(format!(
            "need at least {} vertices and {} edges for these vertices",
            base.num_vertices(),
            min_edges
        )));
    }
    if spec.terminals > spec.vertices {
        return Err(Error::Input("more terminals than vertices".into()));
    }
    if spec.min_weight > spec.max_weight {
        return Err(Error::Input("empty weight range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = grow(&base, spec.vertices, spec.edges, &mut rng);
    let g = random_weights(&g, spec.min_weight, spec.max_weight, &mut rng);
    Ok(random_terminals(&g, spec.terminals, spec.pairs, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::trace_faces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grown_maps_keep_their_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = random_planar(6, 10, &mut rng);
            assert_eq!(trace_faces(&p).unwrap().euler_genus, 0);
            let t = random_torus(4, 9, &mut rng);
            let f = trace_faces(&t).unwrap();
            assert_eq!(f.euler_genus, 2);
            assert!(f.orientable);
            assert_eq!(t.num_edges(), 9);
            assert_eq!(t.num_vertices(), 4);
        }
    }

    #[test]
    fn grid_counts() {
        let g = grid(3, 4);
        assert_eq!(g.num_vertices(), 12);
        assert_eq!(g.num_edges(), 17);
        assert_eq!(trace_faces(&g).unwrap().num_faces(), 7);
    }
}
