//! Surface-embedded graphs given by signed rotation systems.
//!
//! Edge `e` owns darts `2e` (at its tail) and `2e + 1` (at its head). The
//! rotation at a vertex lists its darts in cyclic order; an edge with sign
//! `-1` is twisted. Internally every map is converted to a [`GMap`] with
//! flags `2d` (the side of dart `d` facing the next dart in rotation) and
//! `2d + 1`.

use crate::error::{Error, Result};
use crate::gmap::{Flag, GMap};
use serde::{Deserialize, Serialize};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Dart = usize;
pub type FaceId = usize;
pub type Weight = u64;

#[inline]
pub fn dart_edge(d: Dart) -> EdgeId {
    d / 2
}

#[inline]
pub fn dart_twin(d: Dart) -> Dart {
    d ^ 1
}

/// Edge of an [`EmbeddedGraph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: Weight,
    pub twisted: bool,
}

/// A weighted graph cellularly embedded on a surface, with terminals and
/// terminal pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedGraph {
    num_vertices: usize,
    edges: Vec<Edge>,
    rotation: Vec<Vec<Dart>>,
    terminals: Vec<VertexId>,
    pairs: Vec<(VertexId, VertexId)>,
}

impl EmbeddedGraph {
    /// Builds and validates a map. Terminal pairs are normalised to
    /// `(min, max)` and deduplicated.
    pub fn new(
        num_vertices: usize,
        edges: Vec<Edge>,
        rotation: Vec<Vec<Dart>>,
        terminals: Vec<VertexId>,
        pairs: Vec<(VertexId, VertexId)>,
    ) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::Structure("graph has no vertices".into()));
        }
        if rotation.len() != num_vertices {
            return Err(Error::Structure(format!(
                "expected {num_vertices} rotations, got {}",
                rotation.len()
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= num_vertices || e.head >= num_vertices {
                return Err(Error::Structure(format!("edge {i} has an unknown endpoint")));
            }
        }
        let mut seen = vec![false; 2 * edges.len()];
        for (v, rot) in rotation.iter().enumerate() {
            for &d in rot {
                if d >= seen.len() {
                    return Err(Error::Structure(format!("dart {d} at vertex {v} does not exist")));
                }
                if seen[d] {
                    return Err(Error::Structure(format!("dart {d} appears twice")));
                }
                seen[d] = true;
                let e = &edges[dart_edge(d)];
                let origin = if d % 2 == 0 { e.tail } else { e.head };
                if origin != v {
                    return Err(Error::Structure(format!(
                        "dart {d} listed at vertex {v} but belongs to vertex {origin}"
                    )));
                }
            }
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(Error::Structure(format!("dart {d} missing from every rotation")));
        }
        let mut terms = terminals.clone();
        terms.sort_unstable();
        terms.dedup();
        if terms.len() != terminals.len() {
            return Err(Error::Input("duplicate terminal".into()));
        }
        if let Some(&t) = terms.iter().find(|&&t| t >= num_vertices) {
            return Err(Error::Input(format!("terminal {t} is not a vertex")));
        }
        let mut norm = Vec::new();
        for &(a, b) in &pairs {
            if a == b {
                return Err(Error::Input(format!("pair ({a}, {b}) repeats a terminal")));
            }
            if terms.binary_search(&a).is_err() || terms.binary_search(&b).is_err() {
                return Err(Error::Input(format!("pair ({a}, {b}) uses a non-terminal")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        let g = EmbeddedGraph { num_vertices, edges, rotation, terminals: terms, pairs: norm };
        if !g.is_connected() {
            return Err(Error::Structure("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn weight(&self, e: EdgeId) -> Weight {
        self.edges[e].weight
    }

    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotation[v]
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn dart_origin(&self, d: Dart) -> VertexId {
        let e = &self.edges[dart_edge(d)];
        if d % 2 == 0 {
            e.tail
        } else {
            e.head
        }
    }

    /// Same embedding with a different terminal set.
    pub fn with_terminals(&self, terminals: Vec<VertexId>, pairs: Vec<(VertexId, VertexId)>) -> Result<Self> {
        EmbeddedGraph::new(self.num_vertices, self.edges.clone(), self.rotation.clone(), terminals, pairs)
    }

    /// Same embedding with new weights.
    pub fn with_weights(&self, weights: &[Weight]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::Input("weight vector has the wrong length".into()));
        }
        let mut g = self.clone();
        for (e, &w) in g.edges.iter_mut().zip(weights) {
            e.weight = w;
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.num_vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = self.num_vertices;
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
        comps == 1
    }

    /// Flag of dart `d` on side `s` (0 or 1).
    #[inline]
    pub fn flag(d: Dart, s: usize) -> Flag {
        2 * d + s
    }

    /// The generalized map of this embedding. Flag `2d` is the side of dart
    /// `d` facing the next dart in its rotation.
    pub fn gmap(&self) -> GMap {
        let n = 4 * self.edges.len();
        let mut a0 = vec![0; n];
        let mut a1 = vec![0; n];
        let a2: Vec<Flag> = (0..n).map(|x| x ^ 1).collect();
        for rot in &self.rotation {
            let k = rot.len();
            for i in 0..k {
                let d = rot[i];
                let next = rot[(i + 1) % k];
                a1[2 * d] = 2 * next + 1;
                a1[2 * next + 1] = 2 * d;
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let (d, db) = (2 * e, 2 * e + 1);
            if edge.twisted {
                a0[2 * d] = 2 * db;
                a0[2 * db] = 2 * d;
                a0[2 * d + 1] = 2 * db + 1;
                a0[2 * db + 1] = 2 * d + 1;
            } else {
                a0[2 * d] = 2 * db + 1;
                a0[2 * db + 1] = 2 * d;
                a0[2 * d + 1] = 2 * db;
                a0[2 * db] = 2 * d + 1;
            }
        }
        GMap::from_involutions(a0, a1, a2).expect("rotation system yields involutions")
    }

    /// Total weight of a set of edges (duplicates counted once).
    pub fn weight_of(&self, edges: &[EdgeId]) -> Weight {
        let mut v = edges.to_vec();
        v.sort_unstable();
        v.dedup();
        v.iter().map(|&e| self.edges[e].weight).sum()
    }
}

/// Converts a closed generalized map back into a signed rotation system.
/// `dart_of` names the dart of every flag (both flags of a half-edge must get
/// the same dart; the darts of an edge must be `2e` and `2e + 1`). Vertices
/// are numbered by smallest flag of their orbit.
pub fn rotation_from_gmap(
    g: &GMap,
    dart_of: &dyn Fn(Flag) -> Dart,
    weights: &[Weight],
) -> Result<EmbeddedGraph> {
    let num_edges = weights.len();
    let (vlabel, nv) = g.orbit_labels(1, 2);
    let mut first = vec![usize::MAX; nv];
    for x in 0..g.len() {
        if first[vlabel[x]] == usize::MAX {
            first[vlabel[x]] = x;
        }
    }
    let mut rotation = vec![Vec::new(); nv];
    let mut out_flag = vec![usize::MAX; 2 * num_edges];
    let mut origin = vec![usize::MAX; 2 * num_edges];
    for v in 0..nv {
        let start = first[v];
        let mut x = start;
        loop {
            let d = dart_of(x);
            rotation[v].push(d);
            out_flag[d] = x;
            origin[d] = v;
            let y = g.a1(x);
            x = g.a2(y);
            if x == start {
                break;
            }
        }
    }
    let mut edges = Vec::with_capacity(num_edges);
    for e in 0..num_edges {
        let (d, db) = (2 * e, 2 * e + 1);
        if out_flag[d] == usize::MAX || out_flag[db] == usize::MAX {
            return Err(Error::Structure(format!("edge {e} lost a dart")));
        }
        let twisted = g.a0(out_flag[d]) == out_flag[db];
        edges.push(Edge { tail: origin[d], head: origin[db], weight: weights[e], twisted });
    }
    EmbeddedGraph::new(nv, edges, rotation, Vec::new(), Vec::new())
}

/// Facial walks and Euler genus of an embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceStructure {
    /// For every face, the flags at which its walk traverses an edge side.
    /// Consecutive entries `x, y` satisfy `y = a1(a0(x))`.
    pub walks: Vec<Vec<Flag>>,
    pub face_of_flag: Vec<FaceId>,
    pub euler_genus: u32,
    pub orientable: bool,
}

impl FaceStructure {
    pub fn num_faces(&self) -> usize {
        self.walks.len()
    }

    /// Darts traversed by the walk of face `f`, in order.
    pub fn darts(&self, f: FaceId) -> Vec<Dart> {
        self.walks[f].iter().map(|&x| x / 2).collect()
    }

    /// Faces on the two sides of edge `e`: `(face of flag 4e, face of flag 4e + 1)`.
    pub fn edge_faces(&self, e: EdgeId) -> (FaceId, FaceId) {
        (self.face_of_flag[4 * e], self.face_of_flag[4 * e + 1])
    }
}

/// Traces every facial walk and derives the Euler genus from
/// `v - e + f = 2 - g`.
pub fn trace_faces(map: &EmbeddedGraph) -> Result<FaceStructure> {
    let g = map.gmap();
    faces_of_gmap(&g)
}

pub(crate) fn faces_of_gmap(g: &GMap) -> Result<FaceStructure> {
    let n = g.len();
    let mut face_of_flag = vec![usize::MAX; n];
    let mut walks = Vec::new();
    for s in 0..n {
        if face_of_flag[s] != usize::MAX {
            continue;
        }
        let orbit = g.face_walk(s);
        let id = walks.len();
        for &x in &orbit {
            face_of_flag[x] = id;
        }
        walks.push(orbit.iter().step_by(2).copied().collect::<Vec<_>>());
    }
    let chi = g.vertex_count() as i64 - g.edge_count() as i64 + walks.len() as i64;
    if chi > 2 {
        return Err(Error::Structure(format!("Euler characteristic {chi} exceeds 2")));
    }
    Ok(FaceStructure { walks, face_of_flag, euler_genus: (2 - chi) as u32, orientable: g.is_orientable() })
}

/// The dual map: one vertex per face and one edge `e*` per edge `e`, with the
/// same weight. Dart `2e` of `e*` lies on the side of flag `4e`.
pub fn dual_graph(map: &EmbeddedGraph, _faces: &FaceStructure) -> Result<EmbeddedGraph> {
    let g = map.gmap();
    let dual = GMap::from_involutions(
        (0..g.len()).map(|x| g.a2(x)).collect(),
        (0..g.len()).map(|x| g.a1(x)).collect(),
        (0..g.len()).map(|x| g.a0(x)).collect(),
    )?;
    // Half-edges of the dual are the edge sides {x, a0 x}; flags 4e and 4e+1
    // lie on different sides.
    let mut dart_of = vec![usize::MAX; g.len()];
    for e in 0..map.num_edges() {
        for (s, x) in [(0, 4 * e), (1, 4 * e + 1)] {
            dart_of[x] = 2 * e + s;
            dart_of[g.a0(x)] = 2 * e + s;
        }
    }
    let weights: Vec<Weight> = map.edges().iter().map(|e| e.weight).collect();
    rotation_from_gmap(&dual, &|x| dart_of[x], &weights)
}

/// Isomorphism of embedded graphs as weighted maps (terminals ignored).
pub fn maps_isomorphic(a: &EmbeddedGraph, b: &EmbeddedGraph) -> bool {
    if a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges() {
        return false;
    }
    let (ga, gb) = (a.gmap(), b.gmap());
    ga.isomorphic_with(&gb, |x| a.weight(x / 4), |y| b.weight(y / 4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn e(tail: usize, head: usize) -> Edge {
        Edge { tail, head, weight: 1, twisted: false }
    }

    #[test]
    fn cube_has_six_faces() {
        let cube = generate::cube();
        let f = trace_faces(&cube).unwrap();
        assert_eq!(f.num_faces(), 6);
        assert_eq!(f.euler_genus, 0);
        assert!(f.orientable);
    }

    #[test]
    fn single_loop_is_sphere() {
        let g = EmbeddedGraph::new(1, vec![e(0, 0)], vec![vec![0, 1]], vec![], vec![]).unwrap();
        let f = trace_faces(&g).unwrap();
        assert_eq!(f.num_faces(), 2);
        assert_eq!(f.euler_genus, 0);
    }

    #[test]
    fn interleaved_loops_make_a_torus() {
        let g = generate::torus_bouquet(1, 1);
        let f = trace_faces(&g).unwrap();
        assert_eq!(f.num_faces(), 1);
        assert_eq!(f.euler_genus, 2);
        assert!(f.orientable);
    }

    #[test]
    fn twisted_loop_is_projective_plane() {
        let g = EmbeddedGraph::new(
            1,
            vec![Edge { tail: 0, head: 0, weight: 1, twisted: true }],
            vec![vec![0, 1]],
            vec![],
            vec![],
        )
        .unwrap();
        let f = trace_faces(&g).unwrap();
        assert_eq!(f.num_faces(), 1);
        assert_eq!(f.euler_genus, 1);
        assert!(!f.orientable);
    }

    #[test]
    fn rejects_duplicated_dart() {
        let err = EmbeddedGraph::new(2, vec![e(0, 1)], vec![vec![0, 0], vec![1]], vec![], vec![]);
        assert!(matches!(err, Err(Error::Structure(_))));
    }

    #[test]
    fn rejects_missing_dart() {
        let err = EmbeddedGraph::new(2, vec![e(0, 1)], vec![vec![0], vec![]], vec![], vec![]);
        assert!(matches!(err, Err(Error::Structure(_))));
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let cube = generate::cube();
        let f = trace_faces(&cube).unwrap();
        let d = dual_graph(&cube, &f).unwrap();
        assert_eq!(d.num_vertices(), 6);
        assert_eq!(d.num_edges(), 12);
        let fd = trace_faces(&d).unwrap();
        assert_eq!(fd.num_faces(), 8);
        assert!(d.rotation.iter().all(|r| r.len() == 4));
    }

    #[test]
    fn loop_dual_is_an_edge() {
        let g = EmbeddedGraph::new(1, vec![e(0, 0)], vec![vec![0, 1]], vec![], vec![]).unwrap();
        let d = dual_graph(&g, &trace_faces(&g).unwrap()).unwrap();
        assert_eq!(d.num_vertices(), 2);
        assert_eq!(d.num_edges(), 1);
    }

    #[test]
    fn dual_edge_joins_the_faces_of_its_primal_edge() {
        let cube = generate::cube();
        let f = trace_faces(&cube).unwrap();
        let d = dual_graph(&cube, &f).unwrap();
        assert_eq!(trace_faces(&d).unwrap().num_faces(), cube.num_vertices());
        for e in 0..cube.num_edges() {
            let (a, b) = f.edge_faces(e);
            let de = d.edge(e);
            // dual vertices are numbered like faces, by smallest flag
            assert_eq!((a, b), (de.tail, de.head));
        }
    }
}
