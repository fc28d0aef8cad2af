//! Reference computations used to check the solver: multicut testing,
//! exhaustive search, maximum flow, and the dual of a multicut.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::cutgraph::UnionFind;
use crate::embed::{EdgeId, EmbeddedGraph, FaceStructure, VertexId, Weight};
use crate::error::{Error, Result};

/// Largest edge count accepted by [`brute_force_multicut`].
pub const BRUTE_FORCE_EDGES: usize = 22;

/// Where a solver answer came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub topology: usize,
    pub encoding: String,
    /// Crossing sequences of the drawn dual edges, as `(cut edge, side)`.
    pub sequences: Vec<Vec<(usize, u8)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticutResult {
    /// Distinct edge ids, sorted.
    pub edges: Vec<EdgeId>,
    pub weight: Weight,
    pub certificate: Option<Certificate>,
}

impl MulticutResult {
    pub fn new(g: &EmbeddedGraph, mut edges: Vec<EdgeId>) -> MulticutResult {
        edges.sort_unstable();
        edges.dedup();
        let weight = g.weight_of(&edges);
        MulticutResult { edges, weight, certificate: None }
    }
}

/// Components of `g` without `removed`.
fn components(g: &EmbeddedGraph, removed: &[bool]) -> UnionFind {
    let mut uf = UnionFind::new(g.num_vertices());
    for (e, edge) in g.edges().iter().enumerate() {
        if !removed[e] {
            uf.union(edge.tail, edge.head);
        }
    }
    uf
}

pub fn is_multicut(g: &EmbeddedGraph, pairs: &[(VertexId, VertexId)], cut: &[EdgeId]) -> Result<bool> {
    let mut removed = vec![false; g.num_edges()];
    for &e in cut {
        if e >= g.num_edges() {
            return Err(Error::Input(format!("unknown edge {e}")));
        }
        removed[e] = true;
    }
    let mut uf = components(g, &removed);
    Ok(pairs.iter().all(|&(a, b)| uf.find(a) != uf.find(b)))
}

/// Exact minimum multicut by exhaustive search. Among optimal sets the
/// lexicographically smallest list of edge ids is returned.
pub fn brute_force_multicut(g: &EmbeddedGraph) -> Result<MulticutResult> {
    let m = g.num_edges();
    if m > BRUTE_FORCE_EDGES {
        return Err(Error::Resource(format!("{m} edges exceed the exhaustive limit of {BRUTE_FORCE_EDGES}")));
    }
    if g.pairs().is_empty() {
        return Ok(MulticutResult::new(g, vec![]));
    }
    let mut order: Vec<EdgeId> = (0..m).collect();
    order.sort_by_key(|&e| (std::cmp::Reverse(g.weight(e)), e));
    let mut best: Option<(Weight, Vec<EdgeId>)> = None;
    let mut chosen = vec![false; m];
    search(g, &order, 0, 0, &mut chosen, &mut best);
    let (_, edges) = best.expect("cutting every edge separates all pairs");
    Ok(MulticutResult::new(g, edges))
}

fn search(
    g: &EmbeddedGraph,
    order: &[EdgeId],
    i: usize,
    weight: Weight,
    chosen: &mut [bool],
    best: &mut Option<(Weight, Vec<EdgeId>)>,
) {
    if let Some((bw, _)) = best {
        if weight > *bw {
            return;
        }
    }
    if i == order.len() {
        let mut uf = components(g, chosen);
        if g.pairs().iter().all(|&(a, b)| uf.find(a) != uf.find(b)) {
            let set: Vec<EdgeId> = (0..chosen.len()).filter(|&e| chosen[e]).collect();
            let better = match best {
                None => true,
                Some((bw, bs)) => (weight, &set) < (*bw, bs),
            };
            if better {
                *best = Some((weight, set));
            }
        }
        return;
    }
    // without every remaining edge the pairs must already be separable
    let mut all = chosen.to_vec();
    for &e in &order[i..] {
        all[e] = true;
    }
    let mut uf = components(g, &all);
    if g.pairs().iter().any(|&(a, b)| uf.find(a) == uf.find(b)) {
        return;
    }
    let e = order[i];
    chosen[e] = true;
    search(g, order, i + 1, weight + g.weight(e), chosen, best);
    chosen[e] = false;
    search(g, order, i + 1, weight, chosen, best);
}

/// Minimum `s`-`t` cut value by Dinic's algorithm; every edge carries its
/// weight in both directions.
pub fn max_flow_min_cut(g: &EmbeddedGraph, s: VertexId, t: VertexId) -> Result<Weight> {
    if s == t || s >= g.num_vertices() || t >= g.num_vertices() {
        return Err(Error::Input(format!("bad source and sink {s}, {t}")));
    }
    let n = g.num_vertices();
    // arcs 2i and 2i + 1 are the two directions of edge i
    let mut head = Vec::new();
    let mut cap = Vec::new();
    let mut adj = vec![Vec::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        let (a, b) = (edge.tail, edge.head);
        if a == b {
            continue;
        }
        adj[a].push(head.len());
        head.push(b);
        cap.push(g.weight(e));
        adj[b].push(head.len());
        head.push(a);
        cap.push(g.weight(e));
    }
    let mut flow = 0;
    loop {
        let mut level = vec![usize::MAX; n];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &a in &adj[x] {
                if cap[a] > 0 && level[head[a]] == usize::MAX {
                    level[head[a]] = level[x] + 1;
                    queue.push_back(head[a]);
                }
            }
        }
        if level[t] == usize::MAX {
            return Ok(flow);
        }
        let mut next = vec![0; n];
        loop {
            let pushed = augment(s, t, Weight::MAX, &adj, &head, &mut cap, &level, &mut next);
            if pushed == 0 {
                break;
            }
            flow += pushed;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn augment(
    x: usize,
    t: usize,
    limit: Weight,
    adj: &[Vec<usize>],
    head: &[usize],
    cap: &mut [Weight],
    level: &[usize],
    next: &mut [usize],
) -> Weight {
    if x == t {
        return limit;
    }
    while next[x] < adj[x].len() {
        let a = adj[x][next[x]];
        let y = head[a];
        if cap[a] > 0 && level[y] == level[x] + 1 {
            let got = augment(y, t, limit.min(cap[a]), adj, head, cap, level, next);
            if got > 0 {
                cap[a] -= got;
                cap[a ^ 1] += got;
                return got;
            }
        }
        next[x] += 1;
    }
    0
}

/// The subgraph of the dual made of the duals of a multicut's edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSubgraph {
    pub edges: Vec<EdgeId>,
    pub length: Weight,
    /// Region of the surface minus the dual holding each vertex.
    pub region: Vec<usize>,
}

/// Builds the dual of `cut` and checks, on the surface itself, that it
/// separates every pair: regions are traced through face corners, cutting
/// each face where a dual edge leaves its centre.
pub fn dual_of_multicut(g: &EmbeddedGraph, faces: &FaceStructure, cut: &[EdgeId]) -> Result<DualSubgraph> {
    if !is_multicut(g, g.pairs(), cut)? {
        return Err(Error::Contract("edge set is not a multicut".into()));
    }
    let mut edges = cut.to_vec();
    edges.sort_unstable();
    edges.dedup();
    let mut crossed = vec![false; g.num_edges()];
    for &e in &edges {
        crossed[e] = true;
    }
    let n = g.num_vertices();
    let corners: usize = faces.walks.iter().map(|w| w.len()).sum();
    let mut uf = UnionFind::new(n + corners);
    let mut base = n;
    for walk in &faces.walks {
        let k = walk.len();
        for (i, &x) in walk.iter().enumerate() {
            uf.union(base + i, g.dart_origin(x / 2));
            let e = x / 4;
            if !crossed[e] {
                uf.union(base + i, base + (i + 1) % k);
            }
        }
        base += k;
    }
    let region: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    for &(a, b) in g.pairs() {
        if region[a] == region[b] {
            return Err(Error::Contract(format!("dual leaves {a} and {b} in one region")));
        }
    }
    let length = g.weight_of(&edges);
    Ok(DualSubgraph { edges, length, region })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::trace_faces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Triangle a=0, b=1, c=2 with ab=1, bc=2, ca=3.
    fn triangle() -> EmbeddedGraph {
        generate::from_coordinates(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], &[(0, 1), (1, 2), (2, 0)])
            .with_weights(&[1, 2, 3])
            .unwrap()
            .with_terminals(vec![0, 1], vec![(0, 1)])
            .unwrap()
    }

    #[test]
    fn triangle_multicuts() {
        let g = triangle();
        assert!(is_multicut(&g, g.pairs(), &[0, 1]).unwrap());
        assert!(!is_multicut(&g, g.pairs(), &[0]).unwrap());
        assert!(is_multicut(&g, g.pairs(), &[0, 1, 2]).unwrap());
        assert!(is_multicut(&g, g.pairs(), &[7]).is_err());
        let r = brute_force_multicut(&g).unwrap();
        assert_eq!((r.weight, r.edges), (3, vec![0, 1]));
        let faces = trace_faces(&g).unwrap();
        let d = dual_of_multicut(&g, &faces, &[0, 1]).unwrap();
        assert_eq!(d.length, 3);
        assert!(dual_of_multicut(&g, &faces, &[0]).is_err());
    }

    #[test]
    fn empty_pairs_and_four_cycle() {
        let g = triangle().with_terminals(vec![], vec![]).unwrap();
        let r = brute_force_multicut(&g).unwrap();
        assert_eq!((r.weight, r.edges.len()), (0, 0));
        let faces = trace_faces(&g).unwrap();
        assert_eq!(dual_of_multicut(&g, &faces, &[]).unwrap().length, 0);
        let c4 = generate::grid(2, 2).with_terminals(vec![0, 3], vec![(0, 3)]).unwrap();
        assert_eq!(brute_force_multicut(&c4).unwrap().weight, 2);
    }

    #[test]
    fn flows() {
        let g = generate::path(2).with_weights(&[5]).unwrap();
        assert_eq!(max_flow_min_cut(&g, 0, 1).unwrap(), 5);
        // routes 0-1-3 and 0-2-3 with bottlenecks 2 and 3
        let g = generate::grid(2, 2).with_weights(&[2, 3, 7, 9]).unwrap();
        assert_eq!(max_flow_min_cut(&g, 0, 3).unwrap(), 5);
        let grid = generate::grid(5, 5).with_terminals(vec![0, 24], vec![(0, 24)]).unwrap();
        assert_eq!(max_flow_min_cut(&grid, 0, 24).unwrap(), 2);
        let small = generate::grid(3, 4).with_terminals(vec![0, 11], vec![(0, 11)]).unwrap();
        assert_eq!(max_flow_min_cut(&small, 0, 11).unwrap(), brute_force_multicut(&small).unwrap().weight);
    }

    #[test]
    fn oracles_agree_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let g = generate::random_planar(7, 12, &mut rng);
            let g = generate::random_weights(&g, 1, 10, &mut rng);
            let g = generate::random_terminals(&g, 2, 1, &mut rng);
            let (s, t) = g.pairs()[0];
            let bf = brute_force_multicut(&g).unwrap();
            assert_eq!(max_flow_min_cut(&g, s, t).unwrap(), bf.weight);
            let faces = trace_faces(&g).unwrap();
            assert_eq!(dual_of_multicut(&g, &faces, &bf.edges).unwrap().length, bf.weight);
        }
    }
}
