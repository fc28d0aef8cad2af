//! Crossing sequences of dual edges with the cut graph, and shortest paths
//! constrained to a crossing sequence.
//!
//! A path with a prescribed crossing sequence lives in a chain of copies of
//! the disk `D`, where copy `i` is glued to copy `i + 1` along the side pair
//! named by entry `i`. Gluing moves are one-way, so every path from the first
//! copy to the last crosses the cut graph in exactly the given order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cutgraph::DiskSchema;
use crate::embed::{EdgeId, FaceId, Weight};
use crate::error::{Error, Result};
use crate::topology::{End, Layout, Topology};

/// One crossing with the cut graph: the edge and the copy of it (the side of
/// the disk) through which the path leaves the current copy of `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqEntry {
    pub edge: usize,
    pub copy: u8,
}

impl SeqEntry {
    pub fn flipped(self) -> SeqEntry {
        SeqEntry { edge: self.edge, copy: 1 - self.copy }
    }
}

pub type CrossingSequence = Vec<SeqEntry>;

/// The same curve walked backwards.
pub fn reverse_sequence(seq: &[SeqEntry]) -> CrossingSequence {
    seq.iter().rev().map(|e| e.flipped()).collect()
}

pub fn check_sequence(schema: &DiskSchema, seq: &[SeqEntry]) -> Result<()> {
    for (i, e) in seq.iter().enumerate() {
        if e.edge >= schema.num_kedges() || e.copy > 1 {
            return Err(Error::Sequence(format!("entry {i} names no side of the cut graph")));
        }
        if schema.segments(e.edge) == 0 {
            return Err(Error::Sequence(format!("cut-graph edge {} has no segment", e.edge)));
        }
    }
    Ok(())
}

/// A maximal chain of the dual through glued boundary points. Ends are
/// internal nodes of the topology; closed chains have none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub from: Option<usize>,
    pub to: Option<usize>,
    pub seq: CrossingSequence,
}

/// Chains of a topology, starting from the nodes in order, then closed
/// chains from their lowest point.
pub fn crossing_sequences(top: &Topology, schema: &DiskSchema) -> Result<Vec<Chain>> {
    let layout = Layout::new(schema, &top.counts)?;
    let n = layout.num_points();
    let mut at = vec![usize::MAX; n];
    for (i, &(a, b)) in top.edges.iter().enumerate() {
        for end in [a, b] {
            if let End::Point(p) = end {
                if p >= n || at[p] != usize::MAX {
                    return Err(Error::Topology(format!("point {p} is not used exactly once")));
                }
                at[p] = i;
            }
        }
    }
    if at.contains(&usize::MAX) {
        return Err(Error::Topology("a boundary point has no edge".into()));
    }
    let entry = |p: usize| SeqEntry { edge: layout.point_edge[p], copy: layout.point_copy[p] };
    let other = |i: usize, p: usize| {
        let (a, b) = top.edges[i];
        if a == End::Point(p) {
            b
        } else {
            a
        }
    };
    let mut used = vec![false; top.edges.len()];
    let mut chains = Vec::new();
    for u in 0..top.nodes {
        for &i in &top.rotation[u] {
            if used[i] {
                continue;
            }
            used[i] = true;
            let (a, b) = top.edges[i];
            let start = if a == End::Node(u) { b } else { a };
            let mut seq = Vec::new();
            let mut cur = start;
            while let End::Point(p) = cur {
                seq.push(entry(p));
                let q = layout.twin[p];
                used[at[q]] = true;
                cur = other(at[q], q);
                if seq.len() > n {
                    return Err(Error::Topology("chain does not terminate".into()));
                }
            }
            let End::Node(v) = cur else { unreachable!() };
            chains.push(Chain { from: Some(u), to: Some(v), seq });
        }
    }
    for p in 0..n {
        if used[at[p]] {
            continue;
        }
        let mut seq = Vec::new();
        let mut cur = p;
        loop {
            used[at[cur]] = true;
            seq.push(entry(cur));
            let q = layout.twin[cur];
            used[at[q]] = true;
            match other(at[q], q) {
                End::Point(r) => cur = r,
                End::Node(_) => return Err(Error::Topology("open chain met while closing loops".into())),
            }
            if cur == p {
                break;
            }
            if seq.len() > n {
                return Err(Error::Topology("closed chain does not return".into()));
            }
        }
        chains.push(Chain { from: None, to: None, seq });
    }
    Ok(chains)
}

/// A move in the lifted space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// Cross a piece of `G` inside one copy of the disk.
    Cross(EdgeId),
    /// Pass from copy `i` to copy `i + 1`.
    Glue(usize),
}

/// Copies `D_0 .. D_k` of the disk glued along a crossing sequence. Node
/// `i * faces + f` is face `f` in copy `i`.
#[derive(Clone, Debug)]
pub struct LiftedSpace {
    pub seq: CrossingSequence,
    pub faces: usize,
    inner: Vec<Vec<(FaceId, EdgeId, Weight)>>,
    glue: Vec<Vec<(FaceId, FaceId)>>,
}

/// Lexicographic path weight: length in `G`, then crossings with the cut
/// graph.
pub type Cost = (Weight, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopicPath {
    pub weight: Weight,
    pub kcrossings: u32,
    /// Crossed `G` edges with multiplicity, in path order.
    pub crossed: Vec<EdgeId>,
    /// Visited lifted nodes; `moves[i]` leads from `nodes[i]` to `nodes[i + 1]`.
    pub nodes: Vec<usize>,
    pub moves: Vec<Move>,
}

impl HomotopicPath {
    /// Cut-graph crossings read off the moves, as seen in `D`.
    pub fn projected_sequence(&self, lift: &LiftedSpace) -> CrossingSequence {
        self.moves
            .iter()
            .filter_map(|m| match *m {
                Move::Glue(i) => Some(lift.seq[i]),
                Move::Cross(_) => None,
            })
            .collect()
    }
}

pub fn build_lifted_space(schema: &DiskSchema, weights: &[Weight], seq: &[SeqEntry]) -> Result<LiftedSpace> {
    check_sequence(schema, seq)?;
    let faces = schema.num_faces;
    let mut inner = vec![Vec::new(); faces];
    for &(a, b, e) in &schema.g_pieces {
        let w = *weights.get(e).ok_or_else(|| Error::Input(format!("no weight for edge {e}")))?;
        inner[a].push((b, e, w));
        inner[b].push((a, e, w));
    }
    let glue = seq
        .iter()
        .map(|s| {
            let out = &schema.sides[schema.copies[s.edge][s.copy as usize]].faces;
            let inn = &schema.sides[schema.copies[s.edge][1 - s.copy as usize]].faces;
            out.iter().copied().zip(inn.iter().copied()).collect()
        })
        .collect();
    Ok(LiftedSpace { seq: seq.to_vec(), faces, inner, glue })
}

impl LiftedSpace {
    pub fn num_copies(&self) -> usize {
        self.seq.len() + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.num_copies() * self.faces
    }

    /// Face of `D` under a lifted node.
    pub fn project(&self, node: usize) -> FaceId {
        node % self.faces
    }

    /// Every arc of the lifted graph: `(from, to, cost, move)`.
    pub fn arcs(&self) -> Vec<(usize, usize, Cost, Move)> {
        let mut out = Vec::new();
        for i in 0..self.num_copies() {
            for f in 0..self.faces {
                out.extend(self.arcs_from(i * self.faces + f));
            }
        }
        out
    }

    fn arcs_from(&self, node: usize) -> impl Iterator<Item = (usize, usize, Cost, Move)> + '_ {
        let (i, f) = (node / self.faces, node % self.faces);
        let base = i * self.faces;
        let inner = self.inner[f].iter().map(move |&(h, e, w)| (node, base + h, (w, 0), Move::Cross(e)));
        let glue = self.glue.get(i).into_iter().flatten().filter(move |&&(a, _)| a == f).map(move |&(_, b)| {
            (node, base + self.faces + b, (0, 1), Move::Glue(i))
        });
        inner.chain(glue)
    }

    /// Lexicographic single-source shortest paths from face `src` of copy 0.
    fn search(&self, src: FaceId) -> (Vec<Option<Cost>>, Vec<Option<(usize, Move)>>) {
        let nn = self.num_nodes();
        let mut dist: Vec<Option<Cost>> = vec![None; nn];
        let mut parent = vec![None; nn];
        let mut heap = BinaryHeap::new();
        dist[src] = Some((0, 0));
        heap.push(Reverse(((0, 0), src)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if dist[x] != Some(d) {
                continue;
            }
            for (_, y, (w, k), m) in self.arcs_from(x) {
                let nd = (d.0 + w, d.1 + k);
                if dist[y].is_none_or(|old| nd < old) {
                    dist[y] = Some(nd);
                    parent[y] = Some((x, m));
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        (dist, parent)
    }

    /// Costs from `src` in copy 0 to every face of the last copy.
    pub fn distances_from(&self, src: FaceId) -> Vec<Option<Cost>> {
        let (dist, _) = self.search(src);
        dist[self.seq.len() * self.faces..].to_vec()
    }
}

/// Shortest path from face `src` in the first copy to face `dst` in the
/// last one.
pub fn shortest_homotopic_path(lift: &LiftedSpace, src: FaceId, dst: FaceId) -> Result<HomotopicPath> {
    if src >= lift.faces || dst >= lift.faces {
        return Err(Error::Input(format!("face out of range: {src} or {dst}")));
    }
    let (dist, parent) = lift.search(src);
    let target = lift.seq.len() * lift.faces + dst;
    let (weight, kcrossings) =
        dist[target].ok_or_else(|| Error::Contract("lifted space is disconnected".into()))?;
    let mut nodes = vec![target];
    let mut moves = Vec::new();
    let mut x = target;
    while let Some((y, m)) = parent[x] {
        nodes.push(y);
        moves.push(m);
        x = y;
    }
    nodes.reverse();
    moves.reverse();
    let crossed = moves
        .iter()
        .filter_map(|m| match *m {
            Move::Cross(e) => Some(e),
            Move::Glue(_) => None,
        })
        .collect();
    Ok(HomotopicPath { weight, kcrossings, crossed, nodes, moves })
}

/// All-pairs costs for one crossing sequence: `table[src * faces + dst]`.
pub fn cost_table(lift: &LiftedSpace) -> Vec<Weight> {
    let f = lift.faces;
    let mut table = vec![Weight::MAX; f * f];
    for src in 0..f {
        for (dst, d) in lift.distances_from(src).into_iter().enumerate() {
            if let Some((w, _)) = d {
                table[src * f + dst] = w;
            }
        }
    }
    table
}
