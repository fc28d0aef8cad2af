//! Drawing the cheapest dual of a given topology: place its vertices in
//! overlay faces and draw every edge as a shortest path with its crossing
//! sequence.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cutgraph::{DiskSchema, UnionFind};
use crate::embed::{EdgeId, FaceId, Weight};
use crate::error::{Error, Result};
use crate::homotopy::{build_lifted_space, crossing_sequences, shortest_homotopic_path, CrossingSequence};
use crate::topology::Topology;

const INF: Weight = Weight::MAX;

/// Largest dynamic-programming table the solver will allocate.
pub const MAX_TABLE: usize = 1 << 26;

/// The dual graph `C` described by a topology. Vertices past `nodes` are
/// synthetic bases of closed chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractDualGraph {
    pub nodes: usize,
    pub vertices: usize,
    pub edges: Vec<(usize, usize, CrossingSequence)>,
    /// Edges at each vertex, in the order of the topology's rotation.
    pub rotation: Vec<Vec<usize>>,
}

impl AbstractDualGraph {
    fn neighbour_masks(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.vertices];
        for &(u, v, _) in &self.edges {
            if u != v {
                m[u] |= 1 << v;
                m[v] |= 1 << u;
            }
        }
        m
    }
}

pub fn abstract_graph(top: &Topology, schema: &DiskSchema) -> Result<AbstractDualGraph> {
    let chains = crossing_sequences(top, schema)?;
    let mut vertices = top.nodes;
    let mut edges = Vec::new();
    let mut rotation = vec![Vec::new(); top.nodes];
    for ch in chains {
        let (u, v) = match (ch.from, ch.to) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                vertices += 1;
                rotation.push(Vec::new());
                (vertices - 1, vertices - 1)
            }
        };
        rotation[u].push(edges.len());
        if u != v {
            rotation[v].push(edges.len());
        }
        edges.push((u, v, ch.seq));
    }
    if vertices > 64 {
        return Err(Error::Resource(format!("dual graph with {vertices} vertices")));
    }
    Ok(AbstractDualGraph { nodes: top.nodes, vertices, edges, rotation })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecomposition {
    /// Introduction order of the vertices.
    pub order: Vec<usize>,
    pub bags: Vec<Vec<usize>>,
    pub width: usize,
}

/// Bags of an introduction order: each vertex stays until all its
/// neighbours have been introduced.
fn bags_of_order(masks: &[u64], order: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = 0u64;
    let mut active: Vec<usize> = Vec::new();
    let mut bags = Vec::new();
    for &v in order {
        seen |= 1 << v;
        active.push(v);
        bags.push(active.clone());
        active.retain(|&u| masks[u] & !seen != 0);
    }
    bags
}

fn boundary(masks: &[u64], set: u64) -> u32 {
    let mut n = 0;
    let mut s = set;
    while s != 0 {
        let u = s.trailing_zeros() as usize;
        s &= s - 1;
        if masks[u] & !set != 0 {
            n += 1;
        }
    }
    n
}

/// Exact vertex-separation search up to 20 vertices, greedy beyond.
pub fn path_decomposition(c: &AbstractDualGraph) -> PathDecomposition {
    let n = c.vertices;
    let masks = c.neighbour_masks();
    let order = if n <= 20 {
        let full = (1usize << n) - 1;
        let mut best = vec![u32::MAX; full + 1];
        let mut choice = vec![0u8; full + 1];
        best[0] = 0;
        for s in 1..=full {
            let mut bits = s;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let prev = s & !(1 << v);
                let cost = best[prev].max(boundary(&masks, prev as u64) + 1);
                if cost < best[s] {
                    best[s] = cost;
                    choice[s] = v as u8;
                }
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut s = full;
        while s != 0 {
            let v = choice[s] as usize;
            order.push(v);
            s &= !(1 << v);
        }
        order.reverse();
        order
    } else {
        let mut seen = 0u64;
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| seen & (1 << v) == 0)
                .min_by_key(|&v| (boundary(&masks, seen | 1 << v), v))
                .unwrap();
            seen |= 1 << v;
            order.push(v);
        }
        order
    };
    let bags = bags_of_order(&masks, &order);
    let width = bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1);
    PathDecomposition { order, bags, width }
}

/// Vertex coverage, edge coverage and contiguity.
pub fn is_path_decomposition(pd: &PathDecomposition, c: &AbstractDualGraph) -> bool {
    let n = c.vertices;
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0; n];
    for (i, bag) in pd.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return false;
            }
            first[v] = first[v].min(i);
            last[v] = i;
        }
    }
    for v in 0..n {
        if first[v] == usize::MAX {
            return false;
        }
        if (first[v]..=last[v]).any(|i| !pd.bags[i].contains(&v)) {
            return false;
        }
    }
    c.edges.iter().all(|&(u, v, _)| pd.bags.iter().any(|b| b.contains(&u) && b.contains(&v)))
}

/// All-pairs drawing costs per crossing sequence, shared across topologies.
pub struct CostTables {
    pub faces: usize,
    weights: Vec<Weight>,
    schema: DiskSchema,
    disk: Arc<Vec<Weight>>,
    cache: Mutex<HashMap<CrossingSequence, Arc<Vec<Weight>>>>,
}

fn min_plus_disk(faces: usize, schema: &DiskSchema, weights: &[Weight]) -> Vec<Weight> {
    let mut adj = vec![Vec::new(); faces];
    for &(a, b, e) in &schema.g_pieces {
        adj[a].push((b, weights[e]));
        adj[b].push((a, weights[e]));
    }
    let mut out = vec![INF; faces * faces];
    for s in 0..faces {
        let row = &mut out[s * faces..(s + 1) * faces];
        let mut heap = std::collections::BinaryHeap::new();
        row[s] = 0;
        heap.push(std::cmp::Reverse((0, s)));
        while let Some(std::cmp::Reverse((d, x))) = heap.pop() {
            if d > row[x] {
                continue;
            }
            for &(y, w) in &adj[x] {
                if d + w < row[y] {
                    row[y] = d + w;
                    heap.push(std::cmp::Reverse((d + w, y)));
                }
            }
        }
    }
    out
}

impl CostTables {
    pub fn new(schema: &DiskSchema, weights: &[Weight]) -> CostTables {
        let faces = schema.num_faces;
        let disk = Arc::new(min_plus_disk(faces, schema, weights));
        CostTables {
            faces,
            weights: weights.to_vec(),
            schema: schema.clone(),
            disk,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn schema(&self) -> &DiskSchema {
        &self.schema
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// `table[src * faces + dst]` for paths crossing the cut graph along
    /// `seq`.
    pub fn table(&self, seq: &[crate::homotopy::SeqEntry]) -> Arc<Vec<Weight>> {
        if seq.is_empty() {
            return self.disk.clone();
        }
        if let Some(t) = self.cache.lock().unwrap().get(seq) {
            return t.clone();
        }
        let prev = self.table(&seq[..seq.len() - 1]);
        let last = seq[seq.len() - 1];
        let f = self.faces;
        let out = &self.schema.sides[self.schema.copies[last.edge][last.copy as usize]].faces;
        let inn = &self.schema.sides[self.schema.copies[last.edge][1 - last.copy as usize]].faces;
        let mut t = vec![INF; f * f];
        for s in 0..f {
            // best arrival on each face of the next copy, then spread
            let mut arrive = vec![INF; f];
            for (&a, &b) in out.iter().zip(inn) {
                arrive[b] = arrive[b].min(prev[s * f + a]);
            }
            let row = &mut t[s * f..(s + 1) * f];
            for (b, &d) in arrive.iter().enumerate() {
                if d == INF {
                    continue;
                }
                let from = &self.disk[b * f..(b + 1) * f];
                for (r, &x) in row.iter_mut().zip(from) {
                    *r = (*r).min(d.saturating_add(x));
                }
            }
        }
        let t = Arc::new(t);
        self.cache.lock().unwrap().insert(seq.to_vec(), t.clone());
        t
    }
}

impl CostTables {
    /// Lower bound on the drawing cost of `c`: every edge at its cheapest.
    pub fn lower_bound(&self, c: &AbstractDualGraph) -> Weight {
        let f = self.faces;
        c.edges
            .iter()
            .map(|(u, v, seq)| {
                let t = self.table(seq);
                if u == v {
                    (0..f).map(|x| t[x * f + x]).min().unwrap_or(INF)
                } else {
                    t.iter().copied().min().unwrap_or(INF)
                }
            })
            .fold(0, Weight::saturating_add)
    }
}

impl CostTables {
    /// Lower bound at least [`CostTables::lower_bound`]: a spanning forest of
    /// `c` (with its loops) is solved exactly, the other edges at their
    /// cheapest.
    pub fn forest_bound(&self, c: &AbstractDualGraph) -> Weight {
        let f = self.faces;
        let mut uf = UnionFind::new(c.vertices);
        let mut unary = vec![vec![0 as Weight; f]; c.vertices];
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c.vertices];
        let mut rest: Weight = 0;
        for (i, (u, v, seq)) in c.edges.iter().enumerate() {
            let t = self.table(seq);
            if u == v {
                for (x, cost) in unary[*u].iter_mut().enumerate() {
                    *cost = cost.saturating_add(t[x * f + x]);
                }
            } else if uf.union(*u, *v) {
                adj[*u].push((*v, i));
                adj[*v].push((*u, i));
            } else {
                rest = rest.saturating_add(t.iter().copied().min().unwrap_or(INF));
            }
        }
        let mut done = vec![false; c.vertices];
        let mut total = rest;
        for root in 0..c.vertices {
            if done[root] {
                continue;
            }
            // vertices in discovery order with their parent edge
            let mut order = vec![(root, usize::MAX, usize::MAX)];
            done[root] = true;
            let mut k = 0;
            while k < order.len() {
                let x = order[k].0;
                for &(y, i) in &adj[x] {
                    if !done[y] {
                        done[y] = true;
                        order.push((y, x, i));
                    }
                }
                k += 1;
            }
            for &(x, parent, i) in order.iter().skip(1).rev() {
                let t = self.table(&c.edges[i].2);
                let x_first = c.edges[i].0 == x;
                let mut msg = vec![INF; f];
                for (fp, m) in msg.iter_mut().enumerate() {
                    for (fx, &ux) in unary[x].iter().enumerate() {
                        let key = if x_first { fx * f + fp } else { fp * f + fx };
                        *m = (*m).min(ux.saturating_add(t[key]));
                    }
                }
                for (u, m) in unary[parent].iter_mut().zip(&msg) {
                    *u = u.saturating_add(*m);
                }
            }
            total = total.saturating_add(unary[root].iter().copied().min().unwrap_or(INF));
        }
        total
    }
}

/// Cheapest drawing of one topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Drawing {
    pub weight: Weight,
    /// Face of every vertex of the abstract dual.
    pub placement: Vec<FaceId>,
    /// `G` edges crossed by the drawn edges, with multiplicity.
    pub crossed: Vec<EdgeId>,
    /// Crossing sequences of the drawn edges, as realised.
    pub realised: Vec<CrossingSequence>,
}

/// Drawing of `c` with its vertices at `placement`, from witness paths that
/// must weigh `weight` in total.
pub fn witnesses(ct: &CostTables, c: &AbstractDualGraph, placement: Vec<FaceId>, weight: Weight) -> Result<Drawing> {
    let mut crossed = Vec::new();
    let mut realised = Vec::new();
    let mut total = 0;
    for (u, v, seq) in &c.edges {
        let lift = build_lifted_space(&ct.schema, &ct.weights, seq)?;
        let p = shortest_homotopic_path(&lift, placement[*u], placement[*v])?;
        total += p.weight;
        realised.push(p.projected_sequence(&lift));
        crossed.extend(p.crossed);
    }
    if total != weight {
        return Err(Error::Contract(format!("witness paths weigh {total}, table says {weight}")));
    }
    Ok(Drawing { weight, placement, crossed, realised })
}

/// Dynamic program over the path decomposition's introduction order.
pub fn solve_topology(c: &AbstractDualGraph, pd: &PathDecomposition, ct: &CostTables) -> Result<Drawing> {
    let (weight, placement) = place_topology(c, pd, ct)?;
    witnesses(ct, c, placement, weight)
}

/// Cost and vertex faces of the cheapest drawing, without witness paths.
pub fn place_topology(c: &AbstractDualGraph, pd: &PathDecomposition, ct: &CostTables) -> Result<(Weight, Vec<FaceId>)> {
    let f = ct.faces;
    if c.vertices == 0 {
        return Ok((0, vec![]));
    }
    let states = (f as u128).pow(pd.width as u32 + 1);
    if states > MAX_TABLE as u128 {
        return Err(Error::Resource(format!("table of {states} states (width {}, {f} faces)", pd.width)));
    }
    let tables: Vec<Arc<Vec<Weight>>> = c.edges.iter().map(|(_, _, s)| ct.table(s)).collect();
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); c.vertices];
    for (i, &(u, v, _)) in c.edges.iter().enumerate() {
        at[u].push(i);
        if u != v {
            at[v].push(i);
        }
    }
    let masks = c.neighbour_masks();
    let mut seen = 0u64;
    let mut active: Vec<usize> = Vec::new();
    let mut table: Vec<Weight> = vec![0];
    // (vertex, active after forgetting, choice per remaining state)
    let mut forgets: Vec<(usize, Vec<usize>, Vec<u32>)> = Vec::new();
    for &v in &pd.order {
        seen |= 1 << v;
        let stride = f.pow(active.len() as u32);
        let mut next = vec![INF; stride * f];
        // (edge, position of the other end in the active list, v first)
        // (table, stride of the other end, or None for a loop, v first)
        let mut links: Vec<(&[Weight], Option<usize>, bool)> = Vec::new();
        for &i in &at[v] {
            let (a, b, _) = c.edges[i];
            let other = if a == v { b } else { a };
            if other == v {
                links.push((&tables[i], None, true));
            } else if let Some(p) = active.iter().position(|&x| x == other) {
                links.push((&tables[i], Some(f.pow(p as u32)), a == v));
            } else if seen & (1 << other) != 0 {
                return Err(Error::Contract(format!("edge {i} spans a forgotten vertex")));
            }
        }
        for (idx, &val) in table.iter().enumerate() {
            if val == INF {
                continue;
            }
            for fv in 0..f {
                let mut total = val;
                for &(t, stride, v_first) in &links {
                    let fo = stride.map_or(fv, |s| (idx / s) % f);
                    let key = if v_first { fv * f + fo } else { fo * f + fv };
                    total = total.saturating_add(t[key]);
                }
                let slot = &mut next[idx + fv * stride];
                *slot = (*slot).min(total);
            }
        }
        active.push(v);
        table = next;
        while let Some(pos) = active.iter().position(|&u| masks[u] & !seen == 0) {
            let u = active.remove(pos);
            let lo = f.pow(pos as u32);
            let mut reduced = vec![INF; table.len() / f];
            let mut choice = vec![0u32; reduced.len()];
            for (idx, &val) in table.iter().enumerate() {
                let fu = (idx / lo) % f;
                let r = idx % lo + (idx / (lo * f)) * lo;
                if val < reduced[r] {
                    reduced[r] = val;
                    choice[r] = fu as u32;
                }
            }
            forgets.push((u, active.clone(), choice));
            table = reduced;
        }
    }
    let weight = table[0];
    if weight == INF {
        return Err(Error::Contract("no drawing found".into()));
    }
    let mut placement = vec![usize::MAX; c.vertices];
    for (u, after, choice) in forgets.iter().rev() {
        let idx: usize = after.iter().enumerate().map(|(p, &x)| placement[x] * f.pow(p as u32)).sum();
        placement[*u] = choice[idx] as usize;
    }
    Ok((weight, placement))
}

/// Every placement of every vertex; small cases only.
pub fn naive_solve_topology(c: &AbstractDualGraph, ct: &CostTables) -> Result<Drawing> {
    let (weight, placement) = naive_place_topology(c, ct)?;
    witnesses(ct, c, placement, weight)
}

/// [`place_topology`] by trying every placement.
pub fn naive_place_topology(c: &AbstractDualGraph, ct: &CostTables) -> Result<(Weight, Vec<FaceId>)> {
    let f = ct.faces;
    if c.vertices > 4 || f > 200 {
        return Err(Error::Resource(format!("naive placement of {} vertices over {f} faces", c.vertices)));
    }
    let tables: Vec<Arc<Vec<Weight>>> = c.edges.iter().map(|(_, _, s)| ct.table(s)).collect();
    let mut place = vec![0; c.vertices];
    let mut best = (INF, place.clone());
    loop {
        let total = c
            .edges
            .iter()
            .enumerate()
            .fold(0 as Weight, |acc, (i, &(u, v, _))| acc.saturating_add(tables[i][place[u] * f + place[v]]));
        if total < best.0 {
            best = (total, place.clone());
        }
        let mut i = 0;
        while i < place.len() {
            place[i] += 1;
            if place[i] < f {
                break;
            }
            place[i] = 0;
            i += 1;
        }
        if i == place.len() {
            break;
        }
    }
    Ok(best)
}
