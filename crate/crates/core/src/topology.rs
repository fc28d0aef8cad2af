//! Topologies of candidate multicut duals inside the disk cut open along `K`.
//!
//! A topology fixes how many times the dual crosses every edge of `K`, which
//! boundary points are joined inside the disk (arcs and trees), and the plane
//! shape of every tree. Boundary points are numbered in the cyclic order of
//! the disk boundary; the gap `i` runs from point `i` to point `i + 1`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::cutgraph::{BoundaryItem, DiskSchema, UnionFind};
use crate::embed::VertexId;
use crate::error::{Error, Result};

/// Multipliers for the size bounds on good duals; `g + t` is the sum of the
/// Euler genus and the number of terminals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub c_tree: usize,
    pub c_cross: usize,
    pub c_vert: usize,
    /// Multiplier for the total number of crossings with `K`.
    pub c_total: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { c_tree: 2, c_cross: 12, c_vert: 2, c_total: 1 }
    }
}

impl Bounds {
    pub fn doubled(&self) -> Bounds {
        Bounds { c_tree: 2 * self.c_tree, c_cross: 2 * self.c_cross, c_vert: 2 * self.c_vert, c_total: 2 * self.c_total }
    }

    /// Limits for a surface of Euler genus `genus` and `terminals` terminals.
    /// Besides the multipliers, the vertex count never exceeds
    /// `2 (g + t - 2)`: a dual whose vertices are all cubic and whose faces
    /// each hold a terminal has `V - 3V/2 + F >= 2 - g` with `F <= t`.
    pub fn limits(&self, genus: usize, terminals: usize) -> Limits {
        let gt = genus + terminals;
        Limits {
            tree_edges: self.c_tree * (3 * gt).max(6),
            crossings_per_edge: self.c_cross * gt,
            vertices: (self.c_vert * gt).min(2 * gt.saturating_sub(2)),
            total_crossings: self.c_total * gt,
        }
    }

    /// [`Bounds::limits`] with the crossing budget raised to
    /// `max_degree + c_total + 1`, where `max_degree` is the largest number
    /// of corners of a cut-graph vertex: a small loop around a terminal
    /// crosses every cut-graph edge end at that terminal.
    pub fn limits_for_schema(&self, genus: usize, terminals: usize, schema: &DiskSchema) -> Limits {
        let mut limits = self.limits(genus, terminals);
        limits.total_crossings = limits.total_crossings.max(schema.max_degree() + self.c_total + 1);
        limits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub tree_edges: usize,
    pub crossings_per_edge: usize,
    pub vertices: usize,
    pub total_crossings: usize,
}

/// Boundary points for given crossing counts.
#[derive(Clone, Debug)]
pub struct Layout {
    pub counts: Vec<usize>,
    /// Side of every point, in boundary order.
    pub point_side: Vec<usize>,
    /// Position of every point along its cut-graph edge.
    pub point_pos: Vec<usize>,
    /// Index of the first point of each side (or of where it would be).
    pub side_first: Vec<usize>,
    /// Cut-graph vertex and gap of every corner.
    pub corners: Vec<(usize, usize)>,
    pub twin: Vec<usize>,
    pub point_edge: Vec<usize>,
    pub point_copy: Vec<u8>,
}

impl Layout {
    pub fn new(schema: &DiskSchema, counts: &[usize]) -> Result<Layout> {
        if counts.len() != schema.num_kedges() {
            return Err(Error::Topology("crossing counts do not match the cut graph".into()));
        }
        let mut point_side = Vec::new();
        let mut point_pos = Vec::new();
        let mut side_first = vec![0; schema.sides.len()];
        let mut corner_at = Vec::new();
        for item in &schema.boundary {
            match *item {
                BoundaryItem::Corner { vertex } => corner_at.push((vertex, point_side.len())),
                BoundaryItem::Side(s) => {
                    let side = &schema.sides[s];
                    let m = counts[side.edge];
                    side_first[s] = point_side.len();
                    for i in 0..m {
                        point_side.push(s);
                        point_pos.push(if side.forward { i } else { m - 1 - i });
                    }
                }
            }
        }
        let n = point_side.len();
        let corners = corner_at.into_iter().map(|(v, before)| (v, (before + n.max(1) - 1) % n.max(1))).collect();
        let point_edge: Vec<usize> = point_side.iter().map(|&s| schema.sides[s].edge).collect();
        let point_copy: Vec<u8> = point_side.iter().map(|&s| schema.sides[s].copy).collect();
        let mut twin = vec![0; n];
        for p in 0..n {
            let other = schema.copies[point_edge[p]][1 - point_copy[p] as usize];
            let first = side_first[other];
            let m = counts[point_edge[p]];
            let idx = if schema.sides[other].forward { point_pos[p] } else { m - 1 - point_pos[p] };
            twin[p] = first + idx;
        }
        Ok(Layout { counts: counts.to_vec(), point_side, point_pos, side_first, corners, twin, point_edge, point_copy })
    }

    pub fn num_points(&self) -> usize {
        self.point_side.len()
    }

    pub fn num_gaps(&self) -> usize {
        self.num_points().max(1)
    }

    /// Gap containing interval `q` (between positions `q - 1` and `q`) of
    /// side `s`.
    pub fn interval_gap(&self, schema: &DiskSchema, s: usize, q: usize) -> usize {
        let n = self.num_gaps() as isize;
        let side = &schema.sides[s];
        let m = self.counts[side.edge] as isize;
        let first = self.side_first[s] as isize;
        let q = q as isize;
        let gap = if side.forward { first + q - 1 } else { first + m - 1 - q };
        gap.rem_euclid(n) as usize
    }

    pub fn gap_before(&self, p: usize) -> usize {
        (p + self.num_gaps() - 1) % self.num_gaps()
    }
}

/// Faces of the glued dual, as labels on gaps. `blocks` are the point sets
/// of the components inside the disk.
pub fn gap_faces(schema: &DiskSchema, layout: &Layout, blocks: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = layout.num_gaps();
    let mut uf = UnionFind::new(n);
    for b in blocks {
        let mut pts = b.clone();
        pts.sort_unstable();
        for w in pts.windows(2) {
            uf.union(w[0], layout.gap_before(w[1]));
        }
        uf.union(*pts.last().expect("nonempty block"), layout.gap_before(pts[0]));
    }
    for (c, copies) in schema.copies.iter().enumerate() {
        for q in 0..=layout.counts[c] {
            uf.union(layout.interval_gap(schema, copies[0], q), layout.interval_gap(schema, copies[1], q));
        }
    }
    let mut first_gap = vec![usize::MAX; schema.num_kvertices];
    for &(v, gap) in &layout.corners {
        if first_gap[v] == usize::MAX {
            first_gap[v] = gap;
        } else {
            uf.union(first_gap[v], gap);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut out = vec![0; n];
    for (gap, slot) in out.iter_mut().enumerate() {
        let r = uf.find(gap);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        *slot = label[r];
    }
    (out, count)
}

/// Face of terminal `v` given gap faces.
pub fn terminal_face(schema: &DiskSchema, layout: &Layout, faces: &[usize], v: VertexId) -> Option<usize> {
    let kv = schema.terminal_kvertex(v)?;
    layout.corners.iter().find(|&&(w, _)| w == kv).map(|&(_, gap)| faces[gap])
}

/// Every pair lies in distinct faces.
fn separates(schema: &DiskSchema, layout: &Layout, faces: &[usize], pairs: &[(VertexId, VertexId)]) -> bool {
    pairs.iter().all(|&(a, b)| {
        terminal_face(schema, layout, faces, a) != terminal_face(schema, layout, faces, b)
    })
}

/// An end of an edge of the dual inside the disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Point(usize),
    Node(usize),
}

/// Plane map of the dual inside the disk. `rotation[v]` lists the edges
/// at internal node `v` in the same cyclic sense as the boundary order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Topology {
    pub counts: Vec<usize>,
    pub nodes: usize,
    pub edges: Vec<(End, End)>,
    pub rotation: Vec<Vec<usize>>,
}

impl Topology {
    pub fn num_points(&self) -> usize {
        2 * self.counts.iter().sum::<usize>()
    }

    /// Edge at every point, if exactly one.
    fn point_edges(&self) -> Option<Vec<usize>> {
        let mut at = vec![usize::MAX; self.num_points()];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            for e in [a, b] {
                if let End::Point(p) = e {
                    if p >= at.len() || at[p] != usize::MAX {
                        return None;
                    }
                    at[p] = i;
                }
            }
        }
        if at.contains(&usize::MAX) {
            return None;
        }
        Some(at)
    }

    /// Connected components as (points, nodes, edge count).
    pub fn components(&self) -> Vec<(Vec<usize>, Vec<usize>, usize)> {
        let np = self.num_points();
        let id = |e: End| match e {
            End::Point(p) => p,
            End::Node(v) => np + v,
        };
        let mut uf = UnionFind::new(np + self.nodes);
        for &(a, b) in &self.edges {
            uf.union(id(a), id(b));
        }
        let mut comps: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>, usize)> = Default::default();
        for p in 0..np {
            comps.entry(uf.find(p)).or_default().0.push(p);
        }
        for v in 0..self.nodes {
            comps.entry(uf.find(np + v)).or_default().1.push(v);
        }
        for &(a, _) in &self.edges {
            comps.entry(uf.find(id(a))).or_default().2 += 1;
        }
        comps.into_values().collect()
    }

    /// Point sets of the components.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.components().into_iter().map(|c| c.0).collect()
    }

    pub fn tree_edges(&self) -> usize {
        self.edges.iter().filter(|(a, b)| matches!(a, End::Node(_)) || matches!(b, End::Node(_))).count()
    }

    /// Relabels internal nodes in order of first visit from the points, so
    /// that equal maps get equal encodings.
    pub fn canonical_encoding(&self) -> String {
        let mut label = vec![usize::MAX; self.nodes];
        let mut next = 0;
        let mut adj: Vec<Vec<(usize, End)>> = vec![Vec::new(); self.nodes];
        for (v, rot) in self.rotation.iter().enumerate() {
            for &e in rot {
                let (a, b) = self.edges[e];
                let other = if a == End::Node(v) { b } else { a };
                adj[v].push((e, other));
            }
        }
        let mut pts: Vec<(usize, End)> = Vec::new();
        for &(a, b) in &self.edges {
            if let End::Point(p) = a {
                pts.push((p, b));
            }
            if let End::Point(p) = b {
                pts.push((p, a));
            }
        }
        pts.sort_unstable();
        for &(p, other) in &pts {
            let mut stack = vec![(other, End::Point(p))];
            while let Some((cur, from)) = stack.pop() {
                let End::Node(v) = cur else { continue };
                if label[v] != usize::MAX {
                    continue;
                }
                label[v] = next;
                next += 1;
                let k = adj[v].len();
                let start = adj[v].iter().position(|&(_, o)| o == from).unwrap_or(0);
                for i in (1..=k).rev() {
                    let (_, o) = adj[v][(start + i) % k];
                    stack.push((o, End::Node(v)));
                }
            }
        }
        let rename = |e: End| match e {
            End::Node(v) => End::Node(label[v]),
            p => p,
        };
        let mut edges: Vec<(End, End)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (rename(a), rename(b));
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort_unstable();
        let mut rot = vec![Vec::new(); self.nodes];
        for (v, r) in self.rotation.iter().enumerate() {
            let ends: Vec<End> = r
                .iter()
                .map(|&e| {
                    let (a, b) = self.edges[e];
                    rename(if a == End::Node(v) { b } else { a })
                })
                .collect();
            let k = ends.len();
            let best = (0..k).map(|s| (0..k).map(|i| ends[(s + i) % k]).collect::<Vec<_>>()).min().unwrap_or_default();
            if label[v] != usize::MAX {
                rot[label[v]] = best;
            }
        }
        let mut out = String::new();
        let _ = write!(out, "{:?}|{:?}|{:?}", self.counts, edges, rot);
        out
    }

    /// DOT-like dump with a stable ordering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph topology {\n");
        let _ = writeln!(out, "  counts=\"{:?}\";", self.counts);
        let name = |e: End| match e {
            End::Point(p) => format!("p{p}"),
            End::Node(v) => format!("v{v}"),
        };
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  {} -- {};", name(a), name(b));
        }
        out.push_str("}\n");
        out
    }
}

/// Points are on the same side of the disk.
fn same_side(layout: &Layout, p: usize, q: usize) -> bool {
    layout.point_side[p] == layout.point_side[q]
}

/// Blocks do not interleave along the boundary.
fn non_crossing(blocks: &[Vec<usize>]) -> bool {
    let mut owner = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for &p in b {
            if owner.len() <= p {
                owner.resize(p + 1, usize::MAX);
            }
            owner[p] = i;
        }
    }
    // a partition is non-crossing iff a stack scan closes every block
    let mut remaining: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
    let mut stack: Vec<usize> = Vec::new();
    for &o in &owner {
        if o == usize::MAX {
            continue;
        }
        if stack.last() != Some(&o) {
            if stack.contains(&o) {
                return false;
            }
            stack.push(o);
        }
        remaining[o] -= 1;
        if remaining[o] == 0 {
            stack.pop();
        }
    }
    true
}

/// Goodness: components are arcs joining distinct sides or plane trees with
/// all leaves on the boundary, within the size limits.
pub fn is_good(top: &Topology, schema: &DiskSchema, limits: &Limits) -> bool {
    let Ok(layout) = Layout::new(schema, &top.counts) else { return false };
    if top.counts.iter().any(|&m| m > limits.crossings_per_edge) || top.tree_edges() > limits.tree_edges {
        return false;
    }
    if top.rotation.len() != top.nodes {
        return false;
    }
    if top.point_edges().is_none() {
        return false;
    }
    let mut degree = vec![0usize; top.nodes];
    for &(a, b) in &top.edges {
        for e in [a, b] {
            if let End::Node(v) = e {
                if v >= top.nodes {
                    return false;
                }
                degree[v] += 1;
            }
        }
    }
    for v in 0..top.nodes {
        let mut r = top.rotation[v].clone();
        r.sort_unstable();
        let mut inc: Vec<usize> = (0..top.edges.len())
            .flat_map(|e| {
                let (a, b) = top.edges[e];
                [a, b].into_iter().filter(move |&x| x == End::Node(v)).map(move |_| e)
            })
            .collect();
        inc.sort_unstable();
        if r != inc || degree[v] < 2 {
            return false;
        }
    }
    let comps = top.components();
    for (points, nodes, edges) in &comps {
        if points.is_empty() || *edges + 1 != points.len() + nodes.len() {
            return false;
        }
        if nodes.is_empty() {
            if points.len() != 2 || same_side(&layout, points[0], points[1]) {
                return false;
            }
        } else if !tree_leaf_order_ok(top, points) {
            return false;
        }
    }
    let blocks: Vec<Vec<usize>> = comps.into_iter().map(|c| c.0).collect();
    non_crossing(&blocks) && top.nodes <= limits.vertices
}

/// Walking around a tree in rotation order meets its leaves in boundary order.
fn tree_leaf_order_ok(top: &Topology, points: &[usize]) -> bool {
    // walk the single face of the tree from the first leaf
    let p0 = points[0];
    let e0 = top.edges.iter().position(|&(a, b)| a == End::Point(p0) || b == End::Point(p0)).expect("leaf edge");
    let mut seen = Vec::new();
    let (mut e, mut at) = (e0, {
        let (a, b) = top.edges[e0];
        if a == End::Point(p0) {
            b
        } else {
            a
        }
    });
    let limit = 4 * top.edges.len() + 4;
    for _ in 0..limit {
        match at {
            End::Point(p) => {
                if p == p0 {
                    break;
                }
                seen.push(p);
                // bounce back along the same edge
                let (a, b) = top.edges[e];
                at = if a == End::Point(p) { b } else { a };
            }
            End::Node(v) => {
                let r = &top.rotation[v];
                let i = r.iter().position(|&x| x == e).expect("edge at node");
                e = r[(i + 1) % r.len()];
                let (a, b) = top.edges[e];
                at = if a == End::Node(v) { b } else { a };
            }
        }
    }
    if seen.len() + 1 != points.len() {
        return false;
    }
    let mut order = vec![p0];
    order.extend_from_slice(&seen);
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    let k = sorted.len();
    (0..k).any(|s| (0..k).all(|i| order[i] == sorted[(s + i) % k]))
}

/// Whether the topology describes a multicut dual: glue the sides, merge
/// the regions of the disk into faces, and check every pair.
pub fn validate_topology(top: &Topology, schema: &DiskSchema, pairs: &[(VertexId, VertexId)]) -> Result<bool> {
    let layout = Layout::new(schema, &top.counts)?;
    if top.point_edges().is_none() {
        return Err(Error::Topology("every boundary point needs exactly one edge".into()));
    }
    let (faces, _) = gap_faces(schema, &layout, &top.blocks());
    Ok(separates(schema, &layout, &faces, pairs))
}

/// Crossing counts and boundary partition, before trees get shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub counts: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl Skeleton {
    pub fn vertices(&self) -> usize {
        self.blocks.iter().map(|b| if b.len() >= 3 { b.len() - 2 } else { 0 }).sum()
    }

    pub fn tree_edges(&self) -> usize {
        self.blocks.iter().map(|b| if b.len() >= 3 { 2 * b.len() - 3 } else { 0 }).sum()
    }
}

/// Chains of a skeleton through glued points: `(first point, last point)`,
/// where both ends are leaves of trees, or `None` for closed chains of arcs
/// (given by one of their points).
pub fn skeleton_chains(layout: &Layout, blocks: &[Vec<usize>]) -> Vec<(usize, Option<usize>)> {
    let n = layout.num_points();
    let mut block_of = vec![0; n];
    for (i, b) in blocks.iter().enumerate() {
        for &p in b {
            block_of[p] = i;
        }
    }
    let is_arc = |p: usize| blocks[block_of[p]].len() == 2;
    let other = |p: usize| {
        let b = &blocks[block_of[p]];
        if b[0] == p {
            b[1]
        } else {
            b[0]
        }
    };
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for p in 0..n {
        if used[p] || is_arc(p) {
            continue;
        }
        used[p] = true;
        let mut cur = layout.twin[p];
        while is_arc(cur) {
            used[cur] = true;
            let o = other(cur);
            used[o] = true;
            cur = layout.twin[o];
        }
        used[cur] = true;
        out.push((p, Some(cur)));
    }
    for p in 0..n {
        if used[p] {
            continue;
        }
        let mut cur = p;
        loop {
            used[cur] = true;
            let o = other(cur);
            used[o] = true;
            cur = layout.twin[o];
            if cur == p {
                break;
            }
        }
        out.push((p, None));
    }
    out
}

/// Filter applied to skeletons before shapes are chosen: the dual must
/// separate every pair, every face must hold a terminal, and no chain may be
/// removable (a chain with the same face on both sides, or whose removal
/// merges two faces with no pair across them).
pub fn accept_skeleton(
    schema: &DiskSchema,
    layout: &Layout,
    blocks: &[Vec<usize>],
    pairs: &[(VertexId, VertexId)],
    terminals: &[VertexId],
) -> bool {
    SkeletonCheck::new(schema, layout, pairs, terminals).accept(blocks)
}

/// [`accept_skeleton`] for many partitions of one layout, keeping the
/// gap unions that do not depend on the partition.
struct SkeletonCheck<'a> {
    layout: &'a Layout,
    /// A corner gap of each terminal, and of both ends of each pair.
    term_gaps: Vec<Option<usize>>,
    pair_gaps: Vec<(Option<usize>, Option<usize>)>,
    base: Vec<usize>,
    parent: Vec<usize>,
    faces: Vec<usize>,
    label: Vec<usize>,
    has_terminal: Vec<bool>,
    block_of: Vec<usize>,
    used: Vec<bool>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

impl<'a> SkeletonCheck<'a> {
    fn new(schema: &DiskSchema, layout: &'a Layout, pairs: &[(VertexId, VertexId)], terminals: &[VertexId]) -> Self {
        let n = layout.num_gaps();
        let mut base: Vec<usize> = (0..n).collect();
        for (c, copies) in schema.copies.iter().enumerate() {
            for q in 0..=layout.counts[c] {
                union(&mut base, layout.interval_gap(schema, copies[0], q), layout.interval_gap(schema, copies[1], q));
            }
        }
        let mut first_gap = vec![usize::MAX; schema.num_kvertices];
        for &(v, gap) in &layout.corners {
            if first_gap[v] == usize::MAX {
                first_gap[v] = gap;
            } else {
                union(&mut base, first_gap[v], gap);
            }
        }
        for x in 0..n {
            find(&mut base, x);
        }
        let gap_of = |v: VertexId| {
            schema.terminal_kvertex(v).and_then(|kv| (first_gap[kv] != usize::MAX).then_some(first_gap[kv]))
        };
        SkeletonCheck {
            layout,
            term_gaps: terminals.iter().map(|&v| gap_of(v)).collect(),
            pair_gaps: pairs.iter().map(|&(a, b)| (gap_of(a), gap_of(b))).collect(),
            parent: base.clone(),
            base,
            faces: vec![0; n],
            label: vec![usize::MAX; n],
            has_terminal: Vec::with_capacity(n),
            block_of: vec![0; layout.num_points()],
            used: vec![false; layout.num_points()],
        }
    }

    fn accept(&mut self, blocks: &[Vec<usize>]) -> bool {
        let layout = self.layout;
        self.parent.copy_from_slice(&self.base);
        for b in blocks {
            debug_assert!(b.windows(2).all(|w| w[0] < w[1]));
            for w in b.windows(2) {
                union(&mut self.parent, w[0], layout.gap_before(w[1]));
            }
            union(&mut self.parent, b[b.len() - 1], layout.gap_before(b[0]));
        }
        self.label.fill(usize::MAX);
        let mut nf = 0;
        for gap in 0..self.faces.len() {
            let r = find(&mut self.parent, gap);
            if self.label[r] == usize::MAX {
                self.label[r] = nf;
                nf += 1;
            }
            self.faces[gap] = self.label[r];
        }
        let faces = &self.faces;
        let face = |g: Option<usize>| g.map(|g| faces[g]);
        if self.pair_gaps.iter().any(|&(a, b)| face(a) == face(b)) {
            return false;
        }
        self.has_terminal.clear();
        self.has_terminal.resize(nf, false);
        for f in self.term_gaps.iter().filter_map(|&g| face(g)) {
            self.has_terminal[f] = true;
        }
        if self.has_terminal.contains(&false) {
            return false;
        }
        for (i, b) in blocks.iter().enumerate() {
            for &p in b {
                self.block_of[p] = i;
            }
        }
        self.used.fill(false);
        let n = layout.num_points();
        let is_arc = |p: usize| blocks[self.block_of[p]].len() == 2;
        let other = |p: usize| {
            let b = &blocks[self.block_of[p]];
            if b[0] == p {
                b[1]
            } else {
                b[0]
            }
        };
        let needed = |p: usize| {
            let (a, b) = (faces[layout.gap_before(p)], faces[p]);
            a != b
                && self.pair_gaps.iter().any(|&(u, v)| {
                    let (fu, fv) = (face(u), face(v));
                    (fu == Some(a) && fv == Some(b)) || (fu == Some(b) && fv == Some(a))
                })
        };
        // open chains start at tree leaves, closed ones at any unused point
        for p in (0..n).filter(|&p| !is_arc(p)).chain(0..n) {
            if self.used[p] {
                continue;
            }
            if !needed(p) {
                return false;
            }
            self.used[p] = true;
            let mut cur = if is_arc(p) { p } else { layout.twin[p] };
            while is_arc(cur) {
                self.used[cur] = true;
                let o = other(cur);
                self.used[o] = true;
                cur = layout.twin[o];
                if cur == p {
                    break;
                }
            }
            self.used[cur] = true;
        }
        true
    }
}

/// Visits every non-crossing partition of the points into blocks of size at
/// least two, where two-point blocks join different sides.
struct PartitionWalk<'a, F: FnMut(&[Vec<usize>]) -> bool> {
    layout: &'a Layout,
    max_nodes: usize,
    nodes: usize,
    blocks: Vec<Vec<usize>>,
    pending: Vec<(usize, usize)>,
    visit: F,
    stopped: bool,
}

impl<F: FnMut(&[Vec<usize>]) -> bool> PartitionWalk<'_, F> {
    fn next_interval(&mut self) {
        if self.stopped {
            return;
        }
        let Some((lo, hi)) = self.pending.pop() else {
            if !(self.visit)(&self.blocks) {
                self.stopped = true;
            }
            return;
        };
        if hi - lo == 1 {
            self.pending.push((lo, hi));
            return;
        }
        if lo == hi {
            self.next_interval();
            self.pending.push((lo, hi));
            return;
        }
        self.blocks.push(vec![lo]);
        self.extend(lo, hi);
        self.blocks.pop();
        self.pending.push((lo, hi));
    }

    /// The open block ends at `cur`; either close it or add a later point.
    fn extend(&mut self, cur: usize, hi: usize) {
        let block = self.blocks.last().expect("open block");
        let k = block.len();
        let closable = k >= 3 || (k == 2 && !same_side(self.layout, block[0], block[1]));
        if closable {
            self.pending.push((cur + 1, hi));
            self.next_interval();
            self.pending.pop();
        }
        // the points strictly between cur and b form an independent interval
        let grows = usize::from(k >= 2);
        if self.nodes + grows > self.max_nodes {
            return;
        }
        self.nodes += grows;
        for b in cur + 1..hi {
            if b - cur - 1 == 1 {
                continue;
            }
            self.pending.push((cur + 1, b));
            self.blocks.last_mut().expect("open block").push(b);
            self.extend(b, hi);
            self.blocks.last_mut().expect("open block").pop();
            self.pending.pop();
            if self.stopped {
                break;
            }
        }
        self.nodes -= grows;
    }
}

/// Visits the valid partitions for one layout whose trees have at most
/// `max_nodes` internal nodes in total; `visit` returns false to stop.
pub fn for_each_partition<F: FnMut(&[Vec<usize>]) -> bool>(layout: &Layout, max_nodes: usize, visit: F) -> bool {
    let n = layout.num_points();
    let mut w =
        PartitionWalk { layout, max_nodes, nodes: 0, blocks: Vec::new(), pending: vec![(0, n)], visit, stopped: false };
    w.next_interval();
    !w.stopped
}

/// All crossing-count vectors within the limits, by increasing total.
pub fn count_vectors(kedges: usize, limits: &Limits) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=limits.total_crossings {
        let mut cur = vec![0; kedges];
        compositions(&mut cur, 0, total, limits.crossings_per_edge, &mut out);
    }
    out
}

fn compositions(cur: &mut Vec<usize>, i: usize, left: usize, cap: usize, out: &mut Vec<Vec<usize>>) {
    if i == cur.len() {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for m in (0..=left.min(cap)).rev() {
        cur[i] = m;
        compositions(cur, i + 1, left - m, cap, out);
    }
    cur[i] = 0;
}

/// Skeletons within the limits, optionally filtered by [`accept_skeleton`].
pub fn enumerate_skeletons(
    schema: &DiskSchema,
    limits: &Limits,
    filter: Option<(&[(VertexId, VertexId)], &[VertexId])>,
) -> Result<Vec<Skeleton>> {
    let mut out = Vec::new();
    for counts in count_vectors(schema.num_kedges(), limits) {
        let layout = Layout::new(schema, &counts)?;
        let mut check = filter.map(|(pairs, terms)| SkeletonCheck::new(schema, &layout, pairs, terms));
        for_each_partition(&layout, limits.vertices, |blocks| {
            let big = blocks.iter().filter(|b| b.len() >= 3);
            let vertices: usize = big.clone().map(|b| b.len() - 2).sum();
            let tree_edges: usize = big.map(|b| 2 * b.len() - 3).sum();
            if vertices > limits.vertices || tree_edges > limits.tree_edges {
                return true;
            }
            if check.as_mut().is_some_and(|c| !c.accept(blocks)) {
                return true;
            }
            out.push(Skeleton { counts: counts.clone(), blocks: blocks.to_vec() });
            true
        });
    }
    Ok(out)
}

/// Full binary tree over an interval of leaves.
#[derive(Clone, Debug)]
enum Shape {
    Leaf(usize),
    Node(Box<Shape>, Box<Shape>),
}

fn shapes(lo: usize, hi: usize) -> Vec<Shape> {
    if hi - lo == 1 {
        return vec![Shape::Leaf(lo)];
    }
    let mut out = Vec::new();
    for mid in lo + 1..hi {
        for l in shapes(lo, mid) {
            for r in shapes(mid, hi) {
                out.push(Shape::Node(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

/// Adds the tree of `shape` under node `parent_end` (already counted).
fn add_shape(top: &mut Topology, leaves: &[usize], shape: &Shape, parent: End) -> usize {
    match shape {
        Shape::Leaf(i) => {
            top.edges.push((parent, End::Point(leaves[*i])));
            top.edges.len() - 1
        }
        Shape::Node(l, r) => {
            let v = top.nodes;
            top.nodes += 1;
            top.rotation.push(Vec::new());
            top.edges.push((parent, End::Node(v)));
            let up = top.edges.len() - 1;
            let el = add_shape(top, leaves, l, End::Node(v));
            let er = add_shape(top, leaves, r, End::Node(v));
            top.rotation[v] = vec![up, el, er];
            up
        }
    }
}

/// Every plane binary shape for the trees of a skeleton.
pub fn expand_shapes(sk: &Skeleton) -> Vec<Topology> {
    let mut tops = vec![Topology { counts: sk.counts.clone(), nodes: 0, edges: Vec::new(), rotation: Vec::new() }];
    for b in &sk.blocks {
        let mut pts = b.clone();
        pts.sort_unstable();
        if pts.len() == 2 {
            for t in &mut tops {
                t.edges.push((End::Point(pts[0]), End::Point(pts[1])));
            }
            continue;
        }
        let k = pts.len();
        let options = shapes(1, k);
        let mut next = Vec::with_capacity(tops.len() * options.len());
        for t in &tops {
            for s in &options {
                let mut t = t.clone();
                let Shape::Node(l, r) = s else { unreachable!("at least two leaves below the root") };
                let v = t.nodes;
                t.nodes += 1;
                t.rotation.push(Vec::new());
                t.edges.push((End::Point(pts[0]), End::Node(v)));
                let up = t.edges.len() - 1;
                let el = add_shape(&mut t, &pts, l, End::Node(v));
                let er = add_shape(&mut t, &pts, r, End::Node(v));
                t.rotation[v] = vec![up, el, er];
                next.push(t);
            }
        }
        tops = next;
    }
    tops
}

/// Every good topology within the limits (no validity filter).
pub fn enumerate_topologies(schema: &DiskSchema, limits: &Limits) -> Result<Vec<Topology>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for sk in enumerate_skeletons(schema, limits, None)? {
        for t in expand_shapes(&sk) {
            if seen.insert(t.canonical_encoding()) {
                out.push(t);
            }
        }
    }
    Ok(out)
}
