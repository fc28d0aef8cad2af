//! Cut graph through the terminals and the disk obtained by cutting along it.
//!
//! The cut graph is grown inside the dual graph: a shortest Steiner tree on
//! the faces next to the terminals, extended to a spanning tree of the dual
//! graph, then completed by the edges left over by a spanning cotree of `G`.
//! Dual tree branches that reach no terminal and no leftover edge are pruned.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::crossmetric::{build_overlay, side_face, Anchor, Crossing, Curve, NodeKind, Overlay, Piece};
use crate::embed::{Dart, EdgeId, EmbeddedGraph, FaceId, FaceStructure, VertexId, Weight};
use crate::error::{Error, Result};
use crate::gmap::{Flag, GMap};

/// Face adjacency of the dual graph: `(edge, other face)` per face, in edge
/// order. Loops of the dual appear once.
#[derive(Clone, Debug)]
pub struct DualAdjacency {
    pub adj: Vec<Vec<(EdgeId, FaceId)>>,
}

impl DualAdjacency {
    pub fn new(g: &EmbeddedGraph, faces: &FaceStructure) -> Self {
        let mut adj = vec![Vec::new(); faces.num_faces()];
        for e in 0..g.num_edges() {
            let (a, b) = faces.edge_faces(e);
            adj[a].push((e, b));
            if a != b {
                adj[b].push((e, a));
            }
        }
        DualAdjacency { adj }
    }
}

/// Cross-metric distances from a set of source faces.
#[derive(Clone, Debug)]
pub struct FaceDistances {
    pub dist: Vec<Weight>,
    /// Edge crossed last and the face it was crossed from.
    pub parent: Vec<Option<(EdgeId, FaceId)>>,
}

impl FaceDistances {
    /// Distance from the sources to a vertex: a curve reaches a vertex
    /// through any incident face at no extra cost.
    pub fn to_vertex(&self, g: &EmbeddedGraph, faces: &FaceStructure, v: VertexId) -> (Weight, FaceId) {
        incident_faces(g, faces, v).into_iter().map(|f| (self.dist[f], f)).min().expect("vertex has a corner")
    }

    /// Crossings of a shortest curve from the sources to face `f`, ending in `f`.
    pub fn path_to(&self, f: FaceId) -> Vec<(EdgeId, FaceId, FaceId)> {
        let mut out = Vec::new();
        let mut cur = f;
        while let Some((e, from)) = self.parent[cur] {
            out.push((e, from, cur));
            cur = from;
        }
        out.reverse();
        out
    }

    /// Face a shortest curve to `f` starts from.
    pub fn root_of(&self, f: FaceId) -> FaceId {
        let mut cur = f;
        while let Some((_, from)) = self.parent[cur] {
            cur = from;
        }
        cur
    }
}

/// Faces incident to `v`, sorted and deduplicated.
pub fn incident_faces(g: &EmbeddedGraph, faces: &FaceStructure, v: VertexId) -> Vec<FaceId> {
    let mut out: Vec<FaceId> = g.rotation(v).iter().map(|&d| faces.face_of_flag[2 * d]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Multi-source Dijkstra over the dual graph. Ties are broken by face id,
/// then by edge id.
pub fn face_distances(g: &EmbeddedGraph, dual: &DualAdjacency, sources: &[FaceId]) -> FaceDistances {
    let n = dual.adj.len();
    let mut dist = vec![Weight::MAX; n];
    let mut parent = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0;
        heap.push(Reverse((0, s)));
    }
    let mut done = vec![false; n];
    while let Some(Reverse((d, f))) = heap.pop() {
        if done[f] {
            continue;
        }
        done[f] = true;
        for &(e, h) in &dual.adj[f] {
            let nd = d + g.weight(e);
            if nd < dist[h] {
                dist[h] = nd;
                parent[h] = Some((e, f));
                heap.push(Reverse((nd, h)));
            }
        }
    }
    FaceDistances { dist, parent }
}

/// Cross-metric shortest paths from a vertex of `G`: every incident face is
/// a source at distance 0.
pub fn cross_metric_shortest_paths(g: &EmbeddedGraph, faces: &FaceStructure, source: VertexId) -> FaceDistances {
    let dual = DualAdjacency::new(g, faces);
    face_distances(g, &dual, &incident_faces(g, faces, source))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KVertex {
    Terminal { vertex: VertexId },
    Branch { face: FaceId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KEdge {
    pub from: usize,
    pub to: usize,
    pub curve: Curve,
}

#[derive(Clone, Debug)]
pub struct CutGraph {
    pub vertices: Vec<KVertex>,
    pub edges: Vec<KEdge>,
}

impl CutGraph {
    pub fn length(&self, g: &EmbeddedGraph) -> Weight {
        self.edges.iter().flat_map(|e| &e.curve.crossings).map(|c| g.weight(c.edge)).sum()
    }

    pub fn terminal_vertex(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|k| matches!(*k, KVertex::Terminal { vertex, .. } if vertex == v))
    }
}

/// Node of the abstract cut graph before dissolving degree-two faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Node {
    Face(FaceId),
    Term(VertexId),
}

/// Link of the abstract cut graph: a crossing of edge `e`, or the attachment
/// of a terminal to its face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Link {
    Dual(EdgeId),
    Attach(VertexId),
}

/// Builds a cut graph whose vertices include every terminal of `g`.
pub fn build_cut_graph(g: &EmbeddedGraph, faces: &FaceStructure) -> Result<CutGraph> {
    let terms = g.terminals();
    if terms.is_empty() {
        return Err(Error::Input("cut graph needs at least one terminal".into()));
    }
    let dual = DualAdjacency::new(g, faces);
    let nf = faces.num_faces();
    let mut in_tree = vec![false; nf];
    let mut tree_edge = vec![false; g.num_edges()];
    let mut attach: Vec<(VertexId, FaceId)> = Vec::new();
    let mut attached = vec![terms[0]];

    // Steiner tree grown from the lowest terminal: repeatedly join the
    // nearest unattached terminal, starting from a tree face or from any
    // face around an attached terminal.
    while attached.len() < terms.len() {
        let mut sources: Vec<FaceId> = (0..nf).filter(|&f| in_tree[f]).collect();
        for &u in &attached {
            sources.extend(incident_faces(g, faces, u));
        }
        sources.sort_unstable();
        sources.dedup();
        let d = face_distances(g, &dual, &sources);
        let (_, v, f) = terms
            .iter()
            .filter(|v| !attached.contains(v))
            .map(|&v| {
                let (w, f) = d.to_vertex(g, faces, v);
                (w, v, f)
            })
            .min()
            .expect("an unattached terminal remains");
        let start = d.root_of(f);
        if !in_tree[start] {
            let u = *attached
                .iter()
                .filter(|&&u| incident_faces(g, faces, u).contains(&start))
                .min()
                .expect("source face lies around an attached terminal");
            attach.push((u, start));
        }
        attach.push((v, f));
        attached.push(v);
        in_tree[start] = true;
        in_tree[f] = true;
        for (e, a, b) in d.path_to(f) {
            tree_edge[e] = true;
            in_tree[a] = true;
            in_tree[b] = true;
        }
    }
    if terms.len() == 1 {
        let f = incident_faces(g, faces, terms[0])[0];
        attach.push((terms[0], f));
        in_tree[f] = true;
    }

    // Spanning tree of faces and terminals by shortest paths from the
    // Steiner tree; faces around attached terminals are roots too.
    let mut sources: Vec<FaceId> = (0..nf).filter(|&f| in_tree[f]).collect();
    for &u in terms {
        sources.extend(incident_faces(g, faces, u));
    }
    sources.sort_unstable();
    sources.dedup();
    let d = face_distances(g, &dual, &sources);
    for f in 0..nf {
        if in_tree[f] {
            continue;
        }
        match d.parent[f] {
            Some((e, _)) => tree_edge[e] = true,
            None => {
                let u = *terms.iter().find(|&&u| incident_faces(g, faces, u).contains(&f)).expect("root face");
                attach.push((u, f));
            }
        }
    }
    attach.sort_unstable();
    attach.dedup();

    // Spanning cotree of G, with every terminal split at the corners used
    // by attachments, keeping long loops in the cotree so the leftover
    // edges close short loops.
    let corner_of = |v: VertexId, f: FaceId| -> Dart {
        *g.rotation(v).iter().filter(|&&d| faces.face_of_flag[2 * d] == f).min().expect("terminal sees the face")
    };
    let mut node_of_dart: Vec<usize> = (0..2 * g.num_edges()).map(|d| g.dart_origin(d)).collect();
    let mut nodes = g.num_vertices();
    for &v in terms {
        let rot = g.rotation(v);
        let used: Vec<usize> =
            (0..rot.len()).filter(|&i| attach.iter().any(|&(u, f)| u == v && corner_of(v, f) == rot[i])).collect();
        if used.len() < 2 {
            continue;
        }
        for (i, &dart) in rot.iter().enumerate() {
            let sector = used.iter().filter(|&&u| u < i).count() % used.len();
            if sector > 0 {
                node_of_dart[dart] = nodes + sector - 1;
            }
        }
        nodes += used.len() - 1;
    }
    let mut order: Vec<(Reverse<Weight>, EdgeId)> = (0..g.num_edges())
        .filter(|&e| !tree_edge[e])
        .map(|e| {
            let (a, b) = faces.edge_faces(e);
            (Reverse(d.dist[a] + g.weight(e) + d.dist[b]), e)
        })
        .collect();
    order.sort_unstable();
    let mut uf = UnionFind::new(nodes);
    let mut leftover = Vec::new();
    for (_, e) in order {
        if !uf.union(node_of_dart[2 * e], node_of_dart[2 * e + 1]) {
            leftover.push(e);
        }
    }
    if leftover.len() != faces.euler_genus as usize {
        return Err(Error::Internal(format!(
            "tree-cotree left {} edges on a surface of Euler genus {}",
            leftover.len(),
            faces.euler_genus
        )));
    }

    // Abstract cut graph: faces, terminals, crossings and attachments.
    let mut links: Vec<(Node, Node, Link)> = Vec::new();
    for e in 0..g.num_edges() {
        if tree_edge[e] || leftover.contains(&e) {
            let (a, b) = faces.edge_faces(e);
            links.push((Node::Face(a), Node::Face(b), Link::Dual(e)));
        }
    }
    for &(v, f) in &attach {
        links.push((Node::Term(v), Node::Face(f), Link::Attach(v)));
    }
    let mut alive = vec![true; links.len()];
    loop {
        let deg = degrees(&links, &alive);
        let leaf = links.iter().enumerate().find(|&(i, &(a, b, _))| {
            alive[i] && [a, b].iter().any(|n| matches!(n, Node::Face(_)) && deg[n] == 1)
        });
        match leaf {
            Some((i, _)) => alive[i] = false,
            None => break,
        }
    }
    // a face holding terminals is represented by its lowest terminal
    let mut host: HashMap<FaceId, VertexId> = HashMap::new();
    for (i, &(a, b, _)) in links.iter().enumerate() {
        if let (true, Node::Term(v), Node::Face(f)) = (alive[i], a, b) {
            if *host.entry(f).or_insert(v) == v {
                alive[i] = false;
            }
        }
    }
    let orig = links.clone();
    for l in links.iter_mut() {
        for n in [&mut l.0, &mut l.1] {
            if let Node::Face(f) = *n {
                if let Some(&v) = host.get(&f) {
                    *n = Node::Term(v);
                }
            }
        }
    }
    let deg = degrees(&links, &alive);
    let mut kv: Vec<Node> =
        deg.iter().filter(|(n, &d)| matches!(n, Node::Term(_)) || d != 2).map(|(n, _)| *n).collect();
    for &v in terms {
        if !kv.contains(&Node::Term(v)) {
            kv.push(Node::Term(v));
        }
    }
    kv.sort_unstable_by_key(|n| match *n {
        Node::Term(v) => (0, v),
        Node::Face(f) => (1, f),
    });
    let kindex: HashMap<Node, usize> = kv.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let vertices: Vec<KVertex> = kv
        .iter()
        .map(|n| match *n {
            Node::Term(v) => KVertex::Terminal { vertex: v },
            Node::Face(f) => KVertex::Branch { face: f },
        })
        .collect();
    // anchor of a curve end at node `n`, leaving into original face `f`
    let anchor = |n: Node, f: FaceId| -> Anchor {
        match n {
            Node::Term(v) => {
                let corner = *g
                    .rotation(v)
                    .iter()
                    .filter(|&&d| faces.face_of_flag[2 * d] == f)
                    .min()
                    .expect("terminal sees the face");
                Anchor::Vertex { vertex: v, corner }
            }
            Node::Face(f) => Anchor::Face { face: f, tag: 0 },
        }
    };
    // face of the original link end that became `n`
    let end_face = |i: usize, at_first: bool| -> FaceId {
        let (a, b, _) = orig[i];
        let (mine, other) = if at_first { (a, b) } else { (b, a) };
        match (mine, other) {
            (Node::Face(f), _) => f,
            (Node::Term(_), Node::Face(f)) => f,
            _ => unreachable!("links touch a face"),
        }
    };

    let mut inc: HashMap<Node, Vec<usize>> = HashMap::new();
    for (i, &(a, b, _)) in links.iter().enumerate() {
        if alive[i] {
            inc.entry(a).or_default().push(i);
            if a != b {
                inc.entry(b).or_default().push(i);
            }
        }
    }
    let mut used = vec![false; links.len()];
    let mut edges = Vec::new();
    for &start in &kv {
        for &l0 in inc.get(&start).map(|v| v.as_slice()).unwrap_or(&[]) {
            if used[l0] {
                continue;
            }
            let mut here = start;
            let mut link = l0;
            let mut crossings = Vec::new();
            let mut first_face = None;
            let last_face;
            loop {
                used[link] = true;
                let (a, _, kind) = links[link];
                let forward = a == here;
                let from = end_face(link, forward);
                let to = end_face(link, !forward);
                first_face.get_or_insert(from);
                if let Link::Dual(e) = kind {
                    crossings.push(Crossing { edge: e, index: 0, reversed: side_face(faces, e, 0) != from });
                }
                here = if forward { links[link].1 } else { links[link].0 };
                if kindex.contains_key(&here) {
                    last_face = to;
                    break;
                }
                link = *inc[&here].iter().find(|&&l| !used[l]).expect("degree-two node continues");
            }
            let (from, to) = (kindex[&start], kindex[&here]);
            let curve = Curve {
                start: anchor(start, first_face.expect("curve has a link")),
                end: anchor(here, last_face),
                crossings,
            };
            edges.push(KEdge { from, to, curve });
        }
    }
    let k = CutGraph { vertices, edges };
    for e in &k.edges {
        e.curve.check(g, faces)?;
    }
    Ok(k)
}

fn degrees(links: &[(Node, Node, Link)], alive: &[bool]) -> HashMap<Node, usize> {
    let mut deg: HashMap<Node, usize> = HashMap::new();
    for (i, &(a, b, _)) in links.iter().enumerate() {
        if alive[i] {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
    }
    deg
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// One copy of a cut-graph edge on the boundary of the disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub edge: usize,
    /// 0 for the copy met first along the boundary, 1 for the other.
    pub copy: u8,
    /// Whether the boundary walk runs along the edge from its start.
    pub forward: bool,
    /// Overlay face inside the disk along each segment of the edge, in the
    /// edge's own order.
    pub faces: Vec<FaceId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryItem {
    Corner { vertex: usize },
    Side(usize),
}

/// The disk `D` cut open along `K`.
#[derive(Clone, Debug)]
pub struct DiskSchema {
    /// Cyclic boundary; items alternate between corners and sides.
    pub boundary: Vec<BoundaryItem>,
    pub sides: Vec<Side>,
    /// Side indices of the two copies of every cut-graph edge.
    pub copies: Vec<[usize; 2]>,
    pub num_kvertices: usize,
    /// Number of overlay faces (all of them lie inside the disk).
    pub num_faces: usize,
    /// Pieces of `G` inside the disk: `(face, face, edge)`.
    pub g_pieces: Vec<(FaceId, FaceId, EdgeId)>,
    /// Cut-graph vertex of each terminal.
    pub terminal_kvertex: Vec<(VertexId, usize)>,
}

impl DiskSchema {
    pub fn num_kedges(&self) -> usize {
        self.copies.len()
    }

    /// Number of segments of cut-graph edge `c`.
    pub fn segments(&self, c: usize) -> usize {
        self.sides[self.copies[c][0]].faces.len()
    }

    /// Largest number of corners of one cut-graph vertex.
    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0; self.num_kvertices];
        for item in &self.boundary {
            if let BoundaryItem::Corner { vertex } = *item {
                deg[vertex] += 1;
            }
        }
        deg.into_iter().max().unwrap_or(0)
    }

    pub fn terminal_kvertex(&self, v: VertexId) -> Option<usize> {
        self.terminal_kvertex.iter().find(|(t, _)| *t == v).map(|&(_, k)| k)
    }
}

/// Overlays `K` on `G` and reads off the boundary of the disk.
pub fn cut_to_disk(g: &EmbeddedGraph, faces: &FaceStructure, k: &CutGraph) -> Result<(Overlay, DiskSchema)> {
    if k.edges.is_empty() {
        return Err(Error::Topology("cut graph without edges does not cut the surface into a disk".into()));
    }
    let euler = k.vertices.len() as i64 - k.edges.len() as i64 + 1;
    if euler != 2 - faces.euler_genus as i64 {
        return Err(Error::Topology("cut graph complement is not a single disk".into()));
    }
    let curves: Vec<Curve> = k.edges.iter().map(|e| e.curve.clone()).collect();
    let ov = build_overlay(g, faces, &curves)?;
    let kvertex_of_node: HashMap<usize, usize> = {
        let mut m = HashMap::new();
        for (node, kind) in ov.nodes.iter().enumerate() {
            let kv = match *kind {
                NodeKind::Vertex(v) => k.terminal_vertex(v),
                NodeKind::FacePoint { face, .. } => {
                    k.vertices.iter().position(|x| *x == KVertex::Branch { face })
                }
                NodeKind::Crossing { .. } => None,
            };
            if let Some(kv) = kv {
                m.insert(node, kv);
            }
        }
        m
    };
    let is_kvertex = |x: Flag| kvertex_of_node.contains_key(&ov.node_of_flag[x]);
    let kflags: Vec<Flag> = (0..ov.gmap.len()).filter(|&x| ov.is_curve_flag(x)).collect();
    let x0 = *kflags.iter().find(|&&x| is_kvertex(x)).expect("cut graph has a vertex");
    // walk the single face of K, one piece traversal at a time
    let mut trav: Vec<Flag> = Vec::new();
    let mut x = x0;
    loop {
        trav.push(x);
        x = ov.a1_curves(ov.gmap.a0(x));
        if x == x0 {
            break;
        }
        if trav.len() > kflags.len() {
            return Err(Error::Internal("boundary walk does not close".into()));
        }
    }
    if 2 * trav.len() != kflags.len() {
        return Err(Error::Topology("cut graph complement has more than one face".into()));
    }
    let mut boundary = Vec::new();
    let mut sides: Vec<Side> = Vec::new();
    let mut copies: Vec<Vec<usize>> = vec![Vec::new(); k.edges.len()];
    let mut i = 0;
    while i < trav.len() {
        let first = trav[i];
        boundary.push(BoundaryItem::Corner { vertex: kvertex_of_node[&ov.node_of_flag[first]] });
        let Piece::K { curve, .. } = ov.piece[first] else { unreachable!() };
        let forward = ov.at_start[first];
        let mut faces_along = vec![usize::MAX; ov.curve_pieces[curve]];
        loop {
            let x = trav[i];
            let Piece::K { curve: c, piece } = ov.piece[x] else { unreachable!() };
            debug_assert_eq!(c, curve);
            faces_along[piece] = ov.faces.face_of_flag[x];
            i += 1;
            if is_kvertex(ov.gmap.a0(x)) {
                break;
            }
        }
        if faces_along.contains(&usize::MAX) {
            return Err(Error::Internal("side misses a segment".into()));
        }
        let copy = copies[curve].len() as u8;
        copies[curve].push(sides.len());
        boundary.push(BoundaryItem::Side(sides.len()));
        sides.push(Side { edge: curve, copy, forward, faces: faces_along });
    }
    let copies: Vec<[usize; 2]> = copies
        .into_iter()
        .map(|c| <[usize; 2]>::try_from(c).map_err(|_| Error::Topology("edge without two sides".into())))
        .collect::<Result<_>>()?;
    let mut g_pieces = Vec::new();
    for x in 0..ov.gmap.len() {
        if let Piece::G { edge, .. } = ov.piece[x] {
            // one representative flag per piece: side 0 at its start end
            if ov.side[x] == 0 && ov.at_start[x] {
                let y = ov.gmap.a2(x);
                g_pieces.push((ov.faces.face_of_flag[x], ov.faces.face_of_flag[y], edge));
            }
        }
    }
    let terminal_kvertex = g
        .terminals()
        .iter()
        .filter_map(|&v| k.terminal_vertex(v).map(|kv| (v, kv)))
        .collect();
    let schema = DiskSchema {
        boundary,
        sides,
        copies,
        num_kvertices: k.vertices.len(),
        num_faces: ov.num_faces(),
        g_pieces,
        terminal_kvertex,
    };
    Ok((ov, schema))
}

/// Map of `K` alone, read from the overlay with crossing nodes dissolved.
/// Flags are the curve flags at cut-graph vertices.
pub fn kmap_from_overlay(ov: &Overlay) -> GMap {
    let at_kvertex = |x: Flag| !matches!(ov.nodes[ov.node_of_flag[x]], NodeKind::Crossing { .. });
    let flags: Vec<Flag> = (0..ov.gmap.len()).filter(|&x| ov.is_curve_flag(x) && at_kvertex(x)).collect();
    let idx: HashMap<Flag, usize> = flags.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut a = [vec![0; flags.len()], vec![0; flags.len()], vec![0; flags.len()]];
    for (i, &x) in flags.iter().enumerate() {
        let mut y = ov.gmap.a0(x);
        while !at_kvertex(y) {
            y = ov.gmap.a0(ov.a1_curves(y));
        }
        a[0][i] = idx[&y];
        a[1][i] = idx[&ov.a1_curves(x)];
        a[2][i] = idx[&ov.gmap.a2(x)];
    }
    let [a0, a1, a2] = a;
    GMap::from_involutions(a0, a1, a2).expect("restriction is a map")
}

/// Glues the polygon of the schema back along its side pairing. The result
/// is the map of `K` with a single face.
pub fn reglue(schema: &DiskSchema) -> Result<GMap> {
    let sides: Vec<usize> = schema
        .boundary
        .iter()
        .filter_map(|b| match b {
            BoundaryItem::Side(s) => Some(*s),
            _ => None,
        })
        .collect();
    let n = sides.len();
    // polygon edge i has flag 2i where the walk enters it and 2i+1 where it leaves
    let mut a0 = vec![0; 2 * n];
    let mut a1 = vec![0; 2 * n];
    let mut a2 = vec![0; 2 * n];
    for i in 0..n {
        let j = (i + 1) % n;
        a0[2 * i] = 2 * i + 1;
        a0[2 * i + 1] = 2 * i;
        a1[2 * i + 1] = 2 * j;
        a1[2 * j] = 2 * i + 1;
    }
    let pos: HashMap<usize, usize> = sides.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    for c in 0..schema.num_kedges() {
        let [s0, s1] = schema.copies[c];
        // flag of a side at the start of its cut-graph edge
        let start = |s: usize| 2 * pos[&s] + usize::from(!schema.sides[s].forward);
        let (x, y) = (start(s0), start(s1));
        a2[x] = y;
        a2[y] = x;
        a2[x ^ 1] = y ^ 1;
        a2[y ^ 1] = x ^ 1;
    }
    GMap::from_involutions(a0, a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::trace_faces;
    use crate::generate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn schema_of(g: &EmbeddedGraph) -> (CutGraph, Overlay, DiskSchema) {
        let faces = trace_faces(g).unwrap();
        let k = build_cut_graph(g, &faces).unwrap();
        let (ov, s) = cut_to_disk(g, &faces, &k).unwrap();
        (k, ov, s)
    }

    #[test]
    fn terminal_faces_are_at_distance_zero() {
        let g = generate::cube();
        let faces = trace_faces(&g).unwrap();
        let d = cross_metric_shortest_paths(&g, &faces, 0);
        for f in incident_faces(&g, &faces, 0) {
            assert_eq!(d.dist[f], 0);
        }
        // the antipodal vertex of the cube is three faces away
        assert_eq!(d.to_vertex(&g, &faces, 6).0, 1);
        let p = generate::path(4);
        let faces = trace_faces(&p).unwrap();
        let d = cross_metric_shortest_paths(&p, &faces, 0);
        assert_eq!(d.to_vertex(&p, &faces, 3).0, 0);
    }

    #[test]
    fn sphere_with_two_terminals_gives_a_bigon() {
        let g = generate::cube().with_terminals(vec![0, 6], vec![(0, 6)]).unwrap();
        let (k, _, s) = schema_of(&g);
        assert_eq!(k.edges.len(), 1);
        assert_eq!(s.boundary.len(), 4);
        assert!(matches!(s.boundary[0], BoundaryItem::Corner { .. }));
        let BoundaryItem::Side(a) = s.boundary[1] else { panic!() };
        let BoundaryItem::Side(b) = s.boundary[3] else { panic!() };
        assert_eq!(s.sides[a].edge, s.sides[b].edge);
        assert_ne!(s.sides[a].forward, s.sides[b].forward);
    }

    #[test]
    fn torus_cut_graph_has_two_loops() {
        let g = generate::torus_bouquet(1, 1).with_terminals(vec![0], vec![]).unwrap();
        let (k, ov, s) = schema_of(&g);
        assert_eq!(k.vertices.len(), 1);
        assert_eq!(k.edges.len(), 2);
        assert_eq!(s.sides.len(), 2 * k.edges.len());
        let kmap = kmap_from_overlay(&ov);
        let glued = reglue(&s).unwrap();
        assert!(kmap.isomorphic_with(&glued, |_| 0, |_| 0));
        assert_eq!(glued.face_count(), 1);
    }

    #[test]
    fn projective_plane_is_cut_open() {
        let g = generate::projective_loop().with_terminals(vec![0], vec![]).unwrap();
        let (_, ov, s) = schema_of(&g);
        let glued = reglue(&s).unwrap();
        assert!(!glued.is_orientable());
        assert!(kmap_from_overlay(&ov).isomorphic_with(&glued, |_| 0, |_| 0));
    }

    #[test]
    fn random_cut_graphs_are_disks_and_reglue() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..150 {
            let base = if i % 2 == 0 {
                generate::random_planar(8, 13, &mut rng)
            } else {
                generate::random_torus(5, 10, &mut rng)
            };
            let base = generate::random_weights(&base, 1, 9, &mut rng);
            let g = generate::random_terminals(&base, 2 + i % 3, 2, &mut rng);
            let faces = trace_faces(&g).unwrap();
            let k = build_cut_graph(&g, &faces).unwrap();
            let (ov, s) = cut_to_disk(&g, &faces, &k).unwrap();
            assert_eq!(ov.gmap.euler_characteristic(), 2 - faces.euler_genus as i64);
            let glued = reglue(&s).unwrap();
            assert_eq!(glued.face_count(), 1);
            assert!(kmap_from_overlay(&ov).isomorphic_with(&glued, |_| 0, |_| 0), "instance {i}");
            for &v in g.terminals() {
                assert!(s.terminal_kvertex(v).is_some());
            }
            // each segment face pair is the pair of faces along that piece
            for c in 0..s.num_kedges() {
                let [p, q] = s.copies[c];
                assert_eq!(s.sides[p].faces.len(), s.sides[q].faces.len());
            }
        }
    }

    /// Minimum spanning tree weight of the complete graph on `t` nodes, by
    /// trying every Pruefer sequence.
    fn exhaustive_mst(d: &[Vec<Weight>]) -> Weight {
        let t = d.len();
        if t < 2 {
            return 0;
        }
        if t == 2 {
            return d[0][1];
        }
        let mut best = Weight::MAX;
        let total = t.pow(t as u32 - 2);
        for code in 0..total {
            let mut seq: Vec<usize> = (0..t - 2).map(|i| code / t.pow(i as u32) % t).collect();
            let mut degree = vec![1; t];
            for &x in &seq {
                degree[x] += 1;
            }
            let mut w = 0;
            seq.push(usize::MAX);
            for &x in &seq[..t - 2] {
                let leaf = (0..t).find(|&v| degree[v] == 1).unwrap();
                w += d[leaf][x];
                degree[leaf] = 0;
                degree[x] -= 1;
            }
            let rest: Vec<usize> = (0..t).filter(|&v| degree[v] == 1).collect();
            w += d[rest[0]][rest[1]];
            best = best.min(w);
        }
        best
    }

    #[test]
    fn planar_cut_graph_is_no_longer_than_a_spanning_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..120 {
            let base = generate::random_planar(9, 15, &mut rng);
            let base = generate::random_weights(&base, 1, 10, &mut rng);
            let g = generate::random_terminals(&base, 2 + i % 3, 1, &mut rng);
            let faces = trace_faces(&g).unwrap();
            let terms = g.terminals().to_vec();
            let d: Vec<Vec<Weight>> = terms
                .iter()
                .map(|&u| {
                    let du = cross_metric_shortest_paths(&g, &faces, u);
                    terms.iter().map(|&v| du.to_vertex(&g, &faces, v).0).collect()
                })
                .collect();
            let k = build_cut_graph(&g, &faces).unwrap();
            assert!(k.length(&g) <= exhaustive_mst(&d), "instance {i}");
        }
    }
}
