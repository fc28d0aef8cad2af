//! Curves measured by their crossings with `G`, and the overlay of `G` with a
//! family of pairwise disjoint curves.
//!
//! Side `s` of edge `e` is the side containing flag `4e + s` of the map of
//! `G`. A crossing that is not `reversed` goes from side 0 to side 1.

use std::collections::HashMap;

use crate::embed::{faces_of_gmap, Dart, EdgeId, EmbeddedGraph, FaceId, FaceStructure, VertexId, Weight};
use crate::error::{Error, Result};
use crate::gmap::{Flag, GMap};
use serde::{Deserialize, Serialize};

/// End point of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Anchor {
    /// A vertex of `G`; the curve leaves it through the corner that follows
    /// `corner` in the rotation.
    Vertex { vertex: VertexId, corner: Dart },
    /// A point inside face `face`; `tag` tells apart points in one face.
    Face { face: FaceId, tag: usize },
}

impl Anchor {
    /// The face of `G` the curve enters from this anchor.
    pub fn face(&self, faces: &FaceStructure) -> FaceId {
        match *self {
            Anchor::Vertex { corner, .. } => faces.face_of_flag[2 * corner],
            Anchor::Face { face, .. } => face,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    pub edge: EdgeId,
    /// Position along the edge, counted from its tail; shared by all curves.
    pub index: u32,
    pub reversed: bool,
}

impl Crossing {
    pub fn entry_side(&self) -> usize {
        usize::from(self.reversed)
    }

    pub fn exit_side(&self) -> usize {
        1 - self.entry_side()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub start: Anchor,
    pub end: Anchor,
    pub crossings: Vec<Crossing>,
}

#[inline]
pub fn side_face(faces: &FaceStructure, e: EdgeId, side: usize) -> FaceId {
    faces.face_of_flag[4 * e + side]
}

impl Curve {
    /// Checks that consecutive events agree on the face they share.
    pub fn check(&self, g: &EmbeddedGraph, faces: &FaceStructure) -> Result<()> {
        let mut here = self.start.face(faces);
        for (i, c) in self.crossings.iter().enumerate() {
            if c.edge >= g.num_edges() {
                return Err(Error::Curve(format!("crossing {i} names unknown edge {}", c.edge)));
            }
            if side_face(faces, c.edge, c.entry_side()) != here {
                return Err(Error::Curve(format!("crossing {i} does not start in face {here}")));
            }
            here = side_face(faces, c.edge, c.exit_side());
        }
        if here != self.end.face(faces) {
            return Err(Error::Curve("curve does not end in the face of its end anchor".into()));
        }
        if let Anchor::Vertex { vertex, corner } = self.start {
            if g.dart_origin(corner) != vertex {
                return Err(Error::Curve("start corner is not at its vertex".into()));
            }
        }
        if let Anchor::Vertex { vertex, corner } = self.end {
            if g.dart_origin(corner) != vertex {
                return Err(Error::Curve("end corner is not at its vertex".into()));
            }
        }
        Ok(())
    }

    pub fn reversed(&self) -> Curve {
        Curve {
            start: self.end,
            end: self.start,
            crossings: self
                .crossings
                .iter()
                .rev()
                .map(|c| Crossing { edge: c.edge, index: c.index, reversed: !c.reversed })
                .collect(),
        }
    }
}

/// Cross-metric length: the weight of every crossed edge, with multiplicity.
/// Anchors contribute nothing.
pub fn curve_length(c: &Curve, g: &EmbeddedGraph, faces: &FaceStructure) -> Result<Weight> {
    c.check(g, faces)?;
    Ok(c.crossings.iter().map(|x| g.weight(x.edge)).sum())
}

/// What a flag of the overlay belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Piece {
    /// Piece `piece` (counted from the tail) of edge `edge` of `G`.
    G { edge: EdgeId, piece: usize },
    /// Piece `piece` (counted from the start) of curve `curve`.
    K { curve: usize, piece: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// A vertex of `G` (possibly carrying curve anchors).
    Vertex(VertexId),
    /// A crossing between an edge of `G` and a curve.
    Crossing { edge: EdgeId, index: u32 },
    /// A curve anchor inside a face of `G`.
    FacePoint { face: FaceId, tag: usize },
}

/// Combinatorial map of `G` overlaid with curves.
#[derive(Clone, Debug)]
pub struct Overlay {
    pub gmap: GMap,
    pub piece: Vec<Piece>,
    /// Whether the flag lies at the start end of its piece (tail end for
    /// pieces of `G`, the earlier end along the curve otherwise).
    pub at_start: Vec<bool>,
    /// Side of the piece the flag is on: for `G` pieces the side of the
    /// original edge; for curve pieces 0 or 1 (arbitrary but consistent along
    /// one piece).
    pub side: Vec<u8>,
    pub faces: FaceStructure,
    pub node_of_flag: Vec<usize>,
    pub nodes: Vec<NodeKind>,
    pub num_curves: usize,
    /// Number of pieces of every curve.
    pub curve_pieces: Vec<usize>,
    /// Face of `G` that contains each face of the overlay.
    pub base_face: Vec<FaceId>,
}

impl Overlay {
    pub fn num_faces(&self) -> usize {
        self.faces.num_faces()
    }

    pub fn is_curve_flag(&self, x: Flag) -> bool {
        matches!(self.piece[x], Piece::K { .. })
    }

    /// `a1` restricted to curve flags: turns around the node past `G` pieces.
    pub fn a1_curves(&self, x: Flag) -> Flag {
        let mut y = self.gmap.a1(x);
        while !self.is_curve_flag(y) {
            y = self.gmap.a1(self.gmap.a2(y));
        }
        y
    }

    /// `a1` restricted to `G` flags.
    pub fn a1_graph(&self, x: Flag) -> Flag {
        let mut y = self.gmap.a1(x);
        while self.is_curve_flag(y) {
            y = self.gmap.a1(self.gmap.a2(y));
        }
        y
    }

    /// Flags on side `side` of curve piece `(curve, piece)`, as
    /// `(start-end flag, end-end flag)`.
    pub fn curve_piece_side(&self, curve: usize, piece: usize, side: u8) -> (Flag, Flag) {
        let mut s = None;
        for x in 0..self.gmap.len() {
            if self.piece[x] == (Piece::K { curve, piece }) && self.side[x] == side && self.at_start[x] {
                s = Some(x);
                break;
            }
        }
        let s = s.expect("curve piece exists");
        (s, self.gmap.a0(s))
    }
}

enum Attach {
    /// Corner flag at a crossing node.
    Fixed(Flag),
    Anchor(Anchor),
}

struct Builder {
    map: GMap,
    piece: Vec<Piece>,
    at_start: Vec<bool>,
    side: Vec<u8>,
    anchor_flags: HashMap<Anchor, Vec<Flag>>,
    node_hint: Vec<Option<NodeKind>>,
}

impl Builder {
    fn grow(&mut self, piece: Piece, at_start: bool, side: u8) {
        while self.piece.len() < self.map.len() {
            self.piece.push(piece);
            self.at_start.push(at_start);
            self.side.push(side);
            self.node_hint.push(None);
        }
    }

    fn candidates(&self, a: &Attach) -> Option<Vec<Flag>> {
        match a {
            Attach::Fixed(x) => Some(vec![*x]),
            Attach::Anchor(anchor) => match self.anchor_flags.get(anchor) {
                Some(fl) => Some(fl.clone()),
                None => match *anchor {
                    Anchor::Vertex { corner, .. } => Some(vec![2 * corner]),
                    Anchor::Face { .. } => None,
                },
            },
        }
    }

    fn same_face(&self, x: Flag, y: Flag) -> bool {
        let y1 = self.map.a1(y);
        self.map.face_walk(x).iter().any(|&z| z == y || z == y1)
    }

    fn insert(&mut self, curve: usize, idx: usize, a: Attach, b: Attach) -> Result<()> {
        let ca = self.candidates(&a);
        let cb = self.candidates(&b);
        let kp = Piece::K { curve, piece: idx };
        match (ca, cb) {
            (None, None) => Err(Error::Curve(format!("piece {idx} of curve {curve} floats between two new points"))),
            (Some(ca), None) => {
                let c = ca[0];
                let f = self.map.add_pendant(c);
                self.tag_new(f, kp);
                self.register(&a, &f[..2]);
                self.register(&b, &f[2..]);
                Ok(())
            }
            (None, Some(cb)) => {
                let c = cb[0];
                // the pendant grows from b, so its old-corner flags are the end
                let f = self.map.add_pendant(c);
                self.tag_new([f[2], f[3], f[0], f[1]], kp);
                self.register(&b, &f[..2]);
                self.register(&a, &f[2..]);
                Ok(())
            }
            (Some(ca), Some(cb)) => {
                for &x in &ca {
                    for &y in &cb {
                        if x != y && self.map.a1(x) != y && self.same_face(x, y) {
                            let f = self.map.insert_edge(x, y)?;
                            self.tag_new(f, kp);
                            self.register(&a, &f[..2]);
                            self.register(&b, &f[2..]);
                            return Ok(());
                        }
                    }
                }
                Err(Error::Curve(format!("piece {idx} of curve {curve} would cross another curve")))
            }
        }
    }

    fn tag_new(&mut self, f: [Flag; 4], kp: Piece) {
        self.grow(kp, true, 0);
        self.at_start[f[0]] = true;
        self.at_start[f[1]] = true;
        self.at_start[f[2]] = false;
        self.at_start[f[3]] = false;
        self.side[f[0]] = 0;
        self.side[f[2]] = 0;
        self.side[f[1]] = 1;
        self.side[f[3]] = 1;
    }

    fn register(&mut self, a: &Attach, flags: &[Flag]) {
        if let Attach::Anchor(anchor) = a {
            self.anchor_flags.entry(*anchor).or_default().extend_from_slice(flags);
            if let Anchor::Face { face, tag } = *anchor {
                for &x in flags {
                    self.node_hint[x] = Some(NodeKind::FacePoint { face, tag });
                }
            }
        }
    }
}

/// Builds the overlay of `G` and pairwise disjoint curves. Curves may share
/// anchors, and several corners of one vertex may carry curves.
pub fn build_overlay(g: &EmbeddedGraph, faces: &FaceStructure, curves: &[Curve]) -> Result<Overlay> {
    for c in curves {
        c.check(g, faces)?;
    }
    let base = g.gmap();
    let ng = base.len();
    let mut b = Builder {
        map: base,
        piece: Vec::new(),
        at_start: Vec::new(),
        side: Vec::new(),
        anchor_flags: HashMap::new(),
        node_hint: Vec::new(),
    };
    for e in 0..g.num_edges() {
        for k in 0..4 {
            let x = 4 * e + k;
            b.piece.push(Piece::G { edge: e, piece: 0 });
            // flags 4e, 4e+1 are at the tail
            b.at_start.push(k < 2);
            b.side.push(0);
            b.node_hint.push(Some(NodeKind::Vertex(g.dart_origin(x / 2))));
        }
        b.side[4 * e] = 0;
        b.side[4 * e + 1] = 1;
        let a0 = b.map.a0(4 * e);
        let a1 = b.map.a0(4 * e + 1);
        b.side[a0] = 0;
        b.side[a1] = 1;
    }
    // stops on each edge, sorted from the tail
    let mut stops: Vec<Vec<(u32, usize, usize)>> = vec![Vec::new(); g.num_edges()];
    for (ci, c) in curves.iter().enumerate() {
        for (k, x) in c.crossings.iter().enumerate() {
            stops[x.edge].push((x.index, ci, k));
        }
    }
    // corner flag on side s of the node of crossing (curve, k)
    let mut node_corner: HashMap<(usize, usize), [Flag; 2]> = HashMap::new();
    for e in 0..g.num_edges() {
        let st = &mut stops[e];
        st.sort_unstable();
        if st.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Curve(format!("two crossings share index on edge {e}")));
        }
        let far = [b.map.a0(4 * e), b.map.a0(4 * e + 1)];
        let mut cur = 4 * e;
        for (j, &(index, ci, k)) in st.iter().enumerate() {
            let f = b.map.subdivide_edge(cur);
            let [m, mm, n, nn] = f;
            b.grow(Piece::G { edge: e, piece: j }, false, 0);
            b.piece[m] = Piece::G { edge: e, piece: j };
            b.piece[mm] = Piece::G { edge: e, piece: j };
            b.at_start[m] = false;
            b.at_start[mm] = false;
            b.side[m] = 0;
            b.side[mm] = 1;
            b.piece[n] = Piece::G { edge: e, piece: j + 1 };
            b.piece[nn] = Piece::G { edge: e, piece: j + 1 };
            b.at_start[n] = true;
            b.at_start[nn] = true;
            b.side[n] = 0;
            b.side[nn] = 1;
            for x in f {
                b.node_hint[x] = Some(NodeKind::Crossing { edge: e, index });
            }
            node_corner.insert((ci, k), [m, mm]);
            cur = n;
        }
        let last = st.len();
        for x in far {
            b.piece[x] = Piece::G { edge: e, piece: last };
        }
    }
    let mut curve_pieces = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        let l = c.crossings.len();
        curve_pieces.push(l + 1);
        for idx in 0..=l {
            let a = if idx == 0 {
                Attach::Anchor(c.start)
            } else {
                let x = c.crossings[idx - 1];
                Attach::Fixed(node_corner[&(ci, idx - 1)][x.exit_side()])
            };
            let z = if idx == l {
                Attach::Anchor(c.end)
            } else {
                let x = c.crossings[idx];
                Attach::Fixed(node_corner[&(ci, idx)][x.entry_side()])
            };
            b.insert(ci, idx, a, z)?;
        }
    }
    let faces_o = faces_of_gmap(&b.map)?;
    if faces_o.euler_genus != faces.euler_genus {
        return Err(Error::Curve("overlay changed the surface; curves must cross".into()));
    }
    let (node_of_flag, nn) = b.map.orbit_labels(1, 2);
    let mut nodes = vec![None; nn];
    for x in 0..b.map.len() {
        if let Some(k) = b.node_hint[x] {
            nodes[node_of_flag[x]] = Some(k);
        }
    }
    let nodes: Vec<NodeKind> = nodes.into_iter().map(|k| k.expect("every node has a kind")).collect();
    let mut base_face = vec![usize::MAX; faces_o.num_faces()];
    for x in 0..ng {
        base_face[faces_o.face_of_flag[x]] = faces.face_of_flag[x];
    }
    // faces touching no original flag inherit through curve pieces
    // faces touching no original flag still have a G piece on their boundary
    for (f, walk) in faces_o.walks.iter().enumerate() {
        if base_face[f] != usize::MAX {
            continue;
        }
        for &x in walk.iter().flat_map(|&x| [x, b.map.a0(x)]).collect::<Vec<_>>().iter() {
            if let Piece::G { edge, .. } = b.piece[x] {
                base_face[f] = faces.face_of_flag[4 * edge + b.side[x] as usize];
                break;
            }
        }
    }
    if base_face.iter().any(|&f| f == usize::MAX) {
        return Err(Error::Internal("overlay face without a face of G".into()));
    }
    Ok(Overlay {
        gmap: b.map,
        piece: b.piece,
        at_start: b.at_start,
        side: b.side,
        faces: faces_o,
        node_of_flag,
        nodes,
        num_curves: curves.len(),
        curve_pieces,
        base_face,
    })
}
