//! Generalized combinatorial maps.
//!
//! A map is stored as three involutions on *flags*: `a0` swaps the two ends of
//! an edge side, `a1` swaps the two half-edges meeting at a corner and `a2`
//! swaps the two sides of a half-edge. Faces are the orbits of `<a0, a1>`,
//! vertices the orbits of `<a1, a2>` and edges the orbits of `<a0, a2>`.
//! Non-orientable surfaces need no special treatment in this encoding.

use crate::error::{Error, Result};

pub type Flag = usize;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GMap {
    a: [Vec<Flag>; 3],
}

impl GMap {
    pub fn from_involutions(a0: Vec<Flag>, a1: Vec<Flag>, a2: Vec<Flag>) -> Result<Self> {
        let n = a0.len();
        if a1.len() != n || a2.len() != n {
            return Err(Error::Structure("involution lengths differ".into()));
        }
        let map = GMap { a: [a0, a1, a2] };
        for i in 0..3 {
            for x in 0..n {
                let y = map.a[i][x];
                if y >= n || map.a[i][y] != x {
                    return Err(Error::Structure(format!("a{i} is not an involution at flag {x}")));
                }
            }
        }
        Ok(map)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.a[0].len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.a[0].is_empty()
    }

    #[inline]
    pub fn alpha(&self, i: usize, x: Flag) -> Flag {
        self.a[i][x]
    }

    #[inline]
    pub fn a0(&self, x: Flag) -> Flag {
        self.a[0][x]
    }

    #[inline]
    pub fn a1(&self, x: Flag) -> Flag {
        self.a[1][x]
    }

    #[inline]
    pub fn a2(&self, x: Flag) -> Flag {
        self.a[2][x]
    }

    pub(crate) fn set(&mut self, i: usize, x: Flag, y: Flag) {
        self.a[i][x] = y;
        self.a[i][y] = x;
    }

    fn push_flags(&mut self, k: usize) -> Flag {
        let base = self.len();
        for i in 0..3 {
            self.a[i].extend(base..base + k);
        }
        base
    }

    /// Labels every flag with the index of its `<ai, aj>` orbit. Orbits are
    /// numbered in order of their smallest flag.
    pub fn orbit_labels(&self, i: usize, j: usize) -> (Vec<usize>, usize) {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for y in [self.a[i][x], self.a[j][x]] {
                    if label[y] == usize::MAX {
                        label[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Walks the `<ai, aj>` orbit of `x`, applying `ai` first. Assumes the
    /// involutions have no fixed points on that orbit.
    pub fn orbit_walk(&self, x: Flag, i: usize, j: usize) -> Vec<Flag> {
        let mut out = vec![x];
        let mut y = x;
        let mut step = i;
        loop {
            y = self.a[step][y];
            step = if step == i { j } else { i };
            if y == x && step == i {
                break;
            }
            out.push(y);
        }
        out
    }

    /// The facial walk through `x` as a list of flags (even positions are
    /// entered by `a1`, odd positions by `a0`).
    pub fn face_walk(&self, x: Flag) -> Vec<Flag> {
        self.orbit_walk(x, 0, 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.orbit_labels(1, 2).1
    }

    pub fn edge_count(&self) -> usize {
        self.orbit_labels(0, 2).1
    }

    pub fn face_count(&self) -> usize {
        self.orbit_labels(0, 1).1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Two-colours the flags so that every involution swaps colours.
    pub fn is_orientable(&self) -> bool {
        let n = self.len();
        let mut colour = vec![u8::MAX; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for i in 0..3 {
                    let y = self.a[i][x];
                    if y == x {
                        continue;
                    }
                    if colour[y] == u8::MAX {
                        colour[y] = 1 - colour[x];
                        stack.push(y);
                    } else if colour[y] == colour[x] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Adds a pendant edge from the corner `{c, a1(c)}` to a new vertex of
    /// degree one. Returns `[p, p', q, q']` where `p, p'` sit at the old
    /// corner (`p` next to `c`) and `q, q'` at the new vertex.
    pub fn add_pendant(&mut self, c: Flag) -> [Flag; 4] {
        let c1 = self.a1(c);
        let base = self.push_flags(4);
        let (p, pp, q, qq) = (base, base + 1, base + 2, base + 3);
        self.set(2, p, pp);
        self.set(2, q, qq);
        self.set(0, p, q);
        self.set(0, pp, qq);
        self.set(1, c, p);
        self.set(1, c1, pp);
        self.set(1, q, qq);
        [p, pp, q, qq]
    }

    /// Inserts a new edge between corners `{a, a1(a)}` and `{b, a1(b)}`,
    /// which must be distinct corners of the same face; the face is split in
    /// two. Returns `[p, p', q, q']` with `p, p'` at corner `a` and `q, q'` at
    /// corner `b`.
    pub fn insert_edge(&mut self, a: Flag, b: Flag) -> Result<[Flag; 4]> {
        let a_in = a;
        let a_out = self.a1(a);
        let b_pair = (b, self.a1(b));
        if b_pair.0 == a_in || b_pair.0 == a_out {
            return Err(Error::Structure("cannot join a corner to itself".into()));
        }
        // Walk the face from a_out, a0 first; the corner flag of b reached by
        // an a0 step is b_in.
        let mut y = a_out;
        let mut b_in = None;
        loop {
            y = self.a0(y);
            if y == b_pair.0 || y == b_pair.1 {
                b_in = Some(y);
                break;
            }
            if y == a_in {
                break;
            }
            y = self.a1(y);
            if y == a_out {
                break;
            }
        }
        let b_in = b_in.ok_or_else(|| Error::Structure("corners are not on a common face".into()))?;
        let b_out = self.a1(b_in);
        let base = self.push_flags(4);
        let (p, pp, q, qq) = (base, base + 1, base + 2, base + 3);
        self.set(2, p, pp);
        self.set(2, q, qq);
        self.set(0, p, q);
        self.set(0, pp, qq);
        self.set(1, a_in, p);
        self.set(1, a_out, pp);
        self.set(1, b_in, qq);
        self.set(1, b_out, q);
        Ok([p, pp, q, qq])
    }

    /// Splits the edge containing `x` by a new vertex of degree two. Returns
    /// `[m, m', n, n']`: `m` is the new `a0`-partner of `x`, `m'` that of
    /// `a2(x)`, `n` that of the old `a0(x)` and `n'` that of the old
    /// `a0(a2(x))`. The corners of the new vertex are `{m, n}` (on the side of
    /// `x`) and `{m', n'}`.
    pub fn subdivide_edge(&mut self, x: Flag) -> [Flag; 4] {
        let x2 = self.a2(x);
        let y = self.a0(x);
        let y2 = self.a0(x2);
        let base = self.push_flags(4);
        let (m, mm, nn, nnn) = (base, base + 1, base + 2, base + 3);
        self.set(0, x, m);
        self.set(0, x2, mm);
        self.set(0, y, nn);
        self.set(0, y2, nnn);
        self.set(2, m, mm);
        self.set(2, nn, nnn);
        self.set(1, m, nn);
        self.set(1, mm, nnn);
        [m, mm, nn, nnn]
    }

    /// Tests for a flag bijection commuting with all three involutions and
    /// preserving the given flag colouring.
    pub fn isomorphic_with<F, G>(&self, other: &GMap, colour_a: F, colour_b: G) -> bool
    where
        F: Fn(Flag) -> u64,
        G: Fn(Flag) -> u64,
    {
        let n = self.len();
        if n != other.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        let (la, ca) = self.orbit_labels(0, 1);
        let (lb, cb) = other.orbit_labels(0, 1);
        let _ = (la, lb);
        if ca != cb || self.vertex_count() != other.vertex_count() {
            return false;
        }
        'targets: for y0 in 0..n {
            let mut phi = vec![usize::MAX; n];
            let mut used = vec![false; n];
            let mut stack = vec![0usize];
            phi[0] = y0;
            used[y0] = true;
            while let Some(x) = stack.pop() {
                let y = phi[x];
                if colour_a(x) != colour_b(y) {
                    continue 'targets;
                }
                for i in 0..3 {
                    let xi = self.a[i][x];
                    let yi = other.a[i][y];
                    if phi[xi] == usize::MAX {
                        if used[yi] {
                            continue 'targets;
                        }
                        phi[xi] = yi;
                        used[yi] = true;
                        stack.push(xi);
                    } else if phi[xi] != yi {
                        continue 'targets;
                    }
                }
            }
            if phi.iter().all(|&v| v != usize::MAX) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single edge, two vertices of degree one: one face on the sphere.
    fn segment() -> GMap {
        GMap::from_involutions(vec![2, 3, 0, 1], vec![1, 0, 3, 2], vec![1, 0, 3, 2]).unwrap()
    }

    #[test]
    fn segment_counts() {
        let g = segment();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.face_count(), 1);
        assert_eq!(g.euler_characteristic(), 2);
        assert!(g.is_orientable());
    }

    #[test]
    fn pendant_and_chord_keep_sphere() {
        let mut g = segment();
        let [_, _, q, _] = g.add_pendant(0);
        assert_eq!(g.euler_characteristic(), 2);
        assert_eq!(g.face_count(), 1);
        // chord from the far end of the first edge to the new leaf closes a cycle
        g.insert_edge(2, q).unwrap();
        assert_eq!(g.face_count(), 2);
        assert_eq!(g.euler_characteristic(), 2);
    }

    #[test]
    fn subdivision_preserves_euler() {
        let mut g = segment();
        g.subdivide_edge(0);
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.face_count(), 1);
    }

    #[test]
    fn rejects_non_involution() {
        assert!(GMap::from_involutions(vec![1, 2, 0], vec![0, 1, 2], vec![0, 1, 2]).is_err());
    }
}
