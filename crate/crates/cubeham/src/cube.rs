//! Vertices, edges and direction splits of the hypercube `Q_d` and of the
//! complete graph `K(Q_d)` on the same vertex set.
//!
//! A vertex is a subset of `{1,..,d}` encoded as a `d`-bit index: element `i`
//! corresponds to bit `i-1`. Directions are numbered `1..=d`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Vertex of `Q_d`, a subset of `[d]` as a bit index (`bits < 2^d`).
pub type Vertex = u32;

/// Largest supported dimension: keeps the `2^d` partner table in memory.
pub const MAX_DIMENSION: u8 = 24;

/// Ambient dimension `d` with `1 <= d <= 24`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dimension(u8);

impl Dimension {
    pub fn new(d: u8) -> Result<Self> {
        if d == 0 || d > MAX_DIMENSION {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    /// `|V(Q_d)| = 2^d`.
    #[inline]
    pub fn vertex_count(self) -> usize {
        1usize << self.0
    }

    #[inline]
    pub fn contains_vertex(self, v: Vertex) -> bool {
        (v as u64) < (1u64 << self.0)
    }

    #[inline]
    pub fn vertices(self) -> impl Iterator<Item = Vertex> {
        0..self.vertex_count() as Vertex
    }

    #[inline]
    pub fn directions(self) -> impl Iterator<Item = u8> {
        1..=self.0
    }

    /// Dimension of the subcubes `Q^i_0`, `Q^i_1`.
    pub fn shrink(self) -> Result<Self> {
        Dimension::new(self.0 - 1)
    }

    pub fn grow(self) -> Result<Self> {
        Dimension::new(self.0 + 1)
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `u^i := u △ {i}`: flip the bit of direction `i`. An involution.
#[inline]
pub fn neighbor(d: Dimension, u: Vertex, i: u8) -> Result<Vertex> {
    if i == 0 || i > d.get() {
        return Err(Error::DirectionOutOfRange { direction: i, d: d.get() });
    }
    Ok(u ^ (1 << (i - 1)))
}

/// Unchecked variant for hot paths; `i` must be in `1..=d`.
#[inline]
pub fn flip(u: Vertex, i: u8) -> Vertex {
    u ^ (1 << (i - 1))
}

/// Parity of `|u|`: `0` even, `1` odd.
#[inline]
pub fn parity(u: Vertex) -> u8 {
    (u.count_ones() & 1) as u8
}

/// Bit of direction `i` in `u` (`0` means `u` lies in `Q^i_0`).
#[inline]
pub fn side(u: Vertex, i: u8) -> u8 {
    ((u >> (i - 1)) & 1) as u8
}

/// Unordered edge of `K(Q_d)`, stored with the smaller endpoint first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Edge {
    u: Vertex,
    v: Vertex,
}

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Result<Self> {
        if a == b {
            return Err(Error::LoopEdge(a));
        }
        Ok(Edge { u: a.min(b), v: a.max(b) })
    }

    #[inline]
    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }

    #[inline]
    pub fn min(self) -> Vertex {
        self.u
    }

    #[inline]
    pub fn max(self) -> Vertex {
        self.v
    }

    /// `ℓ(uv) = |u △ v|`.
    #[inline]
    pub fn length(self) -> u32 {
        (self.u ^ self.v).count_ones()
    }

    /// True for edges of `Q_d` itself (`ℓ = 1`).
    #[inline]
    pub fn is_cube_edge(self) -> bool {
        self.length() == 1
    }

    /// Direction of a cube edge, or `None` for long edges.
    #[inline]
    pub fn direction(self) -> Option<u8> {
        if self.is_cube_edge() {
            Some((self.u ^ self.v).trailing_zeros() as u8 + 1)
        } else {
            None
        }
    }

    #[inline]
    pub fn other(self, w: Vertex) -> Option<Vertex> {
        if w == self.u {
            Some(self.v)
        } else if w == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    /// Which side of direction `i` this edge lives on: `(0, _)` inside `Q^i_0`,
    /// `(1, _)` inside `Q^i_1`, or crossing.
    #[inline]
    pub fn split_class(self, i: u8) -> SplitClass {
        match (side(self.u, i), side(self.v, i)) {
            (0, 0) => SplitClass::Inside0,
            (1, 1) => SplitClass::Inside1,
            _ => SplitClass::Crossing,
        }
    }
}

/// Position of an edge relative to a direction split.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SplitClass {
    /// Both endpoints in `Q^i_0` (`F^i_0`).
    Inside0,
    /// Both endpoints in `Q^i_1` (`F^i_1`).
    Inside1,
    /// One endpoint on each side (`F^i_-`).
    Crossing,
}

/// Partition an edge set into `(F^i_0, F^i_1, F^i_-)` for a direction `i`.
pub fn split(edges: &[Edge], i: u8) -> (Vec<Edge>, Vec<Edge>, Vec<Edge>) {
    let mut f0 = Vec::new();
    let mut f1 = Vec::new();
    let mut fx = Vec::new();
    for &e in edges {
        match e.split_class(i) {
            SplitClass::Inside0 => f0.push(e),
            SplitClass::Inside1 => f1.push(e),
            SplitClass::Crossing => fx.push(e),
        }
    }
    (f0, f1, fx)
}

/// `ℓ(F) = Σ_e ℓ(e)`, checked against the identity `Σ_i |F^i_-|`.
pub fn total_length(d: Dimension, edges: &[Edge]) -> u64 {
    let by_edges: u64 = edges.iter().map(|e| e.length() as u64).sum();
    let by_cuts: u64 = d
        .directions()
        .map(|i| edges.iter().filter(|e| e.split_class(i) == SplitClass::Crossing).count() as u64)
        .sum();
    debug_assert_eq!(by_edges, by_cuts);
    by_edges
}

/// Delete the bit of direction `i`, mapping `Q^i_b` onto `Q_{d-1}`.
#[inline]
pub fn project(u: Vertex, i: u8) -> Vertex {
    let low = u & ((1 << (i - 1)) - 1);
    let high = (u >> i) << (i - 1);
    low | high
}

/// Inverse of [`project`]: re-insert bit `i` with value `bit`.
#[inline]
pub fn inject(u: Vertex, i: u8, bit: u8) -> Vertex {
    let low = u & ((1 << (i - 1)) - 1);
    let high = (u >> (i - 1)) << i;
    low | high | ((bit as Vertex) << (i - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbor_flips_one_bit() {
        let d = Dimension::new(3).unwrap();
        assert_eq!(neighbor(d, 0b101, 2).unwrap(), 0b111);
        assert_eq!(neighbor(d, 0b0000, 1).unwrap(), 0b0001);
        assert!(neighbor(d, 0, 4).is_err());
        assert!(neighbor(d, 0, 0).is_err());
    }

    #[test]
    fn neighbor_is_involution() {
        let d = Dimension::new(5).unwrap();
        for u in d.vertices() {
            for i in d.directions() {
                assert_eq!(neighbor(d, neighbor(d, u, i).unwrap(), i).unwrap(), u);
            }
        }
    }

    #[test]
    fn split_of_layer_and_empty() {
        let d = Dimension::new(3).unwrap();
        // Full direction-1 layer of Q_3.
        let layer: Vec<Edge> = d
            .vertices()
            .filter(|&u| side(u, 1) == 0)
            .map(|u| Edge::new(u, flip(u, 1)).unwrap())
            .collect();
        let (f0, f1, fx) = split(&layer, 1);
        assert!(f0.is_empty() && f1.is_empty());
        assert_eq!(fx.len(), 4);
        let (a, b, c) = split(&[], 2);
        assert!(a.is_empty() && b.is_empty() && c.is_empty());
    }

    #[test]
    fn split_by_bit_inspection() {
        let m = [Edge::new(0b000, 0b011).unwrap(), Edge::new(0b001, 0b101).unwrap()];
        let (f0, f1, fx) = split(&m, 3);
        assert_eq!(f0, vec![Edge::new(0b000, 0b011).unwrap()]);
        assert!(f1.is_empty());
        assert_eq!(fx, vec![Edge::new(0b001, 0b101).unwrap()]);
    }

    #[test]
    fn lengths() {
        let d = Dimension::new(4).unwrap();
        assert_eq!(total_length(d, &[Edge::new(0b0001, 0b0110).unwrap()]), 3);
        assert_eq!(total_length(d, &[Edge::new(0, 0b11).unwrap()]), 2);
        assert_eq!(total_length(d, &[Edge::new(0, 1).unwrap()]), 1);
    }

    #[test]
    fn project_inject_roundtrip() {
        let d = Dimension::new(5).unwrap();
        for u in d.vertices() {
            for i in d.directions() {
                let b = side(u, i);
                assert_eq!(inject(project(u, i), i, b), u);
            }
        }
        assert_eq!(project(0b10110, 3), 0b1010);
        assert_eq!(inject(0b1010, 3, 1), 0b10110);
    }
}
