//! The partner-table representation of matchings of `K(Q_d)` and of partial
//! cycle extensions: an array of length `2^d` with one slot per vertex.

use crate::cube::{flip, parity, project, side, Dimension, Edge, SplitClass, Vertex};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub(crate) const FORBIDDEN: u32 = u32::MAX;
pub(crate) const UNCOVERED: u32 = u32::MAX - 1;
pub(crate) const TERMINAL: u32 = u32::MAX - 2;
pub(crate) const MATCH: u32 = u32::MAX - 3;

/// Value of one partner-table slot.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Slot {
    /// Matched to `v`; symmetric: `slot[v] = Partner(u)`.
    Partner(Vertex),
    /// Avoided by the matching, must be avoided by any extension.
    Forbidden,
    /// Avoided by the matching, may appear in an extension.
    Uncovered,
    /// Must be a terminal vertex of a linear forest.
    Terminal,
    /// Marked for matching generation.
    Match,
}

impl Slot {
    #[inline]
    pub(crate) fn encode(self) -> u32 {
        match self {
            Slot::Partner(v) => v,
            Slot::Forbidden => FORBIDDEN,
            Slot::Uncovered => UNCOVERED,
            Slot::Terminal => TERMINAL,
            Slot::Match => MATCH,
        }
    }

    #[inline]
    pub(crate) fn decode(raw: u32) -> Slot {
        match raw {
            FORBIDDEN => Slot::Forbidden,
            UNCOVERED => Slot::Uncovered,
            TERMINAL => Slot::Terminal,
            MATCH => Slot::Match,
            v => Slot::Partner(v),
        }
    }
}

/// A matching of `K(Q_d)` (or a compacted partial extension) as a partner
/// table with incrementally maintained edge and terminal counters.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matching {
    d: Dimension,
    slots: Vec<u32>,
    edge_count: usize,
    terminal_count: usize,
}

impl Matching {
    pub fn new(d: Dimension) -> Self {
        Matching {
            d,
            slots: vec![UNCOVERED; d.vertex_count()],
            edge_count: 0,
            terminal_count: 0,
        }
    }

    pub fn from_edges(d: Dimension, edges: &[Edge]) -> Result<Self> {
        let mut m = Matching::new(d);
        for &e in edges {
            m.add_edge(e)?;
        }
        Ok(m)
    }

    #[inline]
    pub fn dimension(&self) -> Dimension {
        self.d
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn terminal_count(&self) -> usize {
        self.terminal_count
    }

    #[inline]
    pub fn slot(&self, u: Vertex) -> Slot {
        Slot::decode(self.slots[u as usize])
    }

    #[inline]
    pub(crate) fn raw_slots(&self) -> &[u32] {
        &self.slots
    }

    /// `u^M`: partner of a covered vertex.
    #[inline]
    pub fn partner(&self, u: Vertex) -> Option<Vertex> {
        match self.slots[u as usize] {
            v if v < MATCH => Some(v),
            _ => None,
        }
    }

    #[inline]
    pub fn is_covered(&self, u: Vertex) -> bool {
        self.slots[u as usize] < MATCH
    }

    /// Two vertices form an edge of the matching.
    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.slots[u as usize] == v
    }

    pub fn set_label(&mut self, u: Vertex, slot: Slot) -> Result<()> {
        if !self.d.contains_vertex(u) {
            return Err(Error::VertexOutOfRange { vertex: u, d: self.d.get() });
        }
        if self.is_covered(u) {
            return Err(Error::AlreadyCovered(u));
        }
        match slot {
            Slot::Partner(_) => {
                return Err(Error::Malformed("set_label cannot add edges; use add_edge".into()))
            }
            s => {
                if self.slots[u as usize] == TERMINAL {
                    self.terminal_count -= 1;
                }
                self.slots[u as usize] = s.encode();
                if s == Slot::Terminal {
                    self.terminal_count += 1;
                }
            }
        }
        Ok(())
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<()> {
        let (u, v) = e.endpoints();
        if !self.d.contains_vertex(v) {
            return Err(Error::VertexOutOfRange { vertex: v, d: self.d.get() });
        }
        for w in [u, v] {
            match self.slot(w) {
                Slot::Uncovered | Slot::Match => {}
                _ => return Err(Error::AlreadyCovered(w)),
            }
        }
        self.slots[u as usize] = v;
        self.slots[v as usize] = u;
        self.edge_count += 1;
        self.debug_check();
        Ok(())
    }

    pub fn remove_edge(&mut self, e: Edge) -> Result<()> {
        let (u, v) = e.endpoints();
        if self.slots[u as usize] != v {
            return Err(Error::NotMatched(u));
        }
        self.slots[u as usize] = UNCOVERED;
        self.slots[v as usize] = UNCOVERED;
        self.edge_count -= 1;
        self.debug_check();
        Ok(())
    }

    /// All matching edges, smaller endpoint first, ascending.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, &s) in self.slots.iter().enumerate() {
            if s < MATCH && (u as u32) < s {
                out.push(Edge::new(u as Vertex, s).expect("partner table symmetry"));
            }
        }
        out
    }

    pub fn vertices_with(&self, slot: Slot) -> Vec<Vertex> {
        let code = slot.encode();
        match slot {
            Slot::Partner(_) => panic!("use edges() for partner slots"),
            _ => self
                .slots
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s == code)
                .map(|(u, _)| u as Vertex)
                .collect(),
        }
    }

    pub fn uncovered_vertices(&self) -> Vec<Vertex> {
        self.vertices_with(Slot::Uncovered)
    }

    /// True when every edge of `M` is an edge of `Q_d`.
    pub fn is_subgraph_of_qd(&self) -> bool {
        self.edges().iter().all(|e| e.is_cube_edge())
    }

    /// Maximal in the sense of the cut lemmas: covers at least one end
    /// vertex of every edge of `Q_d` (vertices with non-Uncovered labels,
    /// e.g. a forbidden `z`, count as unavailable rather than uncovered).
    pub fn is_maximal(&self) -> bool {
        for u in self.d.vertices() {
            if self.slot(u) != Slot::Uncovered {
                continue;
            }
            for i in self.d.directions() {
                if self.slot(flip(u, i)) == Slot::Uncovered {
                    return false;
                }
            }
        }
        true
    }

    /// `|M^i_-|`: number of matching edges crossing direction `i`.
    pub fn cut(&self, i: u8) -> usize {
        self.edges().iter().filter(|e| e.split_class(i) == SplitClass::Crossing).count()
    }

    /// Image of the matching under the translation `x -> x XOR t`
    /// (a `Q_d`-automorphism); labels are carried along.
    pub fn translate(&self, t: Vertex) -> Matching {
        let mut slots = vec![UNCOVERED; self.slots.len()];
        for (u, &s) in self.slots.iter().enumerate() {
            slots[(u as u32 ^ t) as usize] = if s < MATCH { s ^ t } else { s };
        }
        Matching {
            d: self.d,
            slots,
            edge_count: self.edge_count,
            terminal_count: self.terminal_count,
        }
    }

    /// Image under a permutation of directions; `perm[k]` is the zero-based
    /// image of zero-based direction `k`.
    pub fn permute_directions(&self, perm: &[u8]) -> Matching {
        debug_assert_eq!(perm.len(), self.d.get() as usize);
        let map = |u: u32| -> u32 {
            let mut out = 0u32;
            for (k, &p) in perm.iter().enumerate() {
                out |= ((u >> k) & 1) << p;
            }
            out
        };
        let mut slots = vec![UNCOVERED; self.slots.len()];
        for (u, &s) in self.slots.iter().enumerate() {
            slots[map(u as u32) as usize] = if s < MATCH { map(s) } else { s };
        }
        Matching {
            d: self.d,
            slots,
            edge_count: self.edge_count,
            terminal_count: self.terminal_count,
        }
    }

    /// Restriction of `M^i_b` to the subcube `Q^i_b`, re-indexed as `Q_{d-1}`.
    /// Crossing edges are dropped; their endpoints become Uncovered. Labels
    /// of vertices on side `b` are kept.
    pub fn restrict(&self, i: u8, b: u8) -> Matching {
        let sub = self.d.shrink().expect("restrict needs d >= 2");
        let mut m = Matching::new(sub);
        for u in self.d.vertices() {
            if side(u, i) != b {
                continue;
            }
            let pu = project(u, i);
            match self.slot(u) {
                Slot::Partner(v) => {
                    if side(v, i) == b && v > u {
                        m.add_edge(Edge::new(pu, project(v, i)).unwrap()).unwrap();
                    }
                }
                Slot::Uncovered => {}
                s => m.set_label(pu, s).unwrap(),
            }
        }
        m
    }

    /// Recount the counters from scratch; used by tests and debug checks.
    pub fn recount(&self) -> (usize, usize) {
        let mut edges = 0;
        let mut terminals = 0;
        for (u, &s) in self.slots.iter().enumerate() {
            if s < MATCH {
                debug_assert_ne!(s as usize, u, "self-partner at {u}");
                if (u as u32) < s {
                    edges += 1;
                }
            } else if s == TERMINAL {
                terminals += 1;
            }
        }
        (edges, terminals)
    }

    #[inline]
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        {
            for (u, &s) in self.slots.iter().enumerate() {
                if s < MATCH {
                    assert_eq!(
                        self.slots[s as usize], u as u32,
                        "partner symmetry broken at {u}"
                    );
                }
            }
            let (e, t) = self.recount();
            assert_eq!((e, t), (self.edge_count, self.terminal_count));
        }
    }

}

/// Wire format of matchings: `{"d": .., "edges": [[u,v],..], "forbidden":
/// [..], "terminals": [..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchingJson {
    pub d: u8,
    pub edges: Vec<(Vertex, Vertex)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forbidden: Vec<Vertex>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terminals: Vec<Vertex>,
}

impl MatchingJson {
    pub fn to_matching(&self) -> Result<Matching> {
        let d = Dimension::new(self.d)?;
        let mut m = Matching::new(d);
        for &(u, v) in &self.edges {
            m.add_edge(Edge::new(u, v)?)?;
        }
        for &u in &self.forbidden {
            m.set_label(u, Slot::Forbidden)?;
        }
        for &u in &self.terminals {
            m.set_label(u, Slot::Terminal)?;
        }
        Ok(m)
    }

    pub fn from_matching(m: &Matching) -> Self {
        MatchingJson {
            d: m.dimension().get(),
            edges: m.edges().iter().map(|e| e.endpoints()).collect(),
            forbidden: m.vertices_with(Slot::Forbidden),
            terminals: m.vertices_with(Slot::Terminal),
        }
    }
}

/// Wire format of cycles: `{"d": .., "cycle": [v0,..,vk-1]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycleJson {
    pub d: u8,
    pub cycle: Vec<Vertex>,
}

/// Parity of a vertex as used throughout: even iff `|u|` is even.
pub fn vertex_parity(u: Vertex) -> u8 {
    parity(u)
}
