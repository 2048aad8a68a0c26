//! Cycle and linear-forest certificates: explicit vertex sequences whose
//! validity is re-derived from scratch, independently of the code that
//! produced them.

use crate::cube::{Dimension, Edge, Vertex};
use crate::matching::Matching;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// A cycle `C` claimed to extend the matching: every matching edge lies on
/// `C` and every other edge of `C` is a cube edge.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub d: u8,
    /// `v_0, .., v_{k-1}`; the cycle closes `v_{k-1} -> v_0`.
    pub vertices: Vec<Vertex>,
    /// Edges of the matching the cycle claims to extend.
    pub matching_edges: Vec<(Vertex, Vertex)>,
    /// Vertices the cycle must not visit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub avoided: Vec<Vertex>,
}

/// Vertex-disjoint paths claimed to extend the matching, with prescribed
/// path end vertices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearForestCertificate {
    pub d: u8,
    pub paths: Vec<Vec<Vertex>>,
    /// The required multiset of path end vertices.
    pub terminals: Vec<Vertex>,
    pub matching_edges: Vec<(Vertex, Vertex)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub avoided: Vec<Vertex>,
}

/// First violated certificate clause, with the offending index where one
/// exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadDimension(u8),
    VertexOutOfRange { index: usize, vertex: Vertex },
    TooShort { length: usize },
    NotSimple { index: usize, vertex: Vertex },
    NonCubeEdgeOutsideMatching { index: usize, u: Vertex, v: Vertex },
    MatchingEdgeMissing { u: Vertex, v: Vertex },
    AvoidedVertexPresent { index: usize, vertex: Vertex },
    TerminalMismatch,
    EmptyPath { path: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BadDimension(d) => write!(f, "dimension {d} out of range"),
            Violation::VertexOutOfRange { index, vertex } => {
                write!(f, "vertex {vertex} at position {index} out of range")
            }
            Violation::TooShort { length } => write!(f, "cycle length {length} < 3"),
            Violation::NotSimple { index, vertex } => {
                write!(f, "vertex {vertex} repeated at position {index}")
            }
            Violation::NonCubeEdgeOutsideMatching { index, u, v } => {
                write!(f, "non-cube edge ({u},{v}) outside the matching at position {index}")
            }
            Violation::MatchingEdgeMissing { u, v } => {
                write!(f, "matching edge ({u},{v}) not on the certificate")
            }
            Violation::AvoidedVertexPresent { index, vertex } => {
                write!(f, "avoided vertex {vertex} appears at position {index}")
            }
            Violation::TerminalMismatch => write!(f, "path endpoints differ from terminals"),
            Violation::EmptyPath { path } => write!(f, "path {path} is empty"),
        }
    }
}

fn check_edges_and_matching(
    seq_edges: &[(usize, Vertex, Vertex)],
    matching_edges: &[(Vertex, Vertex)],
) -> Result<(), Violation> {
    let matching: HashSet<Edge> = matching_edges
        .iter()
        .map(|&(u, v)| Edge::new(u, v).expect("matching edge endpoints distinct"))
        .collect();
    let mut seen: HashSet<Edge> = HashSet::new();
    for &(index, u, v) in seq_edges {
        let e = match Edge::new(u, v) {
            Ok(e) => e,
            Err(_) => return Err(Violation::NotSimple { index, vertex: u }),
        };
        if matching.contains(&e) {
            seen.insert(e);
        } else if !e.is_cube_edge() {
            return Err(Violation::NonCubeEdgeOutsideMatching { index, u, v });
        }
    }
    for e in &matching {
        if !seen.contains(e) {
            let (u, v) = e.endpoints();
            return Err(Violation::MatchingEdgeMissing { u, v });
        }
    }
    Ok(())
}

fn check_common(
    d: u8,
    sequences: &[&[Vertex]],
    avoided: &[Vertex],
) -> Result<(), Violation> {
    let dim = Dimension::new(d).map_err(|_| Violation::BadDimension(d))?;
    let avoid: HashSet<Vertex> = avoided.iter().copied().collect();
    let mut used: HashSet<Vertex> = HashSet::new();
    let mut index = 0usize;
    for seq in sequences {
        for &v in *seq {
            if !dim.contains_vertex(v) {
                return Err(Violation::VertexOutOfRange { index, vertex: v });
            }
            if avoid.contains(&v) {
                return Err(Violation::AvoidedVertexPresent { index, vertex: v });
            }
            if !used.insert(v) {
                return Err(Violation::NotSimple { index, vertex: v });
            }
            index += 1;
        }
    }
    Ok(())
}

/// Verify every clause of a cycle certificate by re-derivation.
pub fn check_cycle(c: &CycleCertificate) -> Result<(), Violation> {
    check_common(c.d, &[&c.vertices], &c.avoided)?;
    let k = c.vertices.len();
    if k < 3 {
        return Err(Violation::TooShort { length: k });
    }
    let seq_edges: Vec<(usize, Vertex, Vertex)> = (0..k)
        .map(|j| (j, c.vertices[j], c.vertices[(j + 1) % k]))
        .collect();
    check_edges_and_matching(&seq_edges, &c.matching_edges)
}

/// Verify every clause of a linear-forest certificate by re-derivation.
pub fn check_forest(c: &LinearForestCertificate) -> Result<(), Violation> {
    let refs: Vec<&[Vertex]> = c.paths.iter().map(|p| p.as_slice()).collect();
    check_common(c.d, &refs, &c.avoided)?;
    let mut seq_edges = Vec::new();
    let mut endpoints = Vec::new();
    let mut index = 0usize;
    for (pi, p) in c.paths.iter().enumerate() {
        if p.is_empty() {
            return Err(Violation::EmptyPath { path: pi });
        }
        endpoints.push(*p.first().unwrap());
        endpoints.push(*p.last().unwrap());
        for j in 0..p.len().saturating_sub(1) {
            seq_edges.push((index + j, p[j], p[j + 1]));
        }
        index += p.len();
    }
    let mut want = c.terminals.clone();
    want.sort_unstable();
    endpoints.sort_unstable();
    if want != endpoints {
        return Err(Violation::TerminalMismatch);
    }
    check_edges_and_matching(&seq_edges, &c.matching_edges)
}

impl CycleCertificate {
    pub fn for_matching(m: &Matching, vertices: Vec<Vertex>, avoided: Vec<Vertex>) -> Self {
        CycleCertificate {
            d: m.dimension().get(),
            vertices,
            matching_edges: m.edges().iter().map(|e| e.endpoints()).collect(),
            avoided,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Consecutive pairs of the cycle as canonical edges.
    pub fn cycle_edges(&self) -> Vec<Edge> {
        let k = self.vertices.len();
        (0..k)
            .map(|j| Edge::new(self.vertices[j], self.vertices[(j + 1) % k]).unwrap())
            .collect()
    }

    /// True when the cycle visits every vertex of `Q_d`.
    pub fn is_hamiltonian(&self) -> bool {
        self.vertices.len() == 1usize << self.d
    }
}
