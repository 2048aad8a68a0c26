//! Half-layers, quad-layers, their near and 2-near variants, danger and
//! coverage flags, and the direction-selection rules built on them.

use crate::cube::{flip, parity, side, Dimension, Edge, SplitClass, Vertex};
use crate::error::{Error, Result};
use crate::matching::Matching;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Half,
    NearHalf,
    TwoNearHalf,
    Quad,
    NearQuad,
}

pub const ALL_KINDS: [LayerKind; 5] = [
    LayerKind::Half,
    LayerKind::NearHalf,
    LayerKind::TwoNearHalf,
    LayerKind::Quad,
    LayerKind::NearQuad,
];

/// A (near/2-near) half-layer or (near) quad-layer found inside a matching.
///
/// The underlying full layer is determined by `direction`, `parity_class`
/// (parity of the `Q^i_0` end vertices) and, for quad kinds, the hosting
/// subcube `Q^j_b` recorded in `side`. The pattern itself is the full layer
/// minus `missing_edges`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LayerPattern {
    pub kind: LayerKind,
    pub direction: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<(u8, u8)>,
    pub parity_class: u8,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub missing_edges: Vec<(Vertex, Vertex)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub extension_vertices: Vec<Vertex>,
}

impl LayerPattern {
    /// End vertices `u` of the underlying full layer with `side(u, i) = 0`.
    fn base_vertices(&self, d: Dimension) -> Vec<Vertex> {
        let i = self.direction;
        d.vertices()
            .filter(|&u| {
                side(u, i) == 0
                    && parity(u) == self.parity_class
                    && self.side.map_or(true, |(j, b)| side(u, j) == b)
            })
            .collect()
    }

    /// Edges of the underlying full layer (pattern plus missing edges).
    pub fn full_edges(&self, d: Dimension) -> Vec<Edge> {
        self.base_vertices(d)
            .into_iter()
            .map(|u| Edge::new(u, flip(u, self.direction)).unwrap())
            .collect()
    }

    /// Edges of the pattern itself, all contained in the matching.
    pub fn edges(&self, d: Dimension) -> Vec<Edge> {
        let missing: Vec<Edge> =
            self.missing_edges.iter().map(|&(u, v)| Edge::new(u, v).unwrap()).collect();
        self.full_edges(d).into_iter().filter(|e| !missing.contains(e)).collect()
    }

    /// A pattern is `x`-dangerous if `x` is incident with no edge of the
    /// underlying full layer; quad patterns additionally require `x` inside
    /// the hosting subcube.
    pub fn is_dangerous_for(&self, x: Vertex) -> bool {
        if let Some((j, b)) = self.side {
            if side(x, j) != b {
                return false;
            }
        }
        let base = if side(x, self.direction) == 0 { x } else { flip(x, self.direction) };
        let in_layer = parity(base) == self.parity_class
            && self.side.map_or(true, |(j, b)| side(base, j) == b);
        !in_layer
    }

    /// A near pattern inside `M` is covered if both extension vertices are
    /// covered by two distinct edges of `M`.
    pub fn is_covered_in(&self, m: &Matching) -> bool {
        match self.kind {
            LayerKind::NearHalf | LayerKind::NearQuad => {
                let (u, v) = (self.extension_vertices[0], self.extension_vertices[1]);
                m.is_covered(u) && m.is_covered(v) && m.partner(u) != Some(v)
            }
            _ => false,
        }
    }
}

/// Patterns of the requested kinds that are `x`-dangerous, with coverage
/// flags computed against the full matching.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DangerReport {
    pub x: Vertex,
    pub patterns: Vec<LayerPattern>,
    pub covered_flags: Vec<bool>,
}

/// Enumerate all patterns of the requested kinds contained in `M`.
pub fn find_layers(m: &Matching, kinds: &[LayerKind]) -> Vec<LayerPattern> {
    let d = m.dimension();
    let mut out = Vec::new();
    let want_half = kinds.iter().any(|k| {
        matches!(k, LayerKind::Half | LayerKind::NearHalf | LayerKind::TwoNearHalf)
    });
    let want_quad = kinds.iter().any(|k| matches!(k, LayerKind::Quad | LayerKind::NearQuad));

    if want_half && d.get() >= 2 {
        for i in d.directions() {
            for p in 0..2u8 {
                if let Some(pat) = scan_class(m, i, None, p, 2) {
                    if kinds.contains(&pat.kind) {
                        out.push(pat);
                    }
                }
            }
        }
    }
    if want_quad && d.get() >= 3 {
        for i in d.directions() {
            for j in d.directions().filter(|&j| j != i) {
                for b in 0..2u8 {
                    for p in 0..2u8 {
                        if let Some(pat) = scan_class_quad(m, i, (j, b), p) {
                            if kinds.contains(&pat.kind) {
                                out.push(pat);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Deficit scan of one (direction, subcube, parity) class of cube edges.
/// `max_deficit` 2 for half-layer kinds, 1 for quad kinds.
fn scan_class(
    m: &Matching,
    i: u8,
    sub: Option<(u8, u8)>,
    p: u8,
    max_deficit: usize,
) -> Option<LayerPattern> {
    let d = m.dimension();
    let mut missing = Vec::new();
    for u in d.vertices() {
        if side(u, i) != 0 || parity(u) != p {
            continue;
        }
        if let Some((j, b)) = sub {
            if side(u, j) != b {
                continue;
            }
        }
        let v = flip(u, i);
        if !m.has_edge(u, v) {
            missing.push((u, v));
            if missing.len() > max_deficit {
                return None;
            }
        }
    }
    let kind = match (missing.len(), sub.is_some()) {
        (0, false) => LayerKind::Half,
        (1, false) => LayerKind::NearHalf,
        (2, false) => LayerKind::TwoNearHalf,
        (0, true) => LayerKind::Quad,
        (1, true) => LayerKind::NearQuad,
        _ => return None,
    };
    let extension_vertices = missing.iter().flat_map(|&(u, v)| [u, v]).collect();
    Some(LayerPattern {
        kind,
        direction: i,
        side: sub,
        parity_class: p,
        missing_edges: missing,
        extension_vertices,
    })
}

fn scan_class_quad(m: &Matching, i: u8, sub: (u8, u8), p: u8) -> Option<LayerPattern> {
    scan_class(m, i, Some(sub), p, 1)
}

/// Restrict a report to patterns that are `x`-dangerous.
pub fn danger_report(m: &Matching, x: Vertex, kinds: &[LayerKind]) -> DangerReport {
    let patterns: Vec<LayerPattern> = find_layers(m, kinds)
        .into_iter()
        .filter(|pat| pat.is_dangerous_for(x))
        .collect();
    let covered_flags = patterns.iter().map(|pat| pat.is_covered_in(m)).collect();
    DangerReport { x, patterns, covered_flags }
}

/// Structure of the union of two full half-layers in different directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionReport {
    pub shared_vertices: usize,
    pub all_two_paths: bool,
}

/// Confirms that two half-layers in different directions intersect in a
/// collection of 2-paths sharing `2^{d-2}` vertices.
pub fn check_union_structure(
    d: Dimension,
    l1: &LayerPattern,
    l2: &LayerPattern,
) -> Result<UnionReport> {
    if l1.kind != LayerKind::Half || l2.kind != LayerKind::Half {
        return Err(Error::precondition("both patterns must be full half-layers"));
    }
    if l1.direction == l2.direction {
        return Err(Error::precondition("half-layers must be in different directions"));
    }
    let e1 = l1.full_edges(d);
    let e2 = l2.full_edges(d);
    let meets = |a: &Edge, es: &[Edge]| {
        let (u, v) = a.endpoints();
        es.iter()
            .filter(|b| {
                let (x, y) = b.endpoints();
                u == x || u == y || v == x || v == y
            })
            .count()
    };
    let all_two_paths = e1.iter().all(|a| meets(a, &e2) == 1)
        && e2.iter().all(|b| meets(b, &e1) == 1);
    let vset = |es: &[Edge]| -> std::collections::HashSet<Vertex> {
        es.iter()
            .flat_map(|e| {
                let (u, v) = e.endpoints();
                [u, v]
            })
            .collect()
    };
    let shared = vset(&e1).intersection(&vset(&e2)).count();
    Ok(UnionReport { shared_vertices: shared, all_two_paths })
}

/// Number of vertices avoided by the union of the given full half-layers.
pub fn layers_avoided_count(d: Dimension, layers: &[&LayerPattern]) -> Result<usize> {
    for l in layers {
        if l.kind != LayerKind::Half {
            return Err(Error::precondition("full half-layers only"));
        }
    }
    let mut covered = vec![false; d.vertex_count()];
    for l in layers {
        for e in l.full_edges(d) {
            let (u, v) = e.endpoints();
            covered[u as usize] = true;
            covered[v as usize] = true;
        }
    }
    Ok(covered.iter().filter(|&&c| !c).count())
}

/// Directions hosting each pattern kind; a lemma checker, not assumed.
pub fn count_layer_directions(m: &Matching) -> Vec<(LayerKind, Vec<u8>)> {
    let patterns = find_layers(m, &ALL_KINDS);
    ALL_KINDS
        .iter()
        .map(|&k| {
            let mut dirs: Vec<u8> = patterns
                .iter()
                .filter(|p| p.kind == k)
                .map(|p| p.direction)
                .collect();
            dirs.sort_unstable();
            dirs.dedup();
            (k, dirs)
        })
        .collect()
}

/// Direction maximizing `|M^i_-|` over a maximal matching, smallest index
/// on ties. The returned cut is at least 3 for `d = 5` and at least 4 for
/// `d >= 6`.
pub fn choose_direction_maximal_cut(m: &Matching) -> Result<u8> {
    let d = m.dimension();
    if d.get() < 5 {
        return Err(Error::precondition("maximal-cut direction rule needs d >= 5"));
    }
    if !m.is_maximal() {
        return Err(Error::precondition("matching must be maximal"));
    }
    let edges = m.edges();
    let (mut best_i, mut best_cut) = (1u8, usize::MIN);
    for i in d.directions() {
        let cut = edges.iter().filter(|e| e.split_class(i) == SplitClass::Crossing).count();
        if cut > best_cut {
            best_i = i;
            best_cut = cut;
        }
    }
    let bound = if d.get() == 5 { 3 } else { 4 };
    assert!(
        best_cut >= bound,
        "maximal matching with max cut {best_cut} < {bound} at d={d}: lemma contradiction"
    );
    Ok(best_i)
}

/// For `d = 5` and a matching containing a `z`-dangerous (near) quad-layer
/// with `z = 0`: follow dangerous half-layers of successive `Q^i_0` sides
/// until a direction `i` with `|M^i_-| >= 3` and no (near) half-layers in
/// `M^i_0` is reached.
pub fn choose_direction_q5_quad(m: &Matching) -> Result<u8> {
    let d = m.dimension();
    if d.get() != 5 {
        return Err(Error::precondition("quad-cut direction rule is for d = 5"));
    }
    let z: Vertex = 0;
    let start = danger_report(m, z, &[LayerKind::Quad, LayerKind::NearQuad]);
    let mut i = match start.patterns.first() {
        Some(p) => p.direction,
        None => {
            return Err(Error::precondition("no z-dangerous (near) quad-layer present"))
        }
    };
    // z = 0 projects to 0 in every Q^i_0; directions of the subcube map back
    // by skipping bit i. The process revisits at most d directions.
    for _ in 0..d.get() {
        let m0 = m.restrict(i, 0);
        let report = danger_report(&m0, 0, &[LayerKind::Half, LayerKind::NearHalf]);
        match report.patterns.first() {
            None => break,
            Some(p) => {
                let j = p.direction;
                i = if j < i { j } else { j + 1 };
            }
        }
    }
    let m0 = m.restrict(i, 0);
    assert!(
        find_layers(&m0, &[LayerKind::Half, LayerKind::NearHalf]).is_empty(),
        "Q^{i}_0 still hosts a (near) half-layer: lemma contradiction"
    );
    assert!(m.cut(i) >= 3, "returned direction {i} has cut < 3: lemma contradiction");
    Ok(i)
}

/// The full half-layer of direction `i` whose `Q^i_0` end vertices have
/// parity `p`, as an edge list.
pub fn half_layer_edges(d: Dimension, i: u8, p: u8) -> Vec<Edge> {
    d.vertices()
        .filter(|&u| side(u, i) == 0 && parity(u) == p)
        .map(|u| Edge::new(u, flip(u, i)).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u8) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn from_edges(n: u8, edges: &[Edge]) -> Matching {
        Matching::from_edges(d(n), edges).unwrap()
    }

    #[test]
    fn full_half_layer_detected() {
        let m = from_edges(4, &half_layer_edges(d(4), 1, 0));
        let found = find_layers(&m, &[LayerKind::Half]);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].direction, 1);
        assert_eq!(found[0].parity_class, 0);
        assert_eq!(found[0].edges(d(4)).len(), 4);
        assert!(find_layers(&m, &[LayerKind::NearHalf]).is_empty());
    }

    #[test]
    fn near_half_layer_detected() {
        let mut edges = half_layer_edges(d(4), 1, 0);
        let removed = edges.pop().unwrap();
        let m = from_edges(4, &edges);
        let found = find_layers(&m, &[LayerKind::NearHalf]);
        assert_eq!(found.len(), 1);
        let pat = &found[0];
        assert_eq!(pat.kind, LayerKind::NearHalf);
        assert_eq!(pat.direction, 1);
        assert_eq!(pat.extension_vertices.len(), 2);
        let (u, v) = removed.endpoints();
        assert!(pat.extension_vertices.contains(&u) && pat.extension_vertices.contains(&v));
        assert!(find_layers(&m, &[LayerKind::Half]).is_empty());
    }

    #[test]
    fn empty_matching_has_no_patterns() {
        let m = Matching::new(d(4));
        assert!(find_layers(&m, &ALL_KINDS).is_empty());
    }

    #[test]
    fn quad_layer_detected_with_side() {
        // Half-layer of Q^2_1 inside Q_4, direction 1.
        let dd = d(4);
        let edges: Vec<Edge> = dd
            .vertices()
            .filter(|&u| side(u, 1) == 0 && side(u, 2) == 1 && parity(u) == 1)
            .map(|u| Edge::new(u, flip(u, 1)).unwrap())
            .collect();
        assert_eq!(edges.len(), 2);
        let m = from_edges(4, &edges);
        let quads = find_layers(&m, &[LayerKind::Quad]);
        assert_eq!(quads.len(), 1);
        assert_eq!(quads[0].direction, 1);
        assert_eq!(quads[0].side, Some((2, 1)));
        // z = 0 lies in Q^2_0, so the quad-layer is not 0-dangerous.
        assert!(!quads[0].is_dangerous_for(0));
        // A vertex in Q^2_1 off the layer is endangered.
        let x = dd
            .vertices()
            .find(|&x| side(x, 2) == 1 && quads[0].is_dangerous_for(x))
            .unwrap();
        assert!(!quads[0].full_edges(dd).iter().any(|e| e.other(x).is_some()));
    }

    #[test]
    fn covered_near_half_layer_flag() {
        let mut edges = half_layer_edges(d(4), 1, 0);
        let removed = edges.pop().unwrap();
        let (u, v) = removed.endpoints();
        // Cover both extension vertices by distinct long edges.
        let mut m = from_edges(4, &edges);
        let free: Vec<Vertex> = d(4)
            .vertices()
            .filter(|&w| !m.is_covered(w) && w != u && w != v)
            .collect();
        m.add_edge(Edge::new(u, free[0]).unwrap()).unwrap();
        m.add_edge(Edge::new(v, free[1]).unwrap()).unwrap();
        let found = find_layers(&m, &[LayerKind::NearHalf]);
        assert_eq!(found.len(), 1);
        assert!(found[0].is_covered_in(&m));
    }

    #[test]
    fn union_structure_counts() {
        let dd = d(4);
        let half = |i: u8| LayerPattern {
            kind: LayerKind::Half,
            direction: i,
            side: None,
            parity_class: 0,
            missing_edges: vec![],
            extension_vertices: vec![],
        };
        let halves = [half(1), half(2)];
        let rep = check_union_structure(dd, &halves[0], &halves[1]).unwrap();
        assert!(rep.all_two_paths);
        assert_eq!(rep.shared_vertices, 4);
        assert!(check_union_structure(dd, &halves[0], &halves[0]).is_err());
    }

    #[test]
    fn avoided_count_matches_power() {
        for n in 4..=6u8 {
            let dd = d(n);
            for k in 1..=3usize {
                let pats: Vec<LayerPattern> = (1..=k as u8)
                    .map(|i| LayerPattern {
                        kind: LayerKind::Half,
                        direction: i,
                        side: None,
                        parity_class: 0,
                        missing_edges: vec![],
                        extension_vertices: vec![],
                    })
                    .collect();
                let refs: Vec<&LayerPattern> = pats.iter().collect();
                assert_eq!(layers_avoided_count(dd, &refs).unwrap(), 1usize << (n as usize - k));
            }
        }
    }

    #[test]
    fn q3_hosts_two_half_layer_directions() {
        // Lemma bound tight: at d=3 a matching can host (near) half-layers
        // in two directions. Exhaustive-ish search over small matchings.
        let dd = d(3);
        let all_cube_edges: Vec<Edge> = dd
            .vertices()
            .flat_map(|u| {
                dd.directions()
                    .filter(move |&i| side(u, i) == 0)
                    .map(move |i| Edge::new(u, flip(u, i)).unwrap())
            })
            .collect();
        let mut witness = false;
        // Pick any 4 disjoint cube edges and check half-layer directions.
        let n = all_cube_edges.len();
        'outer: for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for e in c + 1..n {
                        let picked = [
                            all_cube_edges[a],
                            all_cube_edges[b],
                            all_cube_edges[c],
                            all_cube_edges[e],
                        ];
                        let Ok(m) = Matching::from_edges(dd, &picked) else { continue };
                        let dirs: std::collections::HashSet<u8> =
                            find_layers(&m, &[LayerKind::Half, LayerKind::NearHalf])
                                .iter()
                                .map(|p| p.direction)
                                .collect();
                        if dirs.len() >= 2 {
                            witness = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert!(witness);
    }
}
