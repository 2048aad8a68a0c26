//! Constructive matching-building blocks: pairing free vertices without
//! creating (near) half-layers, replacing long edges of maximal matchings,
//! greedy maximalization, and the exact size bounds behind the cut rules.

use crate::cube::{flip, parity, Dimension, Edge, Vertex};
use crate::error::{Error, Result};
use crate::layers::{find_layers, LayerKind};
use crate::matching::Matching;
use num_rational::Ratio;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AvoidMode {
    Half,
    NearHalf,
}

impl AvoidMode {
    fn kinds(self) -> &'static [LayerKind] {
        match self {
            AvoidMode::Half => &[LayerKind::Half],
            AvoidMode::NearHalf => &[LayerKind::NearHalf],
        }
    }
}

fn has_pattern(m: &Matching, mode: AvoidMode) -> bool {
    !find_layers(m, mode.kinds()).is_empty()
}

/// Pair up the free vertices of `A` into a perfect matching `P` on `K(A)`
/// so that `M + P` stays free of the mode's patterns.
///
/// Strategy: while more than four vertices remain, match the two smallest
/// of equal parity (same-parity pairs are long edges, and layers consist of
/// cube edges only). The four-vertex endgame handles the one-even/three-odd
/// case by testing the at most three cube-edge candidates directly.
pub fn avoid_layer_completion(m: &Matching, a: &[Vertex], mode: AvoidMode) -> Result<Vec<Edge>> {
    let d = m.dimension();
    if d.get() < 4 {
        return Err(Error::precondition("layer-avoiding completion needs d >= 4"));
    }
    if a.len() < 4 || a.len() % 2 != 0 {
        return Err(Error::precondition("|A| must be even and at least 4"));
    }
    let mut seen = std::collections::HashSet::new();
    for &v in a {
        if m.is_covered(v) {
            return Err(Error::AlreadyCovered(v));
        }
        if !seen.insert(v) {
            return Err(Error::Malformed(format!("duplicate vertex {v} in A")));
        }
    }
    if has_pattern(m, mode) {
        return Err(Error::precondition("matching already hosts a forbidden pattern"));
    }

    let mut work = m.clone();
    let mut rest: Vec<Vertex> = a.to_vec();
    rest.sort_unstable();
    let mut p = Vec::new();
    let push = |work: &mut Matching, p: &mut Vec<Edge>, u: Vertex, v: Vertex| -> Result<()> {
        let e = Edge::new(u, v)?;
        work.add_edge(e)?;
        p.push(e);
        Ok(())
    };

    while rest.len() >= 6 {
        let (pos_u, pos_v) = first_same_parity_pair(&rest)
            .expect("six or more vertices always contain a same-parity pair");
        let (u, v) = (rest[pos_u], rest[pos_v]);
        rest.remove(pos_v);
        rest.remove(pos_u);
        push(&mut work, &mut p, u, v)?;
    }

    // |rest| == 4 endgame.
    let odd: Vec<Vertex> = rest.iter().copied().filter(|&v| parity(v) == 1).collect();
    let even: Vec<Vertex> = rest.iter().copied().filter(|&v| parity(v) == 0).collect();
    match (even.len(), odd.len()) {
        (4, 0) | (0, 4) => {
            push(&mut work, &mut p, rest[0], rest[1])?;
            push(&mut work, &mut p, rest[2], rest[3])?;
        }
        (2, 2) => {
            push(&mut work, &mut p, even[0], even[1])?;
            push(&mut work, &mut p, odd[0], odd[1])?;
        }
        _ => {
            // One vertex of one parity, three of the other.
            let (lone, trio) = if even.len() == 1 {
                (even[0], odd)
            } else {
                (odd[0], even)
            };
            let non_neighbor = trio.iter().copied().find(|&b| (lone ^ b).count_ones() != 1);
            let pick = match non_neighbor {
                Some(b) => Some(b),
                None => trio.iter().copied().find(|&b| {
                    let mut trial = work.clone();
                    trial.add_edge(Edge::new(lone, b).unwrap()).unwrap();
                    !has_pattern(&trial, mode)
                }),
            };
            let b = pick.expect("some partner for the lone vertex leaves no pattern");
            let others: Vec<Vertex> = trio.into_iter().filter(|&x| x != b).collect();
            push(&mut work, &mut p, lone, b)?;
            push(&mut work, &mut p, others[0], others[1])?;
        }
    }

    assert!(!has_pattern(&work, mode), "completion created a forbidden pattern");
    Ok(p)
}

fn first_same_parity_pair(sorted: &[Vertex]) -> Option<(usize, usize)> {
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if parity(sorted[i]) == parity(sorted[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Replace long edges of a maximal matching until only cube edges remain;
/// total length never increases and maximality is preserved.
pub fn shorten_matching(m: &Matching) -> Result<Matching> {
    if !m.is_maximal() {
        return Err(Error::precondition("matching must be maximal"));
    }
    let d = m.dimension();
    let mut out = m.clone();
    loop {
        let long = out.edges().into_iter().find(|e| e.length() >= 2);
        let Some(e) = long else { break };
        let (u, v) = e.endpoints();
        out.remove_edge(e)?;
        for w in [u, v] {
            let free_neighbor = d
                .directions()
                .map(|i| flip(w, i))
                .find(|&x| !out.is_covered(x) && x != if w == u { v } else { u });
            // Re-cover w if some cube neighbor went uncovered; w itself may
            // stay free, maximality only needs its neighbors covered.
            if let Some(x) = free_neighbor {
                if !out.is_covered(w) {
                    out.add_edge(Edge::new(w, x)?)?;
                }
            }
        }
        debug_assert!(out.is_maximal());
    }
    assert!(out.is_subgraph_of_qd());
    assert!(out.is_maximal());
    Ok(out)
}

/// Greedily add edges until the result is maximal, skipping `forbidden`
/// vertices. Cube edges first, ascending by `(u, direction)`; when
/// `allow_long` is set, same-parity long edges ascending afterwards.
pub fn extend_to_maximal(m: &Matching, forbidden: &[Vertex], allow_long: bool) -> Result<Matching> {
    let d = m.dimension();
    let mut out = m.clone();
    let blocked = |v: Vertex| forbidden.contains(&v);
    for u in d.vertices() {
        if out.is_covered(u) || blocked(u) {
            continue;
        }
        for i in d.directions() {
            let v = flip(u, i);
            if !out.is_covered(u) && !out.is_covered(v) && !blocked(v) {
                out.add_edge(Edge::new(u, v)?)?;
            }
        }
    }
    if allow_long {
        let free: Vec<Vertex> = d
            .vertices()
            .filter(|&v| !out.is_covered(v) && !blocked(v))
            .collect();
        for (k, &u) in free.iter().enumerate() {
            if out.is_covered(u) {
                continue;
            }
            for &v in &free[k + 1..] {
                if !out.is_covered(u) && !out.is_covered(v) && parity(u) == parity(v) {
                    out.add_edge(Edge::new(u, v)?)?;
                }
            }
        }
    }
    Ok(out)
}

/// Exact lower-bound arithmetic for maximal matchings of `Q_d`:
/// `f(d) = d * 2^d / (3d - 1)`. Returns `(f(d), ceil(f(d)), ceil(f(d)/d))`.
pub fn bound_f(d: Dimension) -> (Ratio<u64>, u64, u64) {
    let n = d.get() as u64;
    let f = Ratio::new(n * (1u64 << n), 3 * n - 1);
    (f, f.ceil().to_integer(), (f / Ratio::from_integer(n)).ceil().to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::half_layer_edges;

    fn d(n: u8) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn same_parity_quad_completion() {
        let m = Matching::new(d(4));
        let a = [0b0000, 0b0011, 0b0101, 0b0110];
        let p = avoid_layer_completion(&m, &a, AvoidMode::Half).unwrap();
        assert_eq!(p.len(), 2);
        let done = Matching::from_edges(d(4), &p).unwrap();
        assert!(find_layers(&done, &[LayerKind::Half]).is_empty());
    }

    #[test]
    fn small_a_rejected() {
        let m = Matching::new(d(4));
        assert!(avoid_layer_completion(&m, &[0, 3], AvoidMode::Half).is_err());
        assert!(avoid_layer_completion(&m, &[0, 3, 5], AvoidMode::Half).is_err());
    }

    #[test]
    fn mixed_endgame_avoids_completion() {
        // M is the even direction-2 half-layer minus its edge at 0; A holds
        // the lone even vertex 0 and three odd neighbors of 0. Pairing 0
        // with 2 would complete the half-layer; the endgame must dodge it.
        let dd = d(4);
        let mut layer = half_layer_edges(dd, 2, 0);
        layer.retain(|e| e.endpoints().0 != 0);
        let m = Matching::from_edges(dd, &layer).unwrap();
        let mut bad = m.clone();
        bad.add_edge(Edge::new(0, 2).unwrap()).unwrap();
        assert!(!find_layers(&bad, &[LayerKind::Half]).is_empty());

        let a = [0b0000, 0b0001, 0b0010, 0b0100];
        let p = avoid_layer_completion(&m, &a, AvoidMode::Half).unwrap();
        assert!(!p.contains(&Edge::new(0, 2).unwrap()));
        let mut work = m.clone();
        for e in p {
            work.add_edge(e).unwrap();
        }
        assert!(find_layers(&work, &[LayerKind::Half]).is_empty());
    }

    #[test]
    fn shorten_keeps_cube_matchings() {
        let dd = d(3);
        let m = extend_to_maximal(&Matching::new(dd), &[], false).unwrap();
        assert!(m.is_maximal());
        let s = shorten_matching(&m).unwrap();
        assert_eq!(s, m);
    }

    #[test]
    fn shorten_removes_long_edges() {
        let dd = d(3);
        let seed = Matching::from_edges(dd, &[Edge::new(0, 0b011).unwrap()]).unwrap();
        let m = extend_to_maximal(&seed, &[], true).unwrap();
        assert!(m.is_maximal());
        let before = crate::cube::total_length(dd, &m.edges());
        let s = shorten_matching(&m).unwrap();
        assert!(s.is_subgraph_of_qd());
        assert!(s.is_maximal());
        let after = crate::cube::total_length(dd, &s.edges());
        assert!(after <= before);
        assert_eq!(after, s.edge_count() as u64);
    }

    #[test]
    fn maximalization_bounds() {
        let m5 = extend_to_maximal(&Matching::new(d(5)), &[], false).unwrap();
        assert!(m5.edge_count() >= 12);
        let m6 = extend_to_maximal(&Matching::new(d(6)), &[], true).unwrap();
        assert!(m6.edge_count() >= 16);
        let again = extend_to_maximal(&m5, &[], false).unwrap();
        assert_eq!(again, m5);
    }

    #[test]
    fn parity_class_matching_attains_bound() {
        // Cover every even vertex by pairing evens; 2^{d-2} edges, maximal.
        let dd = d(5);
        let evens: Vec<Vertex> = dd.vertices().filter(|&v| parity(v) == 0).collect();
        let edges: Vec<Edge> = evens
            .chunks_exact(2)
            .map(|c| Edge::new(c[0], c[1]).unwrap())
            .collect();
        let m = Matching::from_edges(dd, &edges).unwrap();
        assert!(m.is_maximal());
        assert_eq!(m.edge_count(), 1 << 3);
    }

    #[test]
    fn exact_bound_values() {
        assert_eq!(bound_f(d(5)).1, 12);
        assert_eq!(bound_f(d(6)).1, 23);
        assert_eq!(bound_f(d(5)).2, 3);
        assert_eq!(bound_f(d(6)).2, 4);
        assert_eq!(bound_f(d(5)).0, Ratio::new(160u64, 14u64));
    }
}
