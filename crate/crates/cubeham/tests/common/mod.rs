//! Shared test helpers: a deliberately naive cycle-extension search used to
//! cross-check the oracle. It shares no code with the oracle's search core
//! (no compaction, no forest representation): plain path DFS over the cube
//! plus matching edges, with the single observation that a cycle through a
//! matched vertex must use its matching edge there.

use cubeham::matching::{Matching, Slot};
use cubeham::Vertex;

pub fn naive_extends(m: &Matching) -> bool {
    let d = m.dimension();
    let n = 1usize << d.get();
    let forbidden: Vec<bool> = (0..n as u32).map(|v| m.slot(v) == Slot::Forbidden).collect();
    let total_m = m.edge_count();

    let neighbors = |v: Vertex| -> Vec<Vertex> {
        (1..=d.get()).map(move |i| v ^ (1u32 << (i - 1))).collect()
    };

    // A cycle containing every matching edge; non-matching cycle edges must
    // be cube edges; forbidden vertices must not appear. Start vertices:
    // any matched vertex works when the matching is nonempty (the cycle
    // passes through all of them); otherwise any free vertex.
    let starts: Vec<Vertex> = if total_m > 0 {
        vec![m.edges()[0].endpoints().0]
    } else {
        (0..n as u32).filter(|&v| !forbidden[v as usize]).collect()
    };

    for s in starts {
        if forbidden[s as usize] {
            continue;
        }
        let mut visited = vec![false; n];
        visited[s as usize] = true;
        // If s is matched, fix its matching edge as the first cycle edge;
        // the closing edge back into s is then necessarily a cube edge.
        let (first, used0) = match m.partner(s) {
            Some(p) => (p, 1usize),
            None => (s, 0),
        };
        if first != s {
            if forbidden[first as usize] {
                continue;
            }
            visited[first as usize] = true;
            if dfs(m, &neighbors, &forbidden, &mut visited, s, first, 2, used0, total_m) {
                return true;
            }
            visited[first as usize] = false;
        } else {
            for w in neighbors(s) {
                if forbidden[w as usize] {
                    continue;
                }
                visited[w as usize] = true;
                if dfs(m, &neighbors, &forbidden, &mut visited, s, w, 2, 0, total_m) {
                    return true;
                }
                visited[w as usize] = false;
            }
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    m: &Matching,
    neighbors: &dyn Fn(Vertex) -> Vec<Vertex>,
    forbidden: &[bool],
    visited: &mut Vec<bool>,
    s: Vertex,
    c: Vertex,
    len: usize,
    used_m: usize,
    total_m: usize,
) -> bool {
    // Arrived at c; the previous edge is known to be legal. Decide the
    // next steps: forced to the partner unless the matching edge at c was
    // the arrival edge (encoded by the partner already being visited).
    // Forced to the partner when the matching edge at c is still unused;
    // otherwise (partner already on the path, i.e. the arrival edge was the
    // matching edge, or the state is dead and the closure count rejects it)
    // any cube neighbor.
    let step_candidates: Vec<(Vertex, bool)> = match m.partner(c) {
        Some(p) if !visited[p as usize] => vec![(p, true)],
        _ => neighbors(c).into_iter().map(|w| (w, false)).collect(),
    };
    for (w, via_m) in step_candidates {
        let next_used = used_m + usize::from(via_m);
        if w == s {
            // Closing edge. If s is matched, its matching edge was the
            // first cycle edge, so the closure must be a cube edge.
            if via_m && m.partner(s) == Some(c) {
                continue;
            }
            if len >= 3 && next_used == total_m {
                return true;
            }
            continue;
        }
        if forbidden[w as usize] || visited[w as usize] {
            continue;
        }
        visited[w as usize] = true;
        if dfs(m, neighbors, forbidden, visited, s, w, len + 1, next_used, total_m) {
            return true;
        }
        visited[w as usize] = false;
    }
    false
}
