//! Brute-force ground truth: the recursive extendability test over the
//! partner table, exhaustive matching generation (DFS and BFS with
//! isomorphism removal), and canonical forms under direction permutations.

use crate::certificate::{
    check_cycle, check_forest, CycleCertificate, LinearForestCertificate,
};
use crate::cube::{flip, Dimension, Edge, Vertex};
use crate::error::{Error, Result};
use crate::matching::{Matching, Slot, FORBIDDEN, MATCH, TERMINAL, UNCOVERED};
use std::collections::{HashMap, HashSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VertexSelection {
    /// Pick the live end with the fewest non-forbidden cube neighbors.
    MinFreeDegree,
    /// Pick the smallest-index live end; kept for differential testing.
    First,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub want_certificate: bool,
    pub vertex_selection: VertexSelection,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 100_000_000,
            want_certificate: true,
            vertex_selection: VertexSelection::MinFreeDegree,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum ExtensionCertificate {
    Cycle(CycleCertificate),
    Forest(LinearForestCertificate),
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Yes(Option<ExtensionCertificate>),
    No,
    /// The node budget ran out before the search space was exhausted;
    /// deliberately distinct from `No`.
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, SearchOutcome::Yes(_))
    }
}

struct Frame {
    writes: Vec<(Vertex, u32)>,
    edge_count: usize,
    terminal_count: usize,
    added_len: usize,
}

struct Search {
    d: Dimension,
    base_edges: usize,
    slots: Vec<u32>,
    edge_count: usize,
    terminal_count: usize,
    free_deg: Vec<u8>,
    added: Vec<(Vertex, Vertex)>,
    nodes_left: u64,
    selection: VertexSelection,
}

enum Step {
    Found,
    NotFound,
    Exhausted,
}

impl Search {
    fn new(m: &Matching, cfg: &SearchConfig) -> Self {
        let d = m.dimension();
        let slots: Vec<u32> = m.raw_slots().to_vec();
        let mut free_deg = vec![0u8; d.vertex_count()];
        for u in d.vertices() {
            free_deg[u as usize] = d
                .directions()
                .filter(|&i| slots[flip(u, i) as usize] != FORBIDDEN)
                .count() as u8;
        }
        Search {
            d,
            base_edges: m.edge_count(),
            slots,
            edge_count: m.edge_count(),
            terminal_count: m.terminal_count(),
            free_deg,
            added: Vec::new(),
            nodes_left: cfg.node_budget,
            selection: cfg.vertex_selection,
        }
    }

    #[inline]
    fn set(&mut self, frame: &mut Frame, x: Vertex, val: u32) {
        let old = self.slots[x as usize];
        frame.writes.push((x, old));
        self.slots[x as usize] = val;
        if val == FORBIDDEN && old != FORBIDDEN {
            for i in self.d.directions() {
                self.free_deg[flip(x, i) as usize] -= 1;
            }
        }
    }

    fn open_frame(&self) -> Frame {
        Frame {
            writes: Vec::with_capacity(4),
            edge_count: self.edge_count,
            terminal_count: self.terminal_count,
            added_len: self.added.len(),
        }
    }

    fn rollback(&mut self, frame: Frame) {
        for &(x, old) in frame.writes.iter().rev() {
            let cur = self.slots[x as usize];
            if cur == FORBIDDEN && old != FORBIDDEN {
                for i in self.d.directions() {
                    self.free_deg[flip(x, i) as usize] += 1;
                }
            }
            self.slots[x as usize] = old;
        }
        self.edge_count = frame.edge_count;
        self.terminal_count = frame.terminal_count;
        self.added.truncate(frame.added_len);
    }

    /// Live ends are vertices whose slot is a partner or TERMINAL.
    fn choose_live_end(&self) -> Option<Vertex> {
        let mut best: Option<(u8, Vertex)> = None;
        for u in self.d.vertices() {
            let s = self.slots[u as usize];
            if s < MATCH || s == TERMINAL {
                match self.selection {
                    VertexSelection::First => return Some(u),
                    VertexSelection::MinFreeDegree => {
                        let key = self.free_deg[u as usize];
                        if best.map_or(true, |(bk, _)| key < bk) {
                            best = Some((key, u));
                        }
                    }
                }
            }
        }
        best.map(|(_, u)| u)
    }

    /// One recursion step of the extendability test.
    fn extends_rec(&mut self) -> Step {
        if self.nodes_left == 0 {
            return Step::Exhausted;
        }
        self.nodes_left -= 1;

        let Some(u) = self.choose_live_end() else {
            // Cycle mode with no edges left cannot happen below the root;
            // treat as failure.
            return Step::NotFound;
        };
        let su = self.slots[u as usize];
        let mut exhausted = false;
        for i in self.d.directions() {
            let v = flip(u, i);
            let sv = self.slots[v as usize];
            if sv == FORBIDDEN {
                continue;
            }
            if su == v {
                // Closing the single remaining shortcut edge finishes the
                // cycle; closing earlier would orphan other edges. A
                // shortcut standing for a bare edge (total length 2) is a
                // doubled edge, not a cycle.
                if self.edge_count == 1
                    && self.terminal_count == 0
                    && self.base_edges + self.added.len() + 1 >= 3
                {
                    self.added.push((u, v));
                    return Step::Found;
                }
                continue;
            }
            if su == TERMINAL && sv == TERMINAL {
                if self.edge_count == 0 && self.terminal_count == 2 {
                    self.added.push((u, v));
                    return Step::Found;
                }
                if self.terminal_count < 4 {
                    continue;
                }
            }
            if sv == MATCH {
                continue;
            }
            let mut frame = self.open_frame();
            self.apply_edge(&mut frame, u, i);
            match self.extends_rec() {
                Step::Found => return Step::Found,
                Step::Exhausted => {
                    self.rollback(frame);
                    exhausted = true;
                    break;
                }
                Step::NotFound => self.rollback(frame),
            }
        }
        if exhausted {
            Step::Exhausted
        } else {
            Step::NotFound
        }
    }

    /// Add the cube edge `uu^i` with shortcut compaction: the table keeps
    /// one shortcut edge per pending path of the real extension.
    fn apply_edge(&mut self, frame: &mut Frame, u: Vertex, i: u8) {
        let v = flip(u, i);
        let su = self.slots[u as usize];
        let sv = self.slots[v as usize];
        self.added.push((u, v));
        match (su, sv) {
            (a, b) if a < MATCH && b < MATCH => {
                // Join two paths: their far ends become the new shortcut.
                self.set(frame, a, b);
                self.set(frame, b, a);
                self.set(frame, u, FORBIDDEN);
                self.set(frame, v, FORBIDDEN);
                self.edge_count -= 1;
            }
            (a, UNCOVERED) if a < MATCH => {
                self.set(frame, a, v);
                self.set(frame, v, a);
                self.set(frame, u, FORBIDDEN);
            }
            (a, TERMINAL) if a < MATCH => {
                self.set(frame, u, FORBIDDEN);
                self.set(frame, v, FORBIDDEN);
                self.set(frame, a, TERMINAL);
                self.edge_count -= 1;
            }
            (TERMINAL, b) if b < MATCH => {
                self.set(frame, u, FORBIDDEN);
                self.set(frame, v, FORBIDDEN);
                self.set(frame, b, TERMINAL);
                self.edge_count -= 1;
            }
            (TERMINAL, UNCOVERED) => {
                self.set(frame, u, FORBIDDEN);
                self.set(frame, v, TERMINAL);
            }
            (TERMINAL, TERMINAL) => {
                self.set(frame, u, FORBIDDEN);
                self.set(frame, v, FORBIDDEN);
                self.terminal_count -= 2;
            }
            _ => unreachable!("apply_edge called on an inadmissible pair"),
        }
    }
}

fn validate(m: &Matching) -> Result<()> {
    if m.terminal_count() % 2 != 0 {
        return Err(Error::OddTerminalCount);
    }
    for u in m.dimension().vertices() {
        if m.slot(u) == Slot::Match {
            return Err(Error::Malformed(format!(
                "vertex {u} still carries the generation-only mark"
            )));
        }
    }
    Ok(())
}

/// Decide whether `M` extends to a cycle (no terminals) or to a linear
/// forest pairing up its terminal vertices, using only cube edges outside
/// `M` and avoiding its forbidden vertices.
pub fn extends(m: &Matching, cfg: &SearchConfig) -> Result<SearchOutcome> {
    validate(m)?;
    let mut search = Search::new(m, cfg);
    let cycle_mode = m.terminal_count() == 0;
    let step = if cycle_mode && m.edge_count() == 0 {
        seeded_search(m, &mut search)
    } else {
        search.extends_rec()
    };
    match step {
        Step::Exhausted => Ok(SearchOutcome::BudgetExhausted),
        Step::NotFound => Ok(SearchOutcome::No),
        Step::Found => {
            let cert = if cfg.want_certificate {
                Some(build_certificate(m, &search.added)?)
            } else {
                None
            };
            Ok(SearchOutcome::Yes(cert))
        }
    }
}

/// With no edges and no terminals there is no live end to grow from, so
/// every cube edge on non-forbidden vertices is tried as the cycle's first
/// edge.
fn seeded_search(m: &Matching, search: &mut Search) -> Step {
    let d = m.dimension();
    let mut exhausted = false;
    for u in d.vertices() {
        for i in d.directions() {
            let v = flip(u, i);
            if v < u {
                continue;
            }
            if search.slots[u as usize] != UNCOVERED || search.slots[v as usize] != UNCOVERED {
                continue;
            }
            let mut frame = search.open_frame();
            search.added.push((u, v));
            search.set(&mut frame, u, v);
            search.set(&mut frame, v, u);
            search.edge_count += 1;
            match search.extends_rec() {
                Step::Found => return Step::Found,
                Step::Exhausted => {
                    search.rollback(frame);
                    search.added.pop();
                    exhausted = true;
                }
                Step::NotFound => {
                    search.rollback(frame);
                    search.added.pop();
                }
            }
            if exhausted {
                return Step::Exhausted;
            }
        }
    }
    Step::NotFound
}

fn build_certificate(
    m: &Matching,
    added: &[(Vertex, Vertex)],
) -> Result<ExtensionCertificate> {
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    let mut push = |a: Vertex, b: Vertex| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for e in m.edges() {
        let (a, b) = e.endpoints();
        push(a, b);
    }
    for &(a, b) in added {
        push(a, b);
    }
    let avoided = m.vertices_with(Slot::Forbidden);
    if m.terminal_count() == 0 {
        let start = *adj.keys().min().expect("nonempty cycle");
        let mut seq = vec![start];
        let mut prev = start;
        let mut cur = adj[&start][0];
        while cur != start {
            seq.push(cur);
            let nbrs = &adj[&cur];
            let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
            prev = cur;
            cur = next;
        }
        let cert = CycleCertificate::for_matching(m, seq, avoided);
        check_cycle(&cert).map_err(|v| Error::Malformed(format!("bad cycle rebuilt: {v}")))?;
        Ok(ExtensionCertificate::Cycle(cert))
    } else {
        let terminals = m.vertices_with(Slot::Terminal);
        let mut used: HashSet<Vertex> = HashSet::new();
        let mut paths = Vec::new();
        for &t in &terminals {
            if used.contains(&t) {
                continue;
            }
            let mut seq = vec![t];
            used.insert(t);
            let mut prev = t;
            let mut cur = adj[&t][0];
            loop {
                seq.push(cur);
                used.insert(cur);
                let nbrs = &adj[&cur];
                if nbrs.len() == 1 {
                    break;
                }
                let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
                prev = cur;
                cur = next;
            }
            paths.push(seq);
        }
        let cert = LinearForestCertificate {
            d: m.dimension().get(),
            paths,
            terminals,
            matching_edges: m.edges().iter().map(|e| e.endpoints()).collect(),
            avoided,
        };
        check_forest(&cert).map_err(|v| Error::Malformed(format!("bad forest rebuilt: {v}")))?;
        Ok(ExtensionCertificate::Forest(cert))
    }
}

/// Maximum length over all extending cycles, by exhausting the search tree.
/// Returns `(best, exact)`: `best = None` when no extension exists; `exact`
/// is false when the budget ran out (the value is then a lower bound).
pub fn max_cycle_length(m: &Matching, cfg: &SearchConfig) -> Result<(Option<usize>, bool)> {
    validate(m)?;
    if m.terminal_count() != 0 {
        return Err(Error::precondition("cycle-length scan needs cycle mode"));
    }
    struct Scan {
        best: Option<usize>,
        base: usize,
    }
    fn walk(s: &mut Search, scan: &mut Scan) -> bool {
        if s.nodes_left == 0 {
            return false;
        }
        s.nodes_left -= 1;
        let Some(u) = s.choose_live_end() else { return true };
        let su = s.slots[u as usize];
        let mut complete = true;
        for i in s.d.directions() {
            let v = flip(u, i);
            let sv = s.slots[v as usize];
            if sv == FORBIDDEN {
                continue;
            }
            if su == v {
                if s.edge_count == 1 && s.terminal_count == 0 {
                    let len = scan.base + s.added.len() + 1;
                    if len >= 3 && scan.best.map_or(true, |b| len > b) {
                        scan.best = Some(len);
                    }
                }
                continue;
            }
            if sv == MATCH || (su == TERMINAL && sv == TERMINAL) {
                continue;
            }
            let mut frame = s.open_frame();
            s.apply_edge(&mut frame, u, i);
            let sub = walk(s, scan);
            s.rollback(frame);
            if !sub {
                complete = false;
                break;
            }
        }
        complete
    }
    let mut search = Search::new(m, cfg);
    let mut scan = Scan { best: None, base: m.edge_count() };
    let d = m.dimension();
    let mut exact = true;
    if m.edge_count() == 0 {
        'seeds: for u in d.vertices() {
            for i in d.directions() {
                let v = flip(u, i);
                if v < u
                    || search.slots[u as usize] != UNCOVERED
                    || search.slots[v as usize] != UNCOVERED
                {
                    continue;
                }
                let mut frame = search.open_frame();
                search.added.push((u, v));
                search.set(&mut frame, u, v);
                search.set(&mut frame, v, u);
                search.edge_count += 1;
                let sub = walk(&mut search, &mut scan);
                search.rollback(frame);
                search.added.pop();
                if !sub {
                    exact = false;
                    break 'seeds;
                }
            }
        }
    } else {
        exact = walk(&mut search, &mut scan);
    }
    Ok((scan.best, exact))
}

/// All perfect matchings on the MATCH-marked vertices, depth first; the
/// visitor sees each completed matching (duplicates across isomorphism).
pub fn generate_matchings_dfs(m: &Matching, visit: &mut dyn FnMut(&Matching)) -> Result<()> {
    let marks = m.vertices_with(Slot::Match);
    if marks.len() % 2 != 0 {
        return Err(Error::OddMatchCount);
    }
    fn rec(m: &mut Matching, visit: &mut dyn FnMut(&Matching)) {
        let marks = m.vertices_with(Slot::Match);
        let Some(&u) = marks.first() else {
            visit(m);
            return;
        };
        for &v in &marks[1..] {
            let e = Edge::new(u, v).unwrap();
            m.add_edge(e).unwrap();
            rec(m, visit);
            m.remove_edge(e).unwrap();
            m.set_label(u, Slot::Match).unwrap();
            m.set_label(v, Slot::Match).unwrap();
        }
    }
    let mut work = m.clone();
    rec(&mut work, visit);
    Ok(())
}

/// All perfect matchings on the MATCH-marked vertices, breadth first with
/// isomorphism removal after every round.
pub fn generate_matchings_bfs(m: &Matching, fixed_directions: &[u8]) -> Result<Vec<Matching>> {
    let marks = m.vertices_with(Slot::Match);
    if marks.len() % 2 != 0 {
        return Err(Error::OddMatchCount);
    }
    let mut level = vec![m.clone()];
    for _ in 0..marks.len() / 2 {
        let mut next: HashMap<Vec<u8>, Matching> = HashMap::new();
        for n in &level {
            let ms = n.vertices_with(Slot::Match);
            let u = ms[0];
            for &v in &ms[1..] {
                let mut n2 = n.clone();
                n2.add_edge(Edge::new(u, v)?)?;
                let key = canonical_form(&n2, fixed_directions);
                next.entry(key).or_insert(n2);
            }
        }
        let mut flat: Vec<Matching> = next.into_values().collect();
        flat.sort_by_key(|n| n.raw_slots().to_vec());
        level = flat;
    }
    Ok(level)
}

fn direction_perms(d: Dimension, fixed_directions: &[u8]) -> Vec<Vec<u8>> {
    let n = d.get() as usize;
    let fixed: Vec<usize> = fixed_directions.iter().map(|&f| (f - 1) as usize).collect();
    let movable: Vec<usize> = (0..n).filter(|p| !fixed.contains(p)).collect();
    let mut out = Vec::new();
    let mut images = movable.clone();
    fn rec(
        k: usize,
        movable: &[usize],
        images: &mut Vec<usize>,
        base: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if k == movable.len() {
            out.push(base.clone());
            return;
        }
        for idx in 0..images.len() {
            let img = images.remove(idx);
            base[movable[k]] = img as u8;
            rec(k + 1, movable, images, base, out);
            images.insert(idx, img);
        }
    }
    let mut base: Vec<u8> = (0..n as u8).collect();
    rec(0, &movable, &mut images, &mut base, &mut out);
    out
}

/// Lexicographically minimal slot encoding over all direction permutations
/// fixing `fixed_directions` pointwise. Isomorphic matchings (under that
/// group) share their form.
pub fn canonical_form(m: &Matching, fixed_directions: &[u8]) -> Vec<u8> {
    let d = m.dimension();
    let encode = |n: &Matching| -> Vec<u8> {
        if d.get() <= 6 {
            n.raw_slots()
                .iter()
                .map(|&s| match s {
                    FORBIDDEN => 0xFF,
                    UNCOVERED => 0xFE,
                    TERMINAL => 0xFD,
                    MATCH => 0xFC,
                    v => v as u8,
                })
                .collect()
        } else {
            n.raw_slots().iter().flat_map(|s| s.to_le_bytes()).collect()
        }
    };
    let mut best: Option<Vec<u8>> = None;
    for perm in direction_perms(d, fixed_directions) {
        let img = encode(&m.permute_directions(&perm));
        if best.as_ref().map_or(true, |b| img < *b) {
            best = Some(img);
        }
    }
    best.unwrap()
}

/// Enumerate every matching of `K(Q_d)` avoiding `forbidden`, deduplicated
/// by direction permutation. Level-wise generation with dedup while a level
/// fits in `dedup_limit` states, then plain DFS completion. Returns the
/// number of matchings visited.
pub fn enumerate_matchings(
    d: Dimension,
    forbidden: &[Vertex],
    dedup_limit: usize,
    visit: &mut dyn FnMut(&Matching) -> Result<()>,
) -> Result<u64> {
    let mut root = Matching::new(d);
    for &z in forbidden {
        root.set_label(z, Slot::Forbidden)?;
    }
    // States mark decided-uncovered vertices FORBIDDEN so the canonical
    // form distinguishes them from undecided ones; emitted matchings are
    // rebuilt with the original forbidden set only.
    let emit = |state: &Matching, visit: &mut dyn FnMut(&Matching) -> Result<()>| -> Result<()> {
        let mut clean = Matching::new(d);
        for &z in forbidden {
            clean.set_label(z, Slot::Forbidden)?;
        }
        for e in state.edges() {
            clean.add_edge(e)?;
        }
        visit(&clean)
    };

    fn first_free(state: &Matching) -> Option<Vertex> {
        state
            .dimension()
            .vertices()
            .find(|&u| state.slot(u) == Slot::Uncovered)
    }

    fn expand(state: &Matching, out: &mut Vec<Matching>) {
        let Some(u) = first_free(state) else { return };
        let d = state.dimension();
        let mut excl = state.clone();
        excl.set_label(u, Slot::Forbidden).unwrap();
        out.push(excl);
        for v in d.vertices().skip(u as usize + 1) {
            if state.slot(v) == Slot::Uncovered {
                let mut with = state.clone();
                with.add_edge(Edge::new(u, v).unwrap()).unwrap();
                out.push(with);
            }
        }
    }

    fn dfs_complete(
        state: &Matching,
        visit: &mut dyn FnMut(&Matching) -> Result<()>,
        emit: &dyn Fn(&Matching, &mut dyn FnMut(&Matching) -> Result<()>) -> Result<()>,
        count: &mut u64,
    ) -> Result<()> {
        if first_free(state).is_none() {
            *count += 1;
            return emit(state, visit);
        }
        let mut children = Vec::new();
        expand(state, &mut children);
        for c in children {
            dfs_complete(&c, visit, emit, count)?;
        }
        Ok(())
    }

    let mut count = 0u64;
    let mut level = vec![root];
    loop {
        // Peel off finished states.
        let mut next_inputs = Vec::new();
        for state in level {
            if first_free(&state).is_none() {
                count += 1;
                emit(&state, visit)?;
            } else {
                next_inputs.push(state);
            }
        }
        if next_inputs.is_empty() {
            return Ok(count);
        }
        let mut expanded = Vec::new();
        for state in &next_inputs {
            expand(state, &mut expanded);
        }
        if expanded.len() > dedup_limit {
            for state in next_inputs {
                dfs_complete(&state, visit, &emit, &mut count)?;
            }
            return Ok(count);
        }
        let mut dedup: HashMap<Vec<u8>, Matching> = HashMap::new();
        for s in expanded {
            dedup.entry(canonical_form(&s, &[])).or_insert(s);
        }
        let mut flat: Vec<Matching> = dedup.into_values().collect();
        flat.sort_by_key(|n| n.raw_slots().to_vec());
        level = flat;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::MatchingJson;

    fn d(n: u8) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    #[test]
    fn empty_q3_extends_to_hamilton_capable_cycle() {
        let m = Matching::new(d(3));
        let out = extends(&m, &cfg()).unwrap();
        assert!(out.is_yes());
        let (best, exact) = max_cycle_length(&m, &cfg()).unwrap();
        assert!(exact);
        assert_eq!(best, Some(8));
    }

    #[test]
    fn long_edge_in_q2_caps_cycle_at_three() {
        let m = Matching::from_edges(d(2), &[Edge::new(0b00, 0b11).unwrap()]).unwrap();
        let out = extends(&m, &cfg()).unwrap();
        let SearchOutcome::Yes(Some(ExtensionCertificate::Cycle(c))) = out else {
            panic!("expected a cycle certificate");
        };
        assert_eq!(c.len(), 3);
        let (best, exact) = max_cycle_length(&m, &cfg()).unwrap();
        assert!(exact);
        assert_eq!(best, Some(3));
    }

    #[test]
    fn even_perfect_matching_q3_max_length_six() {
        let evens: Vec<Vertex> = d(3).vertices().filter(|v| v.count_ones() % 2 == 0).collect();
        let edges: Vec<Edge> = evens
            .chunks_exact(2)
            .map(|c| Edge::new(c[0], c[1]).unwrap())
            .collect();
        let m = Matching::from_edges(d(3), &edges).unwrap();
        let (best, exact) = max_cycle_length(&m, &cfg()).unwrap();
        assert!(exact);
        assert_eq!(best, Some(6));
    }

    #[test]
    fn forest_mode_pairs_terminals() {
        let mut m = Matching::new(d(3));
        m.set_label(0, Slot::Terminal).unwrap();
        m.set_label(0b111, Slot::Terminal).unwrap();
        let out = extends(&m, &cfg()).unwrap();
        let SearchOutcome::Yes(Some(ExtensionCertificate::Forest(f))) = out else {
            panic!("expected a forest certificate");
        };
        assert_eq!(f.paths.len(), 1);
    }

    #[test]
    fn odd_terminal_count_rejected() {
        let mut m = Matching::new(d(3));
        m.set_label(0, Slot::Terminal).unwrap();
        assert!(matches!(extends(&m, &cfg()), Err(Error::OddTerminalCount)));
    }

    #[test]
    fn forbidden_vertices_are_avoided() {
        // Forbid every even vertex except two: only tiny cycles possible,
        // and none exist in the bipartite cube without even vertices.
        let mut m = Matching::new(d(3));
        for v in d(3).vertices() {
            if v.count_ones() % 2 == 0 && v != 0 {
                m.set_label(v, Slot::Forbidden).unwrap();
            }
        }
        // Cycles alternate parities; with one even vertex left none exists.
        let out = extends(&m, &cfg()).unwrap();
        assert!(matches!(out, SearchOutcome::No));
    }

    #[test]
    fn budget_exhaustion_reported() {
        let m = Matching::new(d(4));
        let tight = SearchConfig { node_budget: 1, ..cfg() };
        let out = extends(&m, &tight).unwrap();
        assert!(matches!(out, SearchOutcome::BudgetExhausted));
    }

    #[test]
    fn dfs_counts_double_factorials() {
        for (k, want) in [(4usize, 3u64), (6, 15)] {
            let mut m = Matching::new(d(3));
            for u in 0..k {
                m.set_label(u as Vertex, Slot::Match).unwrap();
            }
            let mut count = 0u64;
            generate_matchings_dfs(&m, &mut |_| count += 1).unwrap();
            assert_eq!(count, want);
        }
    }

    #[test]
    fn bfs_and_dfs_agree_after_dedup() {
        let mut m = Matching::new(d(3));
        for u in d(3).vertices() {
            if u != 0 {
                m.set_label(u, Slot::Match).unwrap();
            }
        }
        // Odd mark count is invalid.
        assert!(generate_matchings_bfs(&m, &[]).is_err());
        let mut m = Matching::new(d(3));
        m.set_label(0, Slot::Forbidden).unwrap();
        for u in d(3).vertices() {
            if u != 0 && u != 0b111 {
                m.set_label(u, Slot::Match).unwrap();
            }
        }
        let bfs = generate_matchings_bfs(&m, &[]).unwrap();
        let mut dfs_forms = HashSet::new();
        generate_matchings_dfs(&m, &mut |n| {
            dfs_forms.insert(canonical_form(n, &[]));
        })
        .unwrap();
        let bfs_forms: HashSet<Vec<u8>> =
            bfs.iter().map(|n| canonical_form(n, &[])).collect();
        assert_eq!(bfs_forms, dfs_forms);
    }

    #[test]
    fn canonical_form_invariance() {
        let m = MatchingJson {
            d: 4,
            edges: vec![(1, 2), (4, 11)],
            forbidden: vec![0],
            terminals: vec![],
        }
        .to_matching()
        .unwrap();
        let base = canonical_form(&m, &[]);
        for perm in direction_perms(d(4), &[]) {
            let img = m.permute_directions(&perm);
            assert_eq!(canonical_form(&img, &[]), base);
        }
        // Half-layers in directions 1 and 2 are isomorphic.
        let l1 = Matching::from_edges(d(4), &crate::layers::half_layer_edges(d(4), 1, 0))
            .unwrap();
        let l2 = Matching::from_edges(d(4), &crate::layers::half_layer_edges(d(4), 2, 0))
            .unwrap();
        assert_eq!(canonical_form(&l1, &[]), canonical_form(&l2, &[]));
        // Fixing direction 1 pins the layer direction, separating the two.
        assert_ne!(canonical_form(&l1, &[1]), canonical_form(&l2, &[1]));
    }

    #[test]
    fn enumerate_small_dimension() {
        // Matchings of K_4 = involutions of a 4-set: 10 in total before
        // dedup; dedup only shrinks the count.
        let mut plain = 0u64;
        enumerate_matchings(d(2), &[], 0, &mut |_| {
            plain += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(plain, 10);
        let mut deduped = 0u64;
        let n = enumerate_matchings(d(2), &[], 1 << 20, &mut |_| {
            deduped += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(n, deduped);
        assert!(deduped <= plain);
        // Every class representative must still be extendable or not in a
        // way consistent with its isomorphic siblings; spot check count.
        assert!(deduped >= 7);
    }

    #[test]
    fn certificates_always_validate() {
        // Random-ish small matchings: certificate integrity is enforced by
        // construction, so a yes here implies a checked certificate.
        let dd = d(4);
        for a in 0..6u32 {
            let m = Matching::from_edges(
                dd,
                &[Edge::new(a, a + 6).unwrap(), Edge::new(a + 7, a + 9).unwrap()],
            );
            let Ok(m) = m else { continue };
            if let SearchOutcome::Yes(Some(cert)) = extends(&m, &cfg()).unwrap() {
                match cert {
                    ExtensionCertificate::Cycle(c) => assert!(check_cycle(&c).is_ok()),
                    ExtensionCertificate::Forest(f) => assert!(check_forest(&f).is_ok()),
                }
            }
        }
    }
}
