//! Constructive extension of matchings to cycles: perfect-matching
//! recursion, the general cycle extension, the forbidden-vertex induction,
//! length-guarantee wrappers, and Hamilton laceability.
//!
//! Every operation re-validates its output certificate before returning it;
//! internal guarantees of the induction are checked at runtime and surface
//! as `Error::Malformed` instead of silently producing a wrong cycle.

use crate::certificate::{
    check_cycle, check_forest, CycleCertificate, LinearForestCertificate,
};
use crate::constructors::{avoid_layer_completion, extend_to_maximal, AvoidMode};
use crate::cube::{flip, inject, parity, project, side, Edge, SplitClass, Vertex};
use crate::error::{Error, Result};
use crate::layers::{danger_report, find_layers, LayerKind, LayerPattern};
use crate::matching::{Matching, Slot};
use crate::oracle::{extends, ExtensionCertificate, SearchConfig, SearchOutcome};
use crate::property_h::{check_property_h, make_h_maximal, HReport};
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// A failed internal guarantee of the construction. These are theorems, so a
/// failure is a bug; it is reported loudly instead of panicking so callers
/// and the test harness can capture it.
macro_rules! guarantee {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(Error::Malformed(format!($($arg)+)));
        }
    };
}

/// How an end vertex of the new crossing edge was covered before surgery.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndState {
    /// The vertex was uncovered.
    Free,
    /// Its partner lay in the same subcube.
    SameSide,
    /// Its partner lay in the opposite subcube.
    OtherSide,
}

/// Which of the nine re-matching cells applied: one state for `u`, one for
/// `u^i`. (`Free`/`Free` cannot occur under condition-maximality.)
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Surgery {
    pub u_state: EndState,
    pub ui_state: EndState,
}

/// One level of the induction: the chosen direction and rule, the parity
/// case, and for odd cuts the full sub-case path.
#[derive(Clone, Debug, Serialize)]
pub struct CaseLevel {
    pub dimension: u8,
    pub direction: u8,
    /// Direction rule that fired: 1, 2 or 3.
    pub direction_rule: u8,
    /// `|M^i_-|` for the chosen direction.
    pub cut: usize,
    /// 1 for the even-cut case, 2 for the odd-cut case.
    pub parity_case: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_case: Option<&'static str>,
    /// Which of the rules (1')-(3') selected `u` in sub-case b.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_rule: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0_case: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_u: Option<Vertex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surgery: Option<Surgery>,
    /// `|I|`: directions whose layer completion had to be blocked.
    pub obstructed: usize,
}

/// Per-level record of the recursion, outermost level first.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CaseTrace {
    pub levels: Vec<CaseLevel>,
}

/// A constructed cycle together with the recursion trace that produced it.
#[derive(Clone, Debug)]
pub struct Extension {
    pub certificate: CycleCertificate,
    pub trace: CaseTrace,
}

/// Outcome of the forbidden-vertex extension: either a cycle avoiding `z`,
/// or the witness that the avoidance condition fails (which is a property of
/// the input, not an error).
#[derive(Clone, Debug)]
pub enum AvoidOutcome {
    Cycle(Extension),
    HViolated(HReport),
}

/// Outcome of the laceability constructions.
#[derive(Clone, Debug)]
pub enum LaceOutcome {
    Cycle(CycleCertificate),
    Path(LinearForestCertificate),
    HalfLayerPresent(Vec<LayerPattern>),
}

// ---------------------------------------------------------------------------
// Shared helpers

fn validate_plain(m: &Matching) -> Result<()> {
    for slot in [Slot::Forbidden, Slot::Terminal, Slot::Match] {
        if let Some(&v) = m.vertices_with(slot).first() {
            return Err(Error::Malformed(format!(
                "vertex {v} carries a non-matching label; extension inputs must be plain matchings"
            )));
        }
    }
    Ok(())
}

/// Run the exhaustive search on a base case that the theory guarantees to be
/// extendable, with the listed vertices marked forbidden.
fn oracle_cycle(m: &Matching, forbidden: &[Vertex]) -> Result<CycleCertificate> {
    let mut probe = m.clone();
    for &z in forbidden {
        probe.set_label(z, Slot::Forbidden)?;
    }
    match extends(&probe, &SearchConfig::default())? {
        SearchOutcome::Yes(Some(ExtensionCertificate::Cycle(c))) => Ok(c),
        SearchOutcome::Yes(_) => Err(Error::Malformed(
            "search succeeded but returned no cycle certificate".into(),
        )),
        SearchOutcome::No => Err(Error::Malformed(format!(
            "exhaustive search refuted a guaranteed extension at d={}",
            m.dimension()
        ))),
        SearchOutcome::BudgetExhausted => Err(Error::Malformed(format!(
            "search budget exhausted on a base case at d={}",
            m.dimension()
        ))),
    }
}

fn crossing_edges(m: &Matching, i: u8) -> Vec<Edge> {
    m.edges()
        .into_iter()
        .filter(|e| e.split_class(i) == SplitClass::Crossing)
        .collect()
}

fn side_endpoints(crossing: &[Edge], i: u8, b: u8) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = crossing
        .iter()
        .map(|e| {
            let (x, y) = e.endpoints();
            if side(x, i) == b {
                x
            } else {
                y
            }
        })
        .collect();
    out.sort_unstable();
    out
}

fn project_edge(e: Edge, i: u8) -> Result<Edge> {
    let (u, v) = e.endpoints();
    Edge::new(project(u, i), project(v, i))
}

/// Restriction of `m` to side `b` of direction `i`, with the given inside
/// edges (in ambient coordinates) added.
fn side_matching(m: &Matching, i: u8, b: u8, extra: &[Edge]) -> Result<Matching> {
    let mut sub = m.restrict(i, b);
    for &e in extra {
        sub.add_edge(project_edge(e, i)?)?;
    }
    Ok(sub)
}

fn inject_cycle(verts: &[Vertex], i: u8, b: u8) -> Vec<Vertex> {
    verts.iter().map(|&v| inject(v, i, b)).collect()
}

fn cycle_edge_set(verts: &[Vertex]) -> Result<HashSet<Edge>> {
    let k = verts.len();
    guarantee!(k >= 3, "cycle with {k} vertices is too short");
    let mut set = HashSet::with_capacity(k);
    for j in 0..k {
        let e = Edge::new(verts[j], verts[(j + 1) % k])?;
        guarantee!(set.insert(e), "edge repeated in cycle");
    }
    Ok(set)
}

fn adjacency(edges: &HashSet<Edge>) -> HashMap<Vertex, Vec<Vertex>> {
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for e in edges {
        let (u, v) = e.endpoints();
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    adj
}

/// Decompose an edge set of maximum degree 2 without cycle components into
/// its paths.
fn forest_paths_from(edges: &HashSet<Edge>) -> Result<Vec<Vec<Vertex>>> {
    let adj = adjacency(edges);
    let mut ends: Vec<Vertex> = Vec::new();
    for (&v, nb) in &adj {
        guarantee!(nb.len() <= 2, "vertex {v} has degree {} in a linear forest", nb.len());
        if nb.len() == 1 {
            ends.push(v);
        }
    }
    ends.sort_unstable();
    let mut used: HashSet<Vertex> = HashSet::new();
    let mut paths = Vec::new();
    for &start in &ends {
        if used.contains(&start) {
            continue;
        }
        let mut seq = vec![start];
        used.insert(start);
        let mut prev = start;
        let mut cur = adj[&start][0];
        loop {
            seq.push(cur);
            used.insert(cur);
            let nb = &adj[&cur];
            if nb.len() == 1 {
                break;
            }
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        paths.push(seq);
    }
    guarantee!(used.len() == adj.len(), "cycle component inside a claimed linear forest");
    Ok(paths)
}

/// Walk an edge set that must form one single cycle.
fn walk_single_cycle(edges: &HashSet<Edge>) -> Result<Vec<Vertex>> {
    let adj = adjacency(edges);
    for (&v, nb) in &adj {
        guarantee!(nb.len() == 2, "vertex {v} has degree {} in a claimed cycle", nb.len());
    }
    let &start = adj.keys().min().expect("nonempty cycle");
    let mut seq = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        seq.push(cur);
        let nb = &adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
    }
    guarantee!(seq.len() == adj.len(), "stitched edges form more than one cycle");
    Ok(seq)
}

/// Join a side-0 cycle and a side-1 cycle across the crossing edges: remove
/// the pairing edges `p0` from `c0`, add the crossing edges, read off the
/// shortcut pairs, obtain the side-1 cycle from `make_c1`, remove the
/// shortcuts from it and close everything into one cycle.
fn stitch(
    i: u8,
    c0: &[Vertex],
    p0: &[Edge],
    crossing: &[Edge],
    make_c1: &mut dyn FnMut(&[Edge]) -> Result<Vec<Vertex>>,
) -> Result<Vec<Vertex>> {
    let mut f = cycle_edge_set(c0)?;
    for e in p0 {
        guarantee!(f.remove(e), "pairing edge {e:?} does not lie on the side-0 cycle");
    }
    for &e in crossing {
        guarantee!(f.insert(e), "crossing edge {e:?} duplicated");
    }
    let paths = forest_paths_from(&f)?;
    let mut p1 = Vec::new();
    for p in &paths {
        let (a, b) = (*p.first().unwrap(), *p.last().unwrap());
        guarantee!(
            side(a, i) == 1 && side(b, i) == 1,
            "shortcut path must end on side 1, got ends {a} and {b}"
        );
        p1.push(Edge::new(a, b)?);
    }
    p1.sort_unstable();
    let c1 = make_c1(&p1)?;
    let mut g = cycle_edge_set(&c1)?;
    for e in &p1 {
        guarantee!(g.remove(e), "shortcut edge {e:?} does not lie on the side-1 cycle");
    }
    for e in g {
        guarantee!(f.insert(e), "side-1 edge {e:?} duplicated");
    }
    walk_single_cycle(&f)
}

/// Replace the cycle edge `ab` by the path `a, ins.., b`.
fn insert_between(mut verts: Vec<Vertex>, a: Vertex, b: Vertex, ins: &[Vertex]) -> Result<Vec<Vertex>> {
    if ins.is_empty() {
        return Ok(verts);
    }
    let k = verts.len();
    let pa = verts.iter().position(|&x| x == a);
    let Some(pa) = pa else {
        return Err(Error::Malformed(format!("vertex {a} missing from the cycle")));
    };
    if verts[(pa + 1) % k] == b {
        verts.splice(pa + 1..pa + 1, ins.iter().copied());
        Ok(verts)
    } else if verts[(pa + k - 1) % k] == b {
        let rev: Vec<Vertex> = ins.iter().rev().copied().collect();
        verts.splice(pa..pa, rev);
        Ok(verts)
    } else {
        Err(Error::Malformed(format!("vertices {a} and {b} are not cycle neighbors")))
    }
}

fn certify(m: &Matching, verts: Vec<Vertex>, avoided: Vec<Vertex>) -> Result<CycleCertificate> {
    let cert = CycleCertificate::for_matching(m, verts, avoided);
    check_cycle(&cert)
        .map_err(|v| Error::Malformed(format!("constructed cycle fails validation: {v}")))?;
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Perfect matchings

/// Extend a perfect matching of `K(Q_d)`, `d >= 2`, to a Hamilton cycle.
pub fn fink_extend_perfect(m: &Matching) -> Result<CycleCertificate> {
    validate_plain(m)?;
    let d = m.dimension();
    if d.get() < 2 {
        return Err(Error::precondition("Hamilton cycles need d >= 2"));
    }
    if !m.uncovered_vertices().is_empty() {
        return Err(Error::precondition("matching must be perfect"));
    }
    let verts = fink_rec(m)?;
    let cert = certify(m, verts, vec![])?;
    guarantee!(cert.is_hamiltonian(), "perfect extension must be Hamiltonian");
    Ok(cert)
}

fn fink_rec(m: &Matching) -> Result<Vec<Vertex>> {
    let d = m.dimension();
    if d.get() <= 3 {
        return Ok(oracle_cycle(m, &[])?.vertices);
    }
    let i = max_cut_direction(m);
    let crossing = crossing_edges(m, i);
    let cut = crossing.len();
    // Some direction always crosses at least one edge, and every cut of a
    // perfect matching is even.
    guarantee!(cut >= 2 && cut % 2 == 0, "perfect matching with max cut {cut}");
    let a0 = side_endpoints(&crossing, i, 0);
    let p0: Vec<Edge> = a0
        .chunks_exact(2)
        .map(|c| Edge::new(c[0], c[1]))
        .collect::<Result<_>>()?;
    let sub0 = side_matching(m, i, 0, &p0)?;
    let c0 = inject_cycle(&fink_rec(&sub0)?, i, 0);
    stitch(i, &c0, &p0, &crossing, &mut |p1| {
        let sub1 = side_matching(m, i, 1, p1)?;
        Ok(inject_cycle(&fink_rec(&sub1)?, i, 1))
    })
}

fn max_cut_direction(m: &Matching) -> u8 {
    let d = m.dimension();
    let mut best = (1u8, 0usize);
    for i in d.directions() {
        let c = m.cut(i);
        if c > best.1 {
            best = (i, c);
        }
    }
    best.0
}

// ---------------------------------------------------------------------------
// General matchings

/// Extend any matching of `K(Q_d)`, `d >= 2`, to a cycle.
pub fn extend_to_cycle(m: &Matching) -> Result<Extension> {
    validate_plain(m)?;
    let d = m.dimension();
    if d.get() < 2 {
        return Err(Error::precondition("cycles need d >= 2"));
    }
    if d.get() <= 4 {
        let cert = oracle_cycle(m, &[])?;
        return Ok(Extension { certificate: cert, trace: CaseTrace::default() });
    }
    let uncovered = m.uncovered_vertices();
    if uncovered.is_empty() {
        let certificate = fink_extend_perfect(m)?;
        return Ok(Extension { certificate, trace: CaseTrace::default() });
    }
    // Any uncovered vertex satisfying the avoidance condition yields a cycle
    // through the forbidden-vertex machinery; the cycle simply need not use
    // that vertex.
    for &u in &uncovered {
        if check_property_h(m, u)?.satisfied {
            match extend_avoiding(m, u)? {
                AvoidOutcome::Cycle(ext) => {
                    let cert = certify(m, ext.certificate.vertices, vec![])?;
                    return Ok(Extension { certificate: cert, trace: ext.trace });
                }
                AvoidOutcome::HViolated(_) => {
                    return Err(Error::Malformed(
                        "avoidance condition flipped between check and use".into(),
                    ));
                }
            }
        }
    }
    // Every candidate fails: exactly two uncovered vertices astride the
    // unique half-layer direction, each one the other's only witness.
    guarantee!(
        uncovered.len() == 2,
        "{} uncovered vertices but none admits the avoidance condition",
        uncovered.len()
    );
    let halves = find_layers(m, &[LayerKind::Half]);
    guarantee!(!halves.is_empty(), "no half-layer despite failing candidates");
    let i = halves[0].direction;
    let (a, b) = (uncovered[0], uncovered[1]);
    guarantee!(side(a, i) != side(b, i), "uncovered pair on one side must have succeeded");
    let (u, v) = if side(a, i) == 0 { (a, b) } else { (b, a) };
    if v == flip(u, i) {
        // The two free vertices are cube neighbors: close them into a
        // perfect matching and use the Hamilton extension. The added edge is
        // a cube edge, so the cycle is valid for the original matching too.
        let mut closed = m.clone();
        closed.add_edge(Edge::new(u, v)?)?;
        let c = fink_extend_perfect(&closed)?;
        let cert = certify(m, c.vertices, vec![])?;
        return Ok(Extension { certificate: cert, trace: CaseTrace::default() });
    }
    // Re-match across the split: u takes over the partner of u^i, and the
    // cycle avoiding u^i is repaired by routing through u - u^i - partner.
    let ui = flip(u, i);
    guarantee!(m.is_covered(ui), "the neighbor of u across the layer must be covered");
    let w = m.partner(ui).expect("covered");
    let mut re = m.clone();
    re.remove_edge(Edge::new(ui, w)?)?;
    re.add_edge(Edge::new(u, w)?)?;
    match extend_avoiding(&re, ui)? {
        AvoidOutcome::Cycle(ext) => {
            let verts = insert_between(ext.certificate.vertices, u, w, &[ui])?;
            let cert = certify(m, verts, vec![])?;
            Ok(Extension { certificate: cert, trace: ext.trace })
        }
        AvoidOutcome::HViolated(_) => Err(Error::Malformed(
            "re-matched instance violates the avoidance condition".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Forbidden-vertex extension

/// Extend `m` to a cycle avoiding `z`, or report the violated avoidance
/// condition. Requires `d >= 5` and `z` uncovered.
pub fn extend_avoiding(m: &Matching, z: Vertex) -> Result<AvoidOutcome> {
    validate_plain(m)?;
    let d = m.dimension();
    if d.get() < 5 {
        return Err(Error::precondition("forbidden-vertex extension needs d >= 5"));
    }
    if m.is_covered(z) {
        return Err(Error::ForbiddenCovered(z));
    }
    let report = check_property_h(m, z)?;
    if !report.satisfied {
        return Ok(AvoidOutcome::HViolated(report));
    }
    let translated = m.translate(z);
    let hm = make_h_maximal(&translated, 0)?;
    let mut trace = CaseTrace::default();
    let verts = if d.get() == 5 {
        oracle_cycle(&hm, &[0])?.vertices
    } else {
        induction(&hm, &mut trace)?
    };
    let mapped: Vec<Vertex> = verts.iter().map(|&x| x ^ z).collect();
    let cert = certify(m, mapped, vec![z])?;
    Ok(AvoidOutcome::Cycle(Extension { certificate: cert, trace }))
}

fn sub_avoid(m: &Matching, z: Vertex, trace: &mut CaseTrace) -> Result<Vec<Vertex>> {
    match extend_avoiding(m, z)? {
        AvoidOutcome::Cycle(ext) => {
            trace.levels.extend(ext.trace.levels);
            Ok(ext.certificate.vertices)
        }
        AvoidOutcome::HViolated(_) => Err(Error::Malformed(format!(
            "induction subproblem at d={} violates the avoidance condition",
            m.dimension()
        ))),
    }
}

fn sub_cycle(m: &Matching, trace: &mut CaseTrace) -> Result<Vec<Vertex>> {
    let ext = extend_to_cycle(m)?;
    trace.levels.extend(ext.trace.levels);
    Ok(ext.certificate.vertices)
}

/// True when the restriction to side `b` of direction `i` hosts a full
/// half-layer, or a near half-layer whose two extension vertices are covered
/// by distinct edges of the ambient matching.
fn bad_half_layers(full: &Matching, i: u8, b: u8) -> bool {
    let sub = full.restrict(i, b);
    if !find_layers(&sub, &[LayerKind::Half]).is_empty() {
        return true;
    }
    for pat in find_layers(&sub, &[LayerKind::NearHalf]) {
        let x = inject(pat.extension_vertices[0], i, b);
        let y = inject(pat.extension_vertices[1], i, b);
        if full.is_covered(x) && full.is_covered(y) && full.partner(x) != Some(y) {
            return true;
        }
    }
    false
}

/// Choose a direction by the three rules: a 0-endangered (covered near)
/// quad-layer's direction, else any quad-layer's direction, else a maximum
/// cut.
fn select_direction(m: &Matching) -> (u8, u8) {
    let report = danger_report(m, 0, &[LayerKind::Quad, LayerKind::NearQuad]);
    for (pat, covered) in report.patterns.iter().zip(&report.covered_flags) {
        if pat.kind == LayerKind::Quad || *covered {
            return (pat.direction, 1);
        }
    }
    if let Some(pat) = find_layers(m, &[LayerKind::Quad]).first() {
        return (pat.direction, 2);
    }
    (max_cut_direction(m), 3)
}

/// The induction step for `d >= 6`: `m` is condition-maximal, avoids `0`,
/// and satisfies the avoidance condition. Returns a cycle extending `m` that
/// avoids `0`.
fn induction(m: &Matching, trace: &mut CaseTrace) -> Result<Vec<Vertex>> {
    let d = m.dimension();
    let (i, rule) = select_direction(m);
    let cut = m.cut(i);
    let bound = if rule == 3 { 4 } else { 7 };
    guarantee!(cut >= bound, "direction rule {rule} promised cut >= {bound}, got {cut}");
    guarantee!(
        !bad_half_layers(m, i, 0),
        "guarantee (i) failed: side 0 of direction {i} hosts a completed half-layer"
    );
    if cut % 2 == 0 {
        trace.levels.push(CaseLevel {
            dimension: d.get(),
            direction: i,
            direction_rule: rule,
            cut,
            parity_case: 1,
            u_case: None,
            u_rule: None,
            p0_case: None,
            chosen_u: None,
            surgery: None,
            obstructed: 0,
        });
        let crossing = crossing_edges(m, i);
        let b0 = side_endpoints(&crossing, i, 0);
        let p0 = complete_pairing(m, i, &[], &b0)?;
        let sub0 = side_matching(m, i, 0, &p0)?;
        let c0 = inject_cycle(&sub_avoid(&sub0, 0, trace)?, i, 0);
        stitch(i, &c0, &p0, &crossing, &mut |p1| {
            let sub1 = side_matching(m, i, 1, p1)?;
            Ok(inject_cycle(&sub_cycle(&sub1, trace)?, i, 1))
        })
    } else {
        induction_odd(m, i, rule, cut, trace)
    }
}

struct NInfo {
    n: Matching,
    v: Vertex,
    w: Vertex,
    surgery: Surgery,
}

/// Re-match around the non-edge `u u^i` per the nine-cell table: drop the
/// partner edges of `u` and `u^i`, connect the leftovers by one new edge.
fn build_n(m: &Matching, i: u8, u: Vertex) -> Result<NInfo> {
    let ui = flip(u, i);
    guarantee!(!m.has_edge(u, ui), "surgery vertex already matched across the split");
    let um = m.partner(u);
    let uim = m.partner(ui);
    guarantee!(
        um.is_some() || uim.is_some(),
        "both surgery ends free contradicts condition-maximality"
    );
    let mut n = m.clone();
    if let Some(p) = um {
        n.remove_edge(Edge::new(u, p)?)?;
    }
    if let Some(p) = uim {
        n.remove_edge(Edge::new(ui, p)?)?;
    }
    let v = um.unwrap_or(u);
    let w = uim.unwrap_or(ui);
    n.add_edge(Edge::new(v, w)?)?;
    let state = |vertex: Vertex, partner: Option<Vertex>| match partner {
        None => EndState::Free,
        Some(p) if side(p, i) == side(vertex, i) => EndState::SameSide,
        Some(_) => EndState::OtherSide,
    };
    Ok(NInfo {
        n,
        v,
        w,
        surgery: Surgery { u_state: state(u, um), ui_state: state(ui, uim) },
    })
}

/// Choose the surgery vertex `u` for the odd-cut case. Returns the vertex,
/// the sub-case tag, and the firing rule index for sub-case b.
fn choose_u(m: &Matching, i: u8) -> Result<(Vertex, &'static str, Option<u8>)> {
    let d = m.dimension();
    let x0: Vec<Vertex> = m
        .uncovered_vertices()
        .into_iter()
        .filter(|&x| side(x, i) == 0 && x != 0)
        .collect();
    if !x0.is_empty() {
        guarantee!(x0.len() % 2 == 0, "odd number of free side-0 vertices");
        // Split by where the partner of x^i lies; every x^i is covered, as
        // two free cube neighbors contradict condition-maximality.
        let mut x01 = Vec::new();
        let mut x00 = Vec::new();
        for &x in &x0 {
            let p = m.partner(flip(x, i));
            guarantee!(p.is_some(), "free vertex {x} with free neighbor across the split");
            if side(p.unwrap(), i) == 1 {
                x01.push(x);
            } else {
                x00.push(x);
            }
        }
        if let Some(&x) = x01.first() {
            return Ok((x, "ai", None));
        }
        // Both candidates re-route a crossing edge into side 0; at least one
        // of the first two leaves side 0 free of completed half-layers.
        let (x, y) = (x00[0], x00[1]);
        let nx = build_n(m, i, x)?;
        if !bad_half_layers(&nx.n, i, 0) {
            return Ok((x, "aii", None));
        }
        let ny = build_n(m, i, y)?;
        guarantee!(
            !bad_half_layers(&ny.n, i, 0),
            "neither re-routing candidate avoids a completed half-layer on side 0"
        );
        return Ok((y, "aii", None));
    }
    // Sub-case b: all of side 0 except 0 is covered. Work with odd side-0
    // vertices whose direction-i edge is absent from the matching.
    let y_set: Vec<Vertex> = d
        .vertices()
        .filter(|&x| side(x, i) == 0 && parity(x) == 1 && !m.has_edge(x, flip(x, i)))
        .collect();
    guarantee!(!y_set.is_empty(), "no odd surgery candidate: direction {i} is fully matched");
    let in_y = |u: Vertex| y_set.contains(&u);

    // Rule (1'): a (near) half-layer on side 1 pins u^i to one of its even
    // end vertices, so the surgery removes one of the layer's edges.
    let sub1 = m.restrict(i, 1);
    let sd = sub1.dimension();
    let mut candidates: Vec<Vertex> = Vec::new();
    for pat in find_layers(&sub1, &[LayerKind::Half, LayerKind::NearHalf]) {
        for e in pat.edges(sd) {
            let (a, b) = e.endpoints();
            for end in [a, b] {
                let full = inject(end, i, 1);
                if parity(full) == 0 {
                    let u = flip(full, i);
                    if in_y(u) {
                        candidates.push(u);
                    }
                }
            }
        }
    }
    if let Some(&u) = candidates.iter().min() {
        return Ok((u, "b", Some(1)));
    }
    // Rule (2'): a 2-near half-layer on side 0 pins u to one of its odd end
    // vertices.
    let sub0 = m.restrict(i, 0);
    let mut candidates: Vec<Vertex> = Vec::new();
    for pat in find_layers(&sub0, &[LayerKind::TwoNearHalf]) {
        for e in pat.edges(sd) {
            let (a, b) = e.endpoints();
            for end in [a, b] {
                let full = inject(end, i, 0);
                if parity(full) == 1 && in_y(full) {
                    candidates.push(full);
                }
            }
        }
    }
    if let Some(&u) = candidates.iter().min() {
        return Ok((u, "b", Some(2)));
    }
    Ok((y_set[0], "b", Some(3)))
}

/// Directions `j != i` in which some pairing of the side-1 crossing
/// endpoints could complete a half-layer whose side containing `ui` is fully
/// covered. Returns each direction with the missing layer edges.
fn obstructed_directions(
    n: &Matching,
    i: u8,
    ui: Vertex,
    b1: &HashSet<Vertex>,
) -> Vec<(u8, Vec<Edge>)> {
    let d = n.dimension();
    let mut out = Vec::new();
    for j in d.directions().filter(|&j| j != i) {
        // The only candidate layer is the one not incident with ui: its
        // side-j-0 end vertices have the parity that excludes ui.
        let q_in = if side(ui, j) == 0 { parity(ui) } else { parity(flip(ui, j)) };
        let q = 1 - q_in;
        let side_covered = d
            .vertices()
            .filter(|&x| side(x, i) == 1 && side(x, j) == side(ui, j) && x != ui)
            .all(|x| n.is_covered(x));
        if !side_covered {
            continue;
        }
        let mut missing = Vec::new();
        let mut feasible = true;
        for x in d.vertices() {
            if side(x, i) != 1 || side(x, j) != 0 || parity(x) != q {
                continue;
            }
            let xj = flip(x, j);
            if n.has_edge(x, xj) {
                continue;
            }
            if b1.contains(&x) && b1.contains(&xj) {
                missing.push(Edge::new(x, xj).unwrap());
            } else {
                feasible = false;
                break;
            }
        }
        if feasible {
            out.push((j, missing));
        }
    }
    out
}

/// Pair up the side-0 crossing endpoints `b0` into inside edges, starting
/// from the forced edges, so that side 0 plus the pairing has no half-layer.
/// All edges in ambient coordinates.
fn complete_pairing(m: &Matching, i: u8, forced: &[Edge], b0: &[Vertex]) -> Result<Vec<Edge>> {
    let mut sub0 = m.restrict(i, 0);
    for &e in forced {
        sub0.add_edge(project_edge(e, i)?)?;
    }
    guarantee!(
        find_layers(&sub0, &[LayerKind::Half]).is_empty(),
        "forced pairing edges completed a half-layer on side 0"
    );
    let mut taken: HashSet<Vertex> = HashSet::new();
    for e in forced {
        let (a, b) = e.endpoints();
        taken.insert(a);
        taken.insert(b);
    }
    let rest: Vec<Vertex> = b0
        .iter()
        .copied()
        .filter(|v| !taken.contains(v))
        .map(|v| project(v, i))
        .collect();
    let mut p0: Vec<Edge> = forced.to_vec();
    match rest.len() {
        0 => {}
        2 => {
            // Below the sizes the pairing lemma accepts; a single pair is
            // checked directly.
            sub0.add_edge(Edge::new(rest[0], rest[1])?)?;
            guarantee!(
                find_layers(&sub0, &[LayerKind::Half]).is_empty(),
                "final pairing edge completed a half-layer on side 0"
            );
            p0.push(Edge::new(inject(rest[0], i, 0), inject(rest[1], i, 0))?);
        }
        _ => {
            for e in avoid_layer_completion(&sub0, &rest, AvoidMode::Half)? {
                let (a, b) = e.endpoints();
                p0.push(Edge::new(inject(a, i, 0), inject(b, i, 0))?);
            }
        }
    }
    Ok(p0)
}

fn induction_odd(
    m: &Matching,
    i: u8,
    rule: u8,
    cut: usize,
    trace: &mut CaseTrace,
) -> Result<Vec<Vertex>> {
    let d = m.dimension();
    let (u, u_case, u_rule) = choose_u(m, i)?;
    let ui = flip(u, i);
    let info = build_n(m, i, u)?;
    let n = &info.n;
    guarantee!(
        !bad_half_layers(n, i, 0),
        "guarantee (i) failed after surgery on side 0 of direction {i}"
    );
    let crossing = crossing_edges(n, i);
    guarantee!(
        crossing.len() % 2 == 0 && crossing.len() >= 4,
        "re-matched crossing count {} must be even and at least 4",
        crossing.len()
    );
    let b0 = side_endpoints(&crossing, i, 0);
    let b1: HashSet<Vertex> = side_endpoints(&crossing, i, 1).into_iter().collect();

    let ui_covered = info.w != ui;
    let (p0, p0_case, obstructed) = if !ui_covered {
        (complete_pairing(n, i, &[], &b0)?, "a", 0)
    } else {
        let obs = obstructed_directions(n, i, ui, &b1);
        let forced = forced_pairs(n, i, ui, &obs, crossing.len(), d.get())?;
        let p0_case = match obs.len() {
            0 => "bi",
            1 if crossing.len() >= 6 => "bii'",
            1 => "bii''",
            _ => "biii",
        };
        (complete_pairing(n, i, &forced, &b0)?, p0_case, obs.len())
    };

    trace.levels.push(CaseLevel {
        dimension: d.get(),
        direction: i,
        direction_rule: rule,
        cut,
        parity_case: 2,
        u_case: Some(u_case),
        u_rule,
        p0_case: Some(p0_case),
        chosen_u: Some(u),
        surgery: Some(info.surgery),
        obstructed,
    });

    let sub0 = side_matching(n, i, 0, &p0)?;
    let c0_raw = sub_avoid(&sub0, 0, trace)?;
    if info.v != u {
        // The side-0 recursion leaves exactly 0 and u free, and a cycle in
        // the subcube avoiding one of them must avoid both.
        guarantee!(
            !c0_raw.contains(&project(u, i)),
            "side-0 cycle passes through the surgery vertex {u}"
        );
    }
    let c0 = inject_cycle(&c0_raw, i, 0);
    let cycle_n = stitch(i, &c0, &p0, &crossing, &mut |p1| {
        let sub1 = side_matching(n, i, 1, p1)?;
        if ui_covered {
            Ok(inject_cycle(&sub_avoid(&sub1, project(ui, i), trace)?, i, 1))
        } else {
            Ok(inject_cycle(&sub_cycle(&sub1, trace)?, i, 1))
        }
    })?;

    // Undo the surgery: swap the helper edge for the path through u and u^i.
    let mut ins = Vec::new();
    if info.v != u {
        ins.push(u);
    }
    if info.w != ui {
        ins.push(ui);
    }
    let verts = insert_between(cycle_n, info.v, info.w, &ins)?;
    guarantee!(!verts.contains(&0), "cycle passes through the forbidden vertex");
    Ok(verts)
}

/// Forced pairing edges blocking each obstructed direction: for every such
/// direction pick one missing layer edge and pair the side-0 partners of its
/// end vertices. Public so the four-crossing double-missing branch, which
/// cannot be reached from valid top-level inputs, stays exercised directly.
pub fn forced_pairs(
    n: &Matching,
    i: u8,
    ui: Vertex,
    obs: &[(u8, Vec<Edge>)],
    cross_count: usize,
    d: u8,
) -> Result<Vec<Edge>> {
    if obs.is_empty() {
        return Ok(vec![]);
    }
    if obs.len() == 1 && cross_count == 4 {
        // The tight case: dimension 6, a 2-near half-layer on side 1 whose
        // four extension vertices are exactly the crossing endpoints. Both
        // missing edges are blocked.
        let (_, missing) = &obs[0];
        guarantee!(d == 6, "a four-edge crossing blocking case requires d = 6, got d = {d}");
        guarantee!(
            missing.len() == 2,
            "expected exactly two missing layer edges, got {}",
            missing.len()
        );
        let mut forced = Vec::new();
        for e in missing {
            forced.push(partner_pair(n, *e)?);
        }
        return Ok(forced);
    }
    if obs.len() == 1 {
        let (_, missing) = &obs[0];
        guarantee!(!missing.is_empty(), "obstructed direction with no missing edge to block");
        return Ok(vec![partner_pair(n, missing[0])?]);
    }
    // Two or more obstructed directions: each layer lies entirely outside
    // the matching, so any of its edges can be blocked; preferred picks are
    // the rotated neighbors of ui, with a greedy fallback when the rotation
    // leaves the subcube.
    let mut used: HashSet<Vertex> = HashSet::new();
    let mut forced = Vec::new();
    for (j, missing) in obs {
        guarantee!(
            missing.len() == 1usize << (d - 3),
            "an obstructed layer among several must be fully missing"
        );
        let pj = if *j == 1 { d } else { j - 1 };
        let primary = if pj != i {
            let x = flip(ui, pj);
            let e = Edge::new(x, flip(x, *j))?;
            if missing.contains(&e) && !used.contains(&x) && !used.contains(&flip(x, *j)) {
                Some(e)
            } else {
                None
            }
        } else {
            None
        };
        let pick = match primary {
            Some(e) => e,
            None => {
                let found = missing.iter().copied().find(|e| {
                    let (a, b) = e.endpoints();
                    !used.contains(&a) && !used.contains(&b)
                });
                match found {
                    Some(e) => e,
                    None => {
                        return Err(Error::Malformed(
                            "no independent blocking edge available".into(),
                        ))
                    }
                }
            }
        };
        let (a, b) = pick.endpoints();
        used.insert(a);
        used.insert(b);
        forced.push(partner_pair(n, pick)?);
    }
    Ok(forced)
}

/// The side-0 edge joining the crossing partners of a side-1 edge's ends.
fn partner_pair(n: &Matching, e: Edge) -> Result<Edge> {
    let (x, y) = e.endpoints();
    let px = n.partner(x);
    let py = n.partner(y);
    guarantee!(
        px.is_some() && py.is_some(),
        "blocked layer edge ends must be covered by crossing edges"
    );
    Edge::new(px.unwrap(), py.unwrap())
}

// ---------------------------------------------------------------------------
// Length-guarantee wrappers

/// Extend a matching of `Q_d` (cube edges only) to a cycle of length at
/// least `ceil(2^(d+1) / 3)`.
pub fn long_cycle_qd(m: &Matching) -> Result<Extension> {
    validate_plain(m)?;
    if !m.is_subgraph_of_qd() {
        return Err(Error::precondition("matching must use cube edges only"));
    }
    let d = m.dimension();
    if d.get() < 2 {
        return Err(Error::precondition("cycles need d >= 2"));
    }
    let maximal = extend_to_maximal(m, &[], false)?;
    guarantee!(maximal.is_maximal(), "greedy completion must be maximal");
    let ext = extend_to_cycle(&maximal)?;
    let cert = certify(m, ext.certificate.vertices, vec![])?;
    let bound = ((1u64 << (d.get() + 1)) + 2) / 3;
    guarantee!(
        cert.len() as u64 >= bound,
        "cycle length {} below the bound {bound}",
        cert.len()
    );
    Ok(Extension { certificate: cert, trace: ext.trace })
}

/// Extend any matching of `K(Q_d)` to a cycle of length at least `2^(d-1)`.
pub fn long_cycle_kqd(m: &Matching) -> Result<Extension> {
    validate_plain(m)?;
    let d = m.dimension();
    if d.get() < 2 {
        return Err(Error::precondition("cycles need d >= 2"));
    }
    let big = extend_to_maximal(m, &[], true)?;
    let ext = extend_to_cycle(&big)?;
    // The completion may add long edges, so the certificate is stated over
    // the completed matching; it contains every input edge.
    let cert = certify(&big, ext.certificate.vertices, vec![])?;
    let on_cycle: HashSet<Edge> = cert.cycle_edges().into_iter().collect();
    for e in m.edges() {
        guarantee!(on_cycle.contains(&e), "input edge {e:?} missing from the long cycle");
    }
    let bound = 1u64 << (d.get() - 1);
    guarantee!(
        cert.len() as u64 >= bound,
        "cycle length {} below the bound {bound}",
        cert.len()
    );
    Ok(Extension { certificate: cert, trace: ext.trace })
}

// ---------------------------------------------------------------------------
// Laceability

/// For a perfect matching on all vertices but `x` and `y` (of opposite
/// parity): a cycle through the other `2^d - 2` vertices, or the half-layer
/// witnesses showing none exists.
pub fn hamlace_cycle(m: &Matching, x: Vertex, y: Vertex) -> Result<LaceOutcome> {
    validate_plain(m)?;
    let d = m.dimension();
    if d.get() < 5 {
        return Err(Error::precondition("laceability construction needs d >= 5"));
    }
    if parity(x) == parity(y) {
        return Err(Error::precondition("the two free vertices must have opposite parity"));
    }
    let mut want = vec![x, y];
    want.sort_unstable();
    if m.uncovered_vertices() != want {
        return Err(Error::precondition("matching must cover every vertex except the two given"));
    }
    let halves = find_layers(m, &[LayerKind::Half]);
    if !halves.is_empty() {
        return Ok(LaceOutcome::HalfLayerPresent(halves));
    }
    match extend_avoiding(m, x)? {
        AvoidOutcome::Cycle(ext) => {
            guarantee!(
                !ext.certificate.vertices.contains(&y),
                "cycle avoiding {x} must also avoid the opposite-parity vertex {y}"
            );
            guarantee!(
                ext.certificate.len() == (1usize << d.get()) - 2,
                "laceability cycle must visit all other vertices"
            );
            let cert = certify(m, ext.certificate.vertices, vec![x, y])?;
            Ok(LaceOutcome::Cycle(cert))
        }
        AvoidOutcome::HViolated(_) => Err(Error::Malformed(
            "avoidance condition failed despite the absence of half-layers".into(),
        )),
    }
}

/// Hamilton path from `x` to `y` extending a perfect matching, or the
/// half-layer obstruction of the re-matched instance.
pub fn hamlace_path(m: &Matching, x: Vertex, y: Vertex) -> Result<LaceOutcome> {
    validate_plain(m)?;
    let d = m.dimension();
    if d.get() < 5 {
        return Err(Error::precondition("laceability construction needs d >= 5"));
    }
    if !m.uncovered_vertices().is_empty() {
        return Err(Error::precondition("matching must be perfect"));
    }
    if parity(x) == parity(y) {
        return Err(Error::precondition("path ends must have opposite parity"));
    }
    let xm = m.partner(x).expect("perfect");
    let ym = m.partner(y).expect("perfect");
    if xm == y {
        return Err(Error::precondition(
            "the two ends are matched to each other; the re-matching is undefined",
        ));
    }
    let mut re = m.clone();
    re.remove_edge(Edge::new(x, xm)?)?;
    re.remove_edge(Edge::new(y, ym)?)?;
    re.add_edge(Edge::new(xm, ym)?)?;
    let cycle = match hamlace_cycle(&re, x, y)? {
        LaceOutcome::Cycle(c) => c,
        LaceOutcome::HalfLayerPresent(h) => return Ok(LaceOutcome::HalfLayerPresent(h)),
        LaceOutcome::Path(_) => unreachable!("cycle construction cannot return a path"),
    };
    // Open the cycle at the helper edge and attach the two matching edges.
    let verts = cycle.vertices;
    let k = verts.len();
    let pos = (0..k)
        .find(|&p| {
            let (a, b) = (verts[p], verts[(p + 1) % k]);
            (a == xm && b == ym) || (a == ym && b == xm)
        })
        .ok_or_else(|| Error::Malformed("helper edge missing from the cycle".into()))?;
    let mut path: Vec<Vertex> = verts[pos + 1..].iter().chain(&verts[..=pos]).copied().collect();
    if path[0] == xm {
        path.reverse();
    }
    // path now runs xm .. ym or ym .. xm; normalize to start at x.
    let mut full = Vec::with_capacity(k + 2);
    if *path.first().unwrap() == ym {
        path.reverse();
    }
    guarantee!(*path.first().unwrap() == xm && *path.last().unwrap() == ym, "cycle opened wrongly");
    full.push(x);
    full.extend(path);
    full.push(y);
    let cert = LinearForestCertificate {
        d: d.get(),
        paths: vec![full],
        terminals: vec![x, y],
        matching_edges: m.edges().iter().map(|e| e.endpoints()).collect(),
        avoided: vec![],
    };
    check_forest(&cert)
        .map_err(|v| Error::Malformed(format!("constructed path fails validation: {v}")))?;
    guarantee!(cert.paths[0].len() == 1usize << d.get(), "path must visit every vertex");
    Ok(LaceOutcome::Path(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Dimension;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(n: u8) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn random_perfect(n: u8, rng: &mut ChaCha8Rng) -> Matching {
        let dd = d(n);
        let mut verts: Vec<Vertex> = dd.vertices().collect();
        verts.shuffle(rng);
        let edges: Vec<Edge> = verts
            .chunks_exact(2)
            .map(|c| Edge::new(c[0], c[1]).unwrap())
            .collect();
        Matching::from_edges(dd, &edges).unwrap()
    }

    fn random_partial(n: u8, pairs: usize, rng: &mut ChaCha8Rng) -> Matching {
        let dd = d(n);
        let mut verts: Vec<Vertex> = dd.vertices().collect();
        verts.shuffle(rng);
        let edges: Vec<Edge> = verts
            .chunks_exact(2)
            .take(pairs)
            .map(|c| Edge::new(c[0], c[1]).unwrap())
            .collect();
        Matching::from_edges(dd, &edges).unwrap()
    }

    #[test]
    fn four_crossing_blocking_pairs_both_missing_edges() {
        // A single blocked direction with only four crossing edges forces
        // blocking both missing layer edges at once. The configuration
        // cannot arise at the top level of a valid run: six of the eight
        // layer edges would have to cross the blocked direction, outweighing
        // the chosen direction under the maximal-cut rule. The branch is
        // therefore pinned directly against the post-surgery state.
        let e = |a, b| Edge::new(a, b).unwrap();
        let n = Matching::from_edges(d(6), &[e(4, 5), e(6, 7), e(8, 9), e(10, 11)]).unwrap();
        let obs = vec![(2u8, vec![e(5, 7), e(9, 11)])];
        let forced = forced_pairs(&n, 1, 3, &obs, 4, 6).unwrap();
        assert_eq!(forced, vec![e(4, 6), e(8, 10)]);
        // With six or more crossings only the first missing edge is blocked.
        let one = forced_pairs(&n, 1, 3, &obs, 6, 6).unwrap();
        assert_eq!(one, vec![e(4, 6)]);
    }

    #[test]
    fn fink_forced_square() {
        let m = Matching::from_edges(
            d(2),
            &[Edge::new(0b00, 0b01).unwrap(), Edge::new(0b10, 0b11).unwrap()],
        )
        .unwrap();
        let c = fink_extend_perfect(&m).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn fink_both_long() {
        let m = Matching::from_edges(
            d(2),
            &[Edge::new(0b00, 0b11).unwrap(), Edge::new(0b01, 0b10).unwrap()],
        )
        .unwrap();
        let c = fink_extend_perfect(&m).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn fink_random_perfect_matchings() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 4..=6u8 {
            for _ in 0..5 {
                let m = random_perfect(n, &mut rng);
                let c = fink_extend_perfect(&m).unwrap();
                assert!(c.is_hamiltonian());
            }
        }
    }

    #[test]
    fn fink_rejects_imperfect() {
        let m = Matching::new(d(3));
        assert!(fink_extend_perfect(&m).is_err());
    }

    #[test]
    fn triangle_through_long_edge() {
        let m = Matching::from_edges(d(2), &[Edge::new(0b00, 0b11).unwrap()]).unwrap();
        let ext = extend_to_cycle(&m).unwrap();
        assert_eq!(ext.certificate.len(), 3);
    }

    #[test]
    fn empty_d5_extends() {
        let ext = extend_to_cycle(&Matching::new(d(5))).unwrap();
        assert!(ext.certificate.len() >= 3);
    }

    #[test]
    fn random_d5_matchings_extend() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pairs = rng.gen_range(1..=15);
            let m = random_partial(5, pairs, &mut rng);
            let ext = extend_to_cycle(&m).unwrap();
            assert!(ext.certificate.len() >= 2 * m.edge_count());
        }
    }

    #[test]
    fn random_d6_matchings_extend() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let pairs = rng.gen_range(1..=31);
            let m = random_partial(6, pairs, &mut rng);
            let ext = extend_to_cycle(&m).unwrap();
            assert!(ext.certificate.len() >= 2 * m.edge_count());
        }
    }

    #[test]
    fn avoid_empty_d5() {
        match extend_avoiding(&Matching::new(d(5)), 0).unwrap() {
            AvoidOutcome::Cycle(ext) => {
                assert!(!ext.certificate.vertices.contains(&0));
            }
            AvoidOutcome::HViolated(_) => panic!("empty matching satisfies the condition"),
        }
    }

    #[test]
    fn avoid_empty_d6_runs_induction() {
        match extend_avoiding(&Matching::new(d(6)), 5).unwrap() {
            AvoidOutcome::Cycle(ext) => {
                assert!(!ext.certificate.vertices.contains(&5));
                assert!(!ext.trace.levels.is_empty());
                assert_eq!(ext.trace.levels[0].dimension, 6);
            }
            AvoidOutcome::HViolated(_) => panic!("empty matching satisfies the condition"),
        }
    }

    #[test]
    fn violating_instance_reports() {
        let m = crate::property_h::violating_matching(d(5)).unwrap();
        match extend_avoiding(&m, 0).unwrap() {
            AvoidOutcome::HViolated(report) => {
                assert!(!report.satisfied);
                assert_eq!(report.witnesses[0].direction, 1);
            }
            AvoidOutcome::Cycle(_) => panic!("construction must report the violation"),
        }
    }

    #[test]
    fn avoid_random_d6_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut done = 0;
        while done < 4 {
            let pairs = rng.gen_range(4..=20);
            let m = random_partial(6, pairs, &mut rng);
            if m.is_covered(0) || !check_property_h(&m, 0).unwrap().satisfied {
                continue;
            }
            match extend_avoiding(&m, 0).unwrap() {
                AvoidOutcome::Cycle(ext) => {
                    assert!(!ext.certificate.vertices.contains(&0));
                }
                AvoidOutcome::HViolated(_) => panic!("condition was checked beforehand"),
            }
            done += 1;
        }
    }

    #[test]
    fn covered_forbidden_vertex_rejected() {
        let m = Matching::from_edges(d(5), &[Edge::new(0, 7).unwrap()]).unwrap();
        assert!(matches!(extend_avoiding(&m, 0), Err(Error::ForbiddenCovered(0))));
    }

    #[test]
    fn long_cycle_bounds_small() {
        let ext = long_cycle_qd(&Matching::new(d(2))).unwrap();
        assert!(ext.certificate.len() >= 3);
        let ext = long_cycle_qd(&Matching::new(d(5))).unwrap();
        assert!(ext.certificate.len() >= 22);
        let ext = long_cycle_kqd(&Matching::new(d(4))).unwrap();
        assert!(ext.certificate.len() >= 8);
    }

    #[test]
    fn long_cycle_rejects_long_edges() {
        let m = Matching::from_edges(d(3), &[Edge::new(0, 0b011).unwrap()]).unwrap();
        assert!(long_cycle_qd(&m).is_err());
        assert!(long_cycle_kqd(&m).is_ok());
    }

    fn laceable_instance(n: u8, x: Vertex, y: Vertex, rng: &mut ChaCha8Rng) -> Matching {
        // Perfect matching on all vertices except x and y without any
        // half-layer: random long-ish pairing, retried until clean.
        let dd = d(n);
        loop {
            let mut verts: Vec<Vertex> =
                dd.vertices().filter(|&v| v != x && v != y).collect();
            verts.shuffle(rng);
            let edges: Vec<Edge> = verts
                .chunks_exact(2)
                .map(|c| Edge::new(c[0], c[1]).unwrap())
                .collect();
            let m = Matching::from_edges(dd, &edges).unwrap();
            if find_layers(&m, &[LayerKind::Half]).is_empty() {
                return m;
            }
        }
    }

    #[test]
    fn lace_cycle_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (x, y) = (0, 1);
        let m = laceable_instance(5, x, y, &mut rng);
        match hamlace_cycle(&m, x, y).unwrap() {
            LaceOutcome::Cycle(c) => assert_eq!(c.len(), 30),
            _ => panic!("half-layer-free instance must yield a cycle"),
        }
    }

    #[test]
    fn lace_cycle_half_layer_witness() {
        // Perfect matching on V - {0, 1} containing the direction-1 odd
        // half-layer away from 0 and 1.
        let dd = d(5);
        let mut edges: Vec<Edge> = dd
            .vertices()
            .filter(|&u| side(u, 1) == 0 && parity(u) == 1 && u != 1)
            .map(|u| Edge::new(u, flip(u, 1)).unwrap())
            .collect();
        // Direction-2 edges on the rest keep it perfect: the remaining
        // vertices are those of even parity (minus 0) and the pair {1, 1^1};
        // 1 and 0 stay out. Pair leftovers greedily with long edges.
        let mut m = Matching::from_edges(dd, &edges).unwrap();
        let mut free: Vec<Vertex> = dd
            .vertices()
            .filter(|&v| !m.is_covered(v) && v != 0 && v != 1)
            .collect();
        // Evens and odds separately to keep the half-layer unique.
        free.sort_unstable();
        let evens: Vec<Vertex> = free.iter().copied().filter(|&v| parity(v) == 0).collect();
        let odds: Vec<Vertex> = free.iter().copied().filter(|&v| parity(v) == 1).collect();
        for pair in evens.chunks_exact(2) {
            m.add_edge(Edge::new(pair[0], pair[1]).unwrap()).unwrap();
        }
        for pair in odds.chunks_exact(2) {
            m.add_edge(Edge::new(pair[0], pair[1]).unwrap()).unwrap();
        }
        // Odd counts leave one vertex of each parity; join them.
        if evens.len() % 2 == 1 {
            m.add_edge(Edge::new(evens[evens.len() - 1], odds[odds.len() - 1]).unwrap())
                .unwrap();
        }
        edges.clear();
        assert_eq!(m.uncovered_vertices(), vec![0, 1]);
        match hamlace_cycle(&m, 0, 1).unwrap() {
            LaceOutcome::HalfLayerPresent(h) => assert!(!h.is_empty()),
            _ => panic!("planted half-layer must be reported"),
        }
    }

    #[test]
    fn lace_cycle_parity_rejected() {
        let m = Matching::new(d(5));
        assert!(hamlace_cycle(&m, 0, 3).is_err());
    }

    #[test]
    fn lace_path_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..3 {
            let m = random_perfect(5, &mut rng);
            let x = 0;
            // Pick an odd y not matched to x.
            let y = d(5)
                .vertices()
                .find(|&v| parity(v) == 1 && m.partner(x) != Some(v))
                .unwrap();
            match hamlace_path(&m, x, y).unwrap() {
                LaceOutcome::Path(p) => {
                    assert_eq!(p.paths[0].len(), 32);
                    assert_eq!(*p.paths[0].first().unwrap(), x);
                    assert_eq!(*p.paths[0].last().unwrap(), y);
                }
                LaceOutcome::HalfLayerPresent(_) => {
                    // Possible for unlucky pairings; acceptable outcome.
                }
                LaceOutcome::Cycle(_) => panic!("path construction cannot return a cycle"),
            }
        }
    }

    #[test]
    fn lace_path_degenerate_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = random_perfect(5, &mut rng);
        let x = 0;
        let y = m.partner(x).unwrap();
        if parity(y) == 1 {
            assert!(hamlace_path(&m, x, y).is_err());
        }
    }

    #[test]
    fn trace_serializes() {
        match extend_avoiding(&Matching::new(d(6)), 0).unwrap() {
            AvoidOutcome::Cycle(ext) => {
                let json = serde_json::to_string(&ext.trace).unwrap();
                assert!(json.contains("dimension"));
            }
            AvoidOutcome::HViolated(_) => unreachable!(),
        }
    }
}
