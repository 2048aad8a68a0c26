//! Seeded instance families for the test harness and the CLI.
//!
//! All randomness flows through a ChaCha8 generator seeded with a caller
//! supplied 64-bit value, so every instance is reproducible across
//! platforms. Each family re-checks its defining predicate before
//! returning.

use crate::cube::{flip, parity, Dimension, Edge, Vertex};
use crate::error::{Error, Result};
use crate::layers::{find_layers, half_layer_edges, LayerKind};
use crate::matching::Matching;
use crate::property_h::{check_property_h, is_h_maximal, violating_matching};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// The deterministic generator behind every instance family.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InstanceKind {
    /// Random matching of the complete graph on cube vertices.
    UniformKqd,
    /// Random matching using cube edges only.
    UniformQd,
    /// Random perfect matching of the complete graph.
    PerfectKqd,
    /// Random matching leaving vertex 0 free and satisfying the avoidance
    /// condition with respect to it.
    HSatisfying,
    /// Random matching guaranteed to contain at least one half-layer.
    HalfLayerPlanted,
    /// Perfect matching on the even-parity class.
    ParityClass,
    /// Perfect matching on all vertices but two of opposite parity.
    Hamlace,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 7] = [
        InstanceKind::UniformKqd,
        InstanceKind::UniformQd,
        InstanceKind::PerfectKqd,
        InstanceKind::HSatisfying,
        InstanceKind::HalfLayerPlanted,
        InstanceKind::ParityClass,
        InstanceKind::Hamlace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::UniformKqd => "uniform_kqd",
            InstanceKind::UniformQd => "uniform_qd",
            InstanceKind::PerfectKqd => "perfect_kqd",
            InstanceKind::HSatisfying => "h_satisfying",
            InstanceKind::HalfLayerPlanted => "half_layer_planted",
            InstanceKind::ParityClass => "parity_class",
            InstanceKind::Hamlace => "hamlace",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown instance kind: {s}")))
    }
}

/// A generated instance: the matching plus the extra data some families
/// carry (a vertex to avoid, or the two prescribed path ends).
#[derive(Clone, Debug)]
pub struct Instance {
    pub matching: Matching,
    pub avoid: Option<Vertex>,
    pub ends: Option<(Vertex, Vertex)>,
}

impl Instance {
    fn plain(m: Matching) -> Self {
        Instance { matching: m, avoid: None, ends: None }
    }
}

pub fn gen_instance(kind: InstanceKind, d: Dimension, seed: u64) -> Result<Instance> {
    let mut rng = seeded_rng(seed);
    match kind {
        InstanceKind::UniformKqd => Ok(Instance::plain(uniform_kqd(d, &mut rng)?)),
        InstanceKind::UniformQd => Ok(Instance::plain(uniform_qd(d, &mut rng)?)),
        InstanceKind::PerfectKqd => Ok(Instance::plain(perfect_kqd(d, &mut rng)?)),
        InstanceKind::HSatisfying => {
            let m = h_satisfying(d, &mut rng)?;
            Ok(Instance { matching: m, avoid: Some(0), ends: None })
        }
        InstanceKind::HalfLayerPlanted => Ok(Instance::plain(half_layer_planted(d, &mut rng)?)),
        InstanceKind::ParityClass => Ok(Instance::plain(parity_class(d, &mut rng)?)),
        InstanceKind::Hamlace => {
            let (m, x, y) = hamlace(d, &mut rng)?;
            Ok(Instance { matching: m, avoid: None, ends: Some((x, y)) })
        }
    }
}

/// Random matching with exactly `pairs` edges on the vertices outside
/// `skip`, drawn by shuffling and pairing a prefix.
pub fn random_matching(
    d: Dimension,
    pairs: usize,
    skip: &[Vertex],
    rng: &mut ChaCha8Rng,
) -> Result<Matching> {
    let mut verts: Vec<Vertex> = d.vertices().filter(|v| !skip.contains(v)).collect();
    if 2 * pairs > verts.len() {
        return Err(Error::precondition("requested more pairs than available vertices"));
    }
    verts.shuffle(rng);
    let edges: Vec<Edge> = verts[..2 * pairs]
        .chunks_exact(2)
        .map(|c| Edge::new(c[0], c[1]))
        .collect::<Result<_>>()?;
    Matching::from_edges(d, &edges)
}

pub fn uniform_kqd(d: Dimension, rng: &mut ChaCha8Rng) -> Result<Matching> {
    let max = d.vertex_count() / 2;
    let pairs = rng.gen_range(0..=max);
    random_matching(d, pairs, &[], rng)
}

/// Random matching of cube edges: repeatedly pick an uncovered vertex and a
/// random uncovered neighbor, stopping after a drawn target size.
pub fn uniform_qd(d: Dimension, rng: &mut ChaCha8Rng) -> Result<Matching> {
    let mut order: Vec<Vertex> = d.vertices().collect();
    order.shuffle(rng);
    let target = rng.gen_range(0..=d.vertex_count() / 2);
    let mut m = Matching::new(d);
    for u in order {
        if m.edge_count() >= target {
            break;
        }
        if m.is_covered(u) {
            continue;
        }
        let mut dirs: Vec<u8> = d.directions().collect();
        dirs.shuffle(rng);
        if let Some(i) = dirs.into_iter().find(|&i| !m.is_covered(flip(u, i))) {
            m.add_edge(Edge::new(u, flip(u, i))?)?;
        }
    }
    debug_assert!(m.is_subgraph_of_qd());
    Ok(m)
}

pub fn perfect_kqd(d: Dimension, rng: &mut ChaCha8Rng) -> Result<Matching> {
    random_matching(d, d.vertex_count() / 2, &[], rng)
}

/// Random matching leaving 0 uncovered and satisfying the avoidance
/// condition for it; rejection-sampled, which terminates fast because full
/// half-layers are rare.
pub fn h_satisfying(d: Dimension, rng: &mut ChaCha8Rng) -> Result<Matching> {
    let max = d.vertex_count() / 2 - 1;
    for _ in 0..10_000 {
        let pairs = rng.gen_range(0..=max);
        let m = random_matching(d, pairs, &[0], rng)?;
        if check_property_h(&m, 0)?.satisfied {
            return Ok(m);
        }
    }
    Err(Error::Malformed("rejection sampling failed to find a conforming matching".into()))
}

/// A matching violating the avoidance condition for a random vertex z,
/// produced by permuting directions and translating the canonical violating
/// construction.
pub fn h_violating(d: Dimension, rng: &mut ChaCha8Rng) -> Result<(Matching, Vertex)> {
    let base = violating_matching(d)?;
    let mut perm: Vec<u8> = (0..d.get()).collect();
    perm.shuffle(rng);
    let t: Vertex = rng.gen_range(0..d.vertex_count() as Vertex);
    let m = base.permute_directions(&perm).translate(t);
    let z = t;
    debug_assert!(!check_property_h(&m, z)?.satisfied);
    Ok((m, z))
}

/// A random half-layer plus a random matching on some of the remaining
/// vertices; always contains at least one half-layer.
pub fn half_layer_planted(d: Dimension, rng: &mut ChaCha8Rng) -> Result<Matching> {
    let i = rng.gen_range(1..=d.get());
    let p = rng.gen_range(0..=1u8);
    let mut m = Matching::from_edges(d, &half_layer_edges(d, i, p))?;
    let mut free: Vec<Vertex> = d.vertices().filter(|&v| !m.is_covered(v)).collect();
    free.shuffle(rng);
    let extra = rng.gen_range(0..=free.len() / 2);
    for c in free[..2 * extra].chunks_exact(2) {
        m.add_edge(Edge::new(c[0], c[1])?)?;
    }
    assert!(!find_layers(&m, &[LayerKind::Half]).is_empty());
    Ok(m)
}

/// Random perfect matching on the even-parity class; maximal with 2^{d-2}
/// edges and no cube edges at all.
pub fn parity_class(d: Dimension, rng: &mut ChaCha8Rng) -> Result<Matching> {
    let mut evens: Vec<Vertex> = d.vertices().filter(|&v| parity(v) == 0).collect();
    evens.shuffle(rng);
    let edges: Vec<Edge> = evens
        .chunks_exact(2)
        .map(|c| Edge::new(c[0], c[1]))
        .collect::<Result<_>>()?;
    let m = Matching::from_edges(d, &edges)?;
    debug_assert!(m.is_maximal());
    Ok(m)
}

/// Perfect matching on all vertices except a random opposite-parity pair
/// (x, y), rejection-sampled until no half-layer is present.
pub fn hamlace(d: Dimension, rng: &mut ChaCha8Rng) -> Result<(Matching, Vertex, Vertex)> {
    if d.get() < 5 {
        return Err(Error::precondition("laceability instances need d >= 5"));
    }
    for _ in 0..10_000 {
        let mut x: Vertex = rng.gen_range(0..d.vertex_count() as Vertex);
        if parity(x) == 1 {
            x = flip(x, 1);
        }
        let mut y: Vertex = rng.gen_range(0..d.vertex_count() as Vertex);
        if parity(y) == 0 {
            y = flip(y, 1);
        }
        let m = random_matching(d, d.vertex_count() / 2 - 1, &[x, y], rng)?;
        if find_layers(&m, &[LayerKind::Half]).is_empty() {
            return Ok((m, x, y));
        }
    }
    Err(Error::Malformed("rejection sampling failed to find a layer-free pairing".into()))
}

/// Like `hamlace`, but with a planted half-layer, so the laceability check
/// must return the negative verdict.
pub fn hamlace_blocked(d: Dimension, rng: &mut ChaCha8Rng) -> Result<(Matching, Vertex, Vertex)> {
    if d.get() < 5 {
        return Err(Error::precondition("laceability instances need d >= 5"));
    }
    for _ in 0..10_000 {
        let i = rng.gen_range(1..=d.get());
        let p = rng.gen_range(0..=1u8);
        let layer = half_layer_edges(d, i, p);
        let mut m = Matching::from_edges(d, &layer)?;
        let mut free: Vec<Vertex> = d.vertices().filter(|&v| !m.is_covered(v)).collect();
        free.shuffle(rng);
        let x = free.iter().copied().find(|&v| parity(v) == 0);
        let y = free.iter().copied().find(|&v| parity(v) == 1);
        let (Some(x), Some(y)) = (x, y) else { continue };
        free.retain(|&v| v != x && v != y);
        let evens: Vec<Vertex> = free.iter().copied().filter(|&v| parity(v) == 0).collect();
        let odds: Vec<Vertex> = free.iter().copied().filter(|&v| parity(v) == 1).collect();
        for c in evens.chunks_exact(2).chain(odds.chunks_exact(2)) {
            m.add_edge(Edge::new(c[0], c[1])?)?;
        }
        // Counts of each parity can be odd; join the two leftovers.
        if evens.len() % 2 == 1 {
            m.add_edge(Edge::new(evens[evens.len() - 1], odds[odds.len() - 1])?)?;
        }
        let uncovered = m.uncovered_vertices();
        let mut want = vec![x, y];
        want.sort_unstable();
        if uncovered == want && !find_layers(&m, &[LayerKind::Half]).is_empty() {
            return Ok((m, x, y));
        }
    }
    Err(Error::Malformed("failed to plant a blocking half-layer".into()))
}

// ---------------------------------------------------------------------------
// Deterministic branch-coverage instances (d = 6, avoided vertex 0)

/// Which branch of the odd-cut induction a coverage instance steers into.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoverageTarget {
    /// Two free even-side vertices whose across-neighbors are matched back
    /// into the same side.
    InwardPartners,
    /// The across-neighbor of the chosen vertex is itself uncovered.
    UncoveredAcross,
    /// A free vertex whose across-neighbor is matched within the far side.
    MatchedAcross,
    /// One far-side direction whose layer completion must be blocked.
    BlockedDirection,
    /// Two far-side directions whose layer completions must be blocked.
    BlockedDirectionPair,
}

impl CoverageTarget {
    pub const ALL: [CoverageTarget; 5] = [
        CoverageTarget::InwardPartners,
        CoverageTarget::UncoveredAcross,
        CoverageTarget::MatchedAcross,
        CoverageTarget::BlockedDirection,
        CoverageTarget::BlockedDirectionPair,
    ];
}

fn d6() -> Dimension {
    Dimension::new(6).unwrap()
}

/// Direction-1 cube edges `(x, x ^ 1)` for every odd `x` outside `skip`.
fn straight_cover(skip: &[Vertex]) -> Vec<Edge> {
    d6()
        .vertices()
        .filter(|&x| x & 1 == 1 && !skip.contains(&x))
        .map(|x| Edge::new(x, x ^ 1).unwrap())
        .collect()
}

/// Hand-built matchings of K(Q_6), each steering the avoidance induction
/// (with forbidden vertex 0) into one specific sub-case at the top level.
/// The expected free-vertex sets are asserted, as are the avoidance
/// condition and its maximality, so a drifting constant fails loudly here
/// rather than as a silent coverage gap.
pub fn coverage_instance(target: CoverageTarget) -> Result<(Matching, Vertex)> {
    let d = d6();
    let (mut edges, uncovered): (Vec<Edge>, Vec<Vertex>) = match target {
        CoverageTarget::InwardPartners => {
            // 2 and 8 free; their across-neighbors 3 and 9 matched into the
            // even side; everything else covered straight across.
            let mut e = vec![
                Edge::new(3, 4)?,
                Edge::new(9, 12)?,
                Edge::new(1, 5)?,
                Edge::new(13, 62)?,
            ];
            e.extend(straight_cover(&[1, 3, 5, 9, 13, 63]));
            (e, vec![0, 2, 8, 63])
        }
        CoverageTarget::UncoveredAcross => {
            // 3 free, 2 covered by a long crossing edge: the chosen vertex
            // is 2 and its across-neighbor 3 stays free.
            let mut e = vec![Edge::new(1, 2)?];
            e.extend(straight_cover(&[1, 3]));
            (e, vec![0, 3])
        }
        CoverageTarget::MatchedAcross => {
            // 2 free, its across-neighbor 3 matched within the odd side.
            let mut e = vec![Edge::new(3, 33)?, Edge::new(1, 62)?];
            e.extend(straight_cover(&[1, 3, 33, 63]));
            (e, vec![0, 2, 32, 63])
        }
        CoverageTarget::BlockedDirection => {
            // Side 1 of direction 1 misses a full direction-2 half-layer
            // whose vertices are all matched straight across, so the far
            // side could complete it; one direction must be blocked.
            let bases = [5, 9, 17, 29, 33, 45, 53, 57];
            let mut e: Vec<Edge> = bases
                .iter()
                .flat_map(|&b| [Edge::new(b, b ^ 1).unwrap(), Edge::new(b + 2, b + 1).unwrap()])
                .collect();
            e.push(Edge::new(2, 27)?);
            e.push(Edge::new(3, 21)?);
            for c in [(1, 25), (37, 41), (49, 61), (15, 23), (39, 43), (51, 63)] {
                e.push(Edge::new(c.0, c.1)?);
            }
            for c in [(12, 20), (36, 40), (48, 60), (14, 22), (26, 38), (42, 50), (24, 62)] {
                e.push(Edge::new(c.0, c.1)?);
            }
            (e, vec![0, 13])
        }
        CoverageTarget::BlockedDirectionPair => {
            // Two missing half-layers (directions 2 and 3) with all of
            // their vertices matched straight across.
            let l2: Vec<Vertex> =
                [5, 9, 17, 29, 33, 45, 53, 57].iter().flat_map(|&b| [b, b + 2]).collect();
            let l3: Vec<Vertex> =
                [1, 11, 19, 25, 35, 41, 49, 59].iter().flat_map(|&b| [b, b + 4]).collect();
            let mut union: Vec<Vertex> = l2.iter().chain(l3.iter()).copied().collect();
            union.sort_unstable();
            union.dedup();
            let mut e: Vec<Edge> = union
                .iter()
                .filter(|&&x| x != 1)
                .map(|&x| Edge::new(x, x ^ 1).unwrap())
                .collect();
            e.push(Edge::new(1, 20)?);
            e.push(Edge::new(2, 27)?);
            for c in [(3, 21), (37, 61), (43, 51), (12, 36), (26, 50), (42, 60)] {
                e.push(Edge::new(c.0, c.1)?);
            }
            (e, vec![0, 13])
        }
    };
    edges.sort_unstable_by_key(|e| e.endpoints());
    let m = Matching::from_edges(d, &edges)?;
    assert_eq!(m.uncovered_vertices(), uncovered, "coverage instance free set drifted");
    assert!(check_property_h(&m, 0)?.satisfied);
    assert!(is_h_maximal(&m, 0)?);
    assert!(m.cut(1) % 2 == 1, "coverage instances need an odd direction-1 cut");
    Ok((m, 0))
}
