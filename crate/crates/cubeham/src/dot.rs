//! DOT rendering of matchings and certificates, plus a minimal validating
//! parser used by the tests so that emitted graphs are checked against an
//! in-repo grammar rather than an external tool.
//!
//! Matching edges are drawn bold and colored; cycle or path edges supplied
//! by the extension are thin. Vertices are labeled with their bit strings.

use crate::certificate::{CycleCertificate, LinearForestCertificate};
use crate::cube::Vertex;
use crate::error::{Error, Result};
use crate::matching::Matching;
use std::collections::BTreeSet;
use std::fmt::Write as _;

const MATCHING_STYLE: &str = "[style=bold, color=\"#1f77b4\"]";
const CYCLE_STYLE: &str = "[color=\"#999999\"]";

fn label(v: Vertex, d: u8) -> String {
    (0..d).rev().map(|b| if v >> b & 1 == 1 { '1' } else { '0' }).collect()
}

fn node_line(out: &mut String, v: Vertex, d: u8) {
    let _ = writeln!(out, "  v{v} [label=\"{}\"];", label(v, d));
}

fn edge_line(out: &mut String, u: Vertex, v: Vertex, style: &str) {
    let _ = writeln!(out, "  v{u} -- v{v} {style};");
}

/// Render the matching alone: its edges bold, all cube vertices present.
pub fn matching_to_dot(m: &Matching) -> String {
    let d = m.dimension();
    let mut out = String::from("graph matching {\n");
    for v in d.vertices() {
        node_line(&mut out, v, d.get());
    }
    for e in m.edges() {
        let (u, v) = e.endpoints();
        edge_line(&mut out, u, v, MATCHING_STYLE);
    }
    out.push_str("}\n");
    out
}

fn render_sequences(
    name: &str,
    d: u8,
    sequences: &[&[Vertex]],
    close: bool,
    matching_edges: &[(Vertex, Vertex)],
) -> String {
    let matched: BTreeSet<(Vertex, Vertex)> = matching_edges
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    let mut out = format!("graph {name} {{\n");
    let mut nodes: BTreeSet<Vertex> = BTreeSet::new();
    for seq in sequences {
        nodes.extend(seq.iter().copied());
    }
    for &v in &nodes {
        node_line(&mut out, v, d);
    }
    for seq in sequences {
        let hops = seq.len() - if close { 0 } else { 1 };
        for k in 0..hops {
            let u = seq[k];
            let v = seq[(k + 1) % seq.len()];
            let style = if matched.contains(&(u.min(v), u.max(v))) {
                MATCHING_STYLE
            } else {
                CYCLE_STYLE
            };
            edge_line(&mut out, u, v, style);
        }
    }
    out.push_str("}\n");
    out
}

/// Render the cycle with the extended matching's edges styled distinctly.
pub fn cycle_to_dot(cert: &CycleCertificate) -> String {
    render_sequences("cycle", cert.d, &[&cert.vertices], true, &cert.matching_edges)
}

/// Render the linear forest, one chain per path.
pub fn forest_to_dot(cert: &LinearForestCertificate) -> String {
    let seqs: Vec<&[Vertex]> = cert.paths.iter().map(|p| p.as_slice()).collect();
    render_sequences("forest", cert.d, &seqs, false, &cert.matching_edges)
}

/// What the validator extracted from a DOT document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotSummary {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
}

/// Validate a document against the fragment of the DOT grammar this module
/// emits: `graph NAME { stmt* }` where each statement is a node line
/// `ID [attrs];` or an edge line `ID -- ID [attrs];`, with quoted strings
/// allowed inside attribute lists.
pub fn validate_dot(src: &str) -> Result<DotSummary> {
    let mut toks = tokenize(src)?;
    toks.reverse(); // pop() from the front
    expect(&mut toks, "graph")?;
    let name = ident(&mut toks)?;
    expect(&mut toks, "{")?;
    let mut nodes = 0usize;
    let mut edges = 0usize;
    let mut declared: BTreeSet<String> = BTreeSet::new();
    loop {
        let t = toks.pop().ok_or_else(|| malformed("unterminated graph body"))?;
        if t == "}" {
            break;
        }
        if !is_ident(&t) {
            return Err(malformed(format!("expected an identifier, found {t:?}")));
        }
        let next = toks.last().cloned().ok_or_else(|| malformed("truncated statement"))?;
        if next == "--" {
            toks.pop();
            let other = ident(&mut toks)?;
            for id in [&t, &other] {
                if !declared.contains(id.as_str()) {
                    return Err(malformed(format!("edge uses undeclared node {id}")));
                }
            }
            maybe_attrs(&mut toks)?;
            expect(&mut toks, ";")?;
            edges += 1;
        } else {
            maybe_attrs(&mut toks)?;
            expect(&mut toks, ";")?;
            if !declared.insert(t) {
                return Err(malformed("node declared twice"));
            }
            nodes += 1;
        }
    }
    if let Some(t) = toks.pop() {
        return Err(malformed(format!("trailing token {t:?}")));
    }
    Ok(DotSummary { name, nodes, edges })
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(format!("dot: {}", msg.into()))
}

fn tokenize(src: &str) -> Result<Vec<String>> {
    let mut toks = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '}' | ';' | '[' | ']' | '=' | ',' => {
                chars.next();
                toks.push(c.to_string());
            }
            '-' => {
                chars.next();
                if chars.next_if_eq(&'-').is_some() {
                    toks.push("--".into());
                } else {
                    return Err(malformed("lone '-'"));
                }
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err(malformed("unterminated string")),
                    }
                }
                s.push('"');
                toks.push(s);
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '#' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '#' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(s);
            }
            other => return Err(malformed(format!("unexpected character {other:?}"))),
        }
    }
    Ok(toks)
}

fn is_ident(t: &str) -> bool {
    !t.is_empty()
        && t.chars().next().map(|c| c.is_ascii_alphabetic() || c == '_').unwrap_or(false)
        && t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn expect(toks: &mut Vec<String>, want: &str) -> Result<()> {
    match toks.pop() {
        Some(t) if t == want => Ok(()),
        Some(t) => Err(malformed(format!("expected {want:?}, found {t:?}"))),
        None => Err(malformed(format!("expected {want:?}, found end of input"))),
    }
}

fn ident(toks: &mut Vec<String>) -> Result<String> {
    match toks.pop() {
        Some(t) if is_ident(&t) => Ok(t),
        Some(t) => Err(malformed(format!("expected an identifier, found {t:?}"))),
        None => Err(malformed("expected an identifier, found end of input")),
    }
}

/// Accept an optional `[k=v, ..]` attribute list; values may be quoted.
fn maybe_attrs(toks: &mut Vec<String>) -> Result<()> {
    if toks.last().map(|t| t == "[") != Some(true) {
        return Ok(());
    }
    toks.pop();
    loop {
        let key = ident(toks)?;
        let _ = key;
        expect(toks, "=")?;
        match toks.pop() {
            Some(t) if t == "]" || t == "," || t == ";" => {
                return Err(malformed("attribute without a value"))
            }
            Some(_) => {}
            None => return Err(malformed("truncated attribute list")),
        }
        match toks.pop() {
            Some(t) if t == "," => continue,
            Some(t) if t == "]" => return Ok(()),
            other => return Err(malformed(format!("bad attribute separator: {other:?}"))),
        }
    }
}
