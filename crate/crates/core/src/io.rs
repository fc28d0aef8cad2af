//! Instance files and result rendering.
//!
//! Text instances are line oriented; `#` starts a comment.
//!
//! ```text
//! multicut 1
//! vertices 3
//! edge ab 0 1 1
//! edge bc 1 2 2
//! edge ca 2 0 3
//! rotation 0 ab+ ca-
//! rotation 1 bc+ ab-
//! rotation 2 ca+ bc-
//! terminals 0 1
//! pair 0 1
//! ```
//!
//! `edge <name> <tail> <head> <weight> [twisted]` declares an edge; its dart
//! at the tail is `<name>+` and at the head `<name>-`. Every vertex has one
//! `rotation` line listing its darts in cyclic order. The same fields are
//! accepted as JSON (see [`InstanceFile`]).

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::embed::{Dart, Edge, EmbeddedGraph, VertexId, Weight};
use crate::error::{Error, Result};
use crate::solve::{Solution, SolveStats};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub name: String,
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: Weight,
    #[serde(default)]
    pub twisted: bool,
}

/// JSON encoding of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub vertices: usize,
    pub edges: Vec<EdgeRecord>,
    pub rotations: Vec<Vec<String>>,
    #[serde(default)]
    pub terminals: Vec<VertexId>,
    #[serde(default)]
    pub pairs: Vec<(VertexId, VertexId)>,
}

/// Where each piece of an instance came from, for error messages.
#[derive(Default)]
struct Spans {
    edges: Vec<(usize, usize)>,
    rotations: Vec<(usize, usize)>,
    end: (usize, usize),
}

fn parse_err(at: (usize, usize), message: impl Into<String>) -> Error {
    Error::Parse { line: at.0, column: at.1, message: message.into() }
}

/// Reads a text or JSON instance.
pub fn parse_instance(text: &str) -> Result<EmbeddedGraph> {
    if text.trim_start().starts_with('{') {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| parse_err((e.line(), e.column()), e.to_string()))?;
        build(&file, &Spans::default())
    } else {
        let (file, spans) = parse_text(text)?;
        build(&file, &spans)
    }
}

fn parse_text(text: &str) -> Result<(InstanceFile, Spans)> {
    let mut file =
        InstanceFile { version: 0, vertices: 0, edges: vec![], rotations: vec![], terminals: vec![], pairs: vec![] };
    let mut spans = Spans::default();
    let mut rotations: Vec<Option<Vec<String>>> = Vec::new();
    let mut seen_vertices = false;
    let mut last = (1, 1);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut words = Vec::new();
        let mut col = 0;
        for w in line.split_whitespace() {
            col += line[col..].find(w).expect("word of the line");
            words.push((col + 1, w));
            col += w.len();
        }
        last = (i + 1, raw.len() + 1);
        let Some(&(kcol, key)) = words.first() else { continue };
        let at = |j: usize| (i + 1, words.get(j).map_or(raw.len() + 1, |w| w.0));
        let num = |j: usize, field: &str| -> Result<u64> {
            let (c, w) = *words.get(j).ok_or_else(|| parse_err(at(j), format!("{key}: missing {field}")))?;
            w.parse().map_err(|_| parse_err((i + 1, c), format!("{key}: {field} `{w}` is not a nonnegative integer")))
        };
        let arity = |n: usize| -> Result<()> {
            if words.len() > n {
                return Err(parse_err(at(n), format!("{key}: unexpected `{}`", words[n].1)));
            }
            Ok(())
        };
        if file.version == 0 && key != "multicut" {
            return Err(parse_err((i + 1, kcol), "expected the header `multicut <version>`"));
        }
        match key {
            "multicut" => {
                if file.version != 0 {
                    return Err(parse_err((i + 1, kcol), "header repeated"));
                }
                arity(2)?;
                let v = num(1, "version")?;
                if v != u64::from(FORMAT_VERSION) {
                    return Err(parse_err(at(1), format!("multicut: unsupported version {v}")));
                }
                file.version = FORMAT_VERSION;
            }
            "vertices" => {
                if seen_vertices {
                    return Err(parse_err((i + 1, kcol), "vertices: declared twice"));
                }
                arity(2)?;
                file.vertices = num(1, "count")? as usize;
                rotations = vec![None; file.vertices];
                spans.rotations = vec![(0, 0); file.vertices];
                seen_vertices = true;
            }
            "edge" => {
                if words.len() < 5 {
                    return Err(parse_err(at(words.len()), "edge: expected `edge <name> <tail> <head> <weight> [twisted]`"));
                }
                arity(6)?;
                let name = words[1].1;
                if name.ends_with('+') || name.ends_with('-') {
                    return Err(parse_err(at(1), format!("edge: name `{name}` may not end in + or -")));
                }
                if let Some(j) = file.edges.iter().position(|e| e.name == name) {
                    return Err(parse_err(
                        at(1),
                        format!("edge: name `{name}` already used on line {}", spans.edges[j].0),
                    ));
                }
                let twisted = match words.get(5) {
                    None => false,
                    Some((_, "twisted")) => true,
                    Some((_, w)) => return Err(parse_err(at(5), format!("edge: expected `twisted`, found `{w}`"))),
                };
                file.edges.push(EdgeRecord {
                    name: name.to_string(),
                    tail: num(2, "tail")? as usize,
                    head: num(3, "head")? as usize,
                    weight: num(4, "weight")?,
                    twisted,
                });
                spans.edges.push((i + 1, kcol));
            }
            "rotation" => {
                if !seen_vertices {
                    return Err(parse_err((i + 1, kcol), "rotation: vertices must be declared first"));
                }
                let v = num(1, "vertex")? as usize;
                if v >= file.vertices {
                    return Err(parse_err(at(1), format!("rotation: vertex {v} out of range")));
                }
                if rotations[v].is_some() {
                    return Err(parse_err(at(1), format!("rotation: vertex {v} listed twice")));
                }
                rotations[v] = Some(words[2..].iter().map(|w| w.1.to_string()).collect());
                spans.rotations[v] = (i + 1, words.get(2).map_or(kcol, |w| w.0));
            }
            "terminals" => {
                for j in 1..words.len() {
                    file.terminals.push(num(j, "terminal")? as usize);
                }
            }
            "pair" => {
                arity(3)?;
                file.pairs.push((num(1, "first terminal")? as usize, num(2, "second terminal")? as usize));
            }
            _ => return Err(parse_err((i + 1, kcol), format!("unknown field `{key}`"))),
        }
    }
    spans.end = last;
    if file.version == 0 {
        return Err(parse_err(last, "expected the header `multicut <version>`"));
    }
    if !seen_vertices {
        return Err(parse_err(last, "vertices: missing"));
    }
    file.rotations = rotations.into_iter().map(Option::unwrap_or_default).collect();
    Ok((file, spans))
}

/// Converts a parsed file to a map. Dart errors are reported at the
/// rotation (or edge) they concern.
fn build(file: &InstanceFile, spans: &Spans) -> Result<EmbeddedGraph> {
    let span = |v: &[(usize, usize)], i: usize| v.get(i).copied().unwrap_or(spans.end);
    if file.version != FORMAT_VERSION {
        return Err(parse_err(spans.end, format!("version: unsupported version {}", file.version)));
    }
    if file.rotations.len() != file.vertices {
        return Err(parse_err(
            spans.end,
            format!("rotations: expected {} rotations, got {}", file.vertices, file.rotations.len()),
        ));
    }
    let mut names = HashMap::new();
    for (e, rec) in file.edges.iter().enumerate() {
        if names.insert(rec.name.as_str(), e).is_some() {
            return Err(parse_err(span(&spans.edges, e), format!("edge: name `{}` used twice", rec.name)));
        }
        for (field, v) in [("tail", rec.tail), ("head", rec.head)] {
            if v >= file.vertices {
                return Err(parse_err(
                    span(&spans.edges, e),
                    format!("edge {}: {field} {v} out of range", rec.name),
                ));
            }
        }
    }
    let mut rotation: Vec<Vec<Dart>> = Vec::with_capacity(file.vertices);
    let mut listed: Vec<Option<VertexId>> = vec![None; 2 * file.edges.len()];
    for (v, rot) in file.rotations.iter().enumerate() {
        let at = span(&spans.rotations, v);
        let mut darts = Vec::with_capacity(rot.len());
        for name in rot {
            let (edge, end) = name.split_at(name.len().saturating_sub(1));
            let e = names
                .get(edge)
                .copied()
                .filter(|_| end == "+" || end == "-")
                .ok_or_else(|| parse_err(at, format!("rotation {v}: unknown dart `{name}`")))?;
            let d = 2 * e + usize::from(end == "-");
            if let Some(w) = listed[d] {
                return Err(parse_err(at, format!("rotation {v}: dart `{name}` listed twice (also at vertex {w})")));
            }
            listed[d] = Some(v);
            let rec = &file.edges[e];
            let origin = if end == "+" { rec.tail } else { rec.head };
            if origin != v {
                return Err(parse_err(at, format!("rotation {v}: dart `{name}` belongs to vertex {origin}")));
            }
            darts.push(d);
        }
        rotation.push(darts);
    }
    if let Some(d) = listed.iter().position(Option::is_none) {
        let rec = &file.edges[d / 2];
        let sign = if d % 2 == 0 { '+' } else { '-' };
        return Err(parse_err(
            span(&spans.edges, d / 2),
            format!("edge {}: dart `{}{sign}` missing from every rotation", rec.name, rec.name),
        ));
    }
    let edges = file
        .edges
        .iter()
        .map(|r| Edge { tail: r.tail, head: r.head, weight: r.weight, twisted: r.twisted })
        .collect();
    EmbeddedGraph::new(file.vertices, edges, rotation, file.terminals.clone(), file.pairs.clone())
}

fn dart_name(d: Dart) -> String {
    format!("e{}{}", d / 2, if d % 2 == 0 { '+' } else { '-' })
}

/// The instance as a [`InstanceFile`], edges named `e0`, `e1`, ...
pub fn to_file(g: &EmbeddedGraph) -> InstanceFile {
    InstanceFile {
        version: FORMAT_VERSION,
        vertices: g.num_vertices(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeRecord {
                name: format!("e{i}"),
                tail: e.tail,
                head: e.head,
                weight: e.weight,
                twisted: e.twisted,
            })
            .collect(),
        rotations: (0..g.num_vertices()).map(|v| g.rotation(v).iter().map(|&d| dart_name(d)).collect()).collect(),
        terminals: g.terminals().to_vec(),
        pairs: g.pairs().to_vec(),
    }
}

/// Text encoding of an instance, read back by [`parse_instance`].
pub fn write_instance(g: &EmbeddedGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "multicut {FORMAT_VERSION}");
    let _ = writeln!(s, "vertices {}", g.num_vertices());
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(s, "edge e{i} {} {} {}{}", e.tail, e.head, e.weight, if e.twisted { " twisted" } else { "" });
    }
    for v in 0..g.num_vertices() {
        let darts: Vec<String> = g.rotation(v).iter().map(|&d| dart_name(d)).collect();
        let _ = writeln!(s, "rotation {v} {}", darts.join(" "));
    }
    if !g.terminals().is_empty() {
        let ts: Vec<String> = g.terminals().iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "terminals {}", ts.join(" "));
    }
    for (a, b) in g.pairs() {
        let _ = writeln!(s, "pair {a} {b}");
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Dot,
}

#[derive(Serialize)]
struct Record<'a> {
    weight: Weight,
    edges: &'a [usize],
    stats: &'a SolveStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<&'a crate::oracle::Certificate>,
}

/// Result as a JSON record or as DOT of the graph with cut edges marked.
pub fn render_result(g: &EmbeddedGraph, sol: &Solution, format: Format) -> String {
    match format {
        Format::Json => {
            let rec = Record {
                weight: sol.result.weight,
                edges: &sol.result.edges,
                stats: &sol.stats,
                certificate: sol.result.certificate.as_ref(),
            };
            let mut s = serde_json::to_string_pretty(&rec).expect("plain data serialises");
            s.push('\n');
            s
        }
        Format::Dot => render_dot(g, &sol.result.edges, sol.result.weight),
    }
}

fn render_dot(g: &EmbeddedGraph, cut: &[usize], weight: Weight) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph multicut {{");
    let _ = writeln!(s, "  label=\"weight {weight}\";");
    for v in 0..g.num_vertices() {
        if g.terminals().contains(&v) {
            let _ = writeln!(s, "  {v} [shape=doublecircle];");
        } else {
            let _ = writeln!(s, "  {v};");
        }
    }
    for (i, e) in g.edges().iter().enumerate() {
        let style = if cut.binary_search(&i).is_ok() { ", color=red, style=dashed, penwidth=2" } else { "" };
        let _ = writeln!(s, "  {} -- {} [label=\"e{i}:{}\"{style}];", e.tail, e.head, e.weight);
    }
    for (a, b) in g.pairs() {
        let _ = writeln!(s, "  {a} -- {b} [style=dotted, constraint=false];");
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "multicut 1
vertices 3
edge ab 0 1 1
edge bc 1 2 2
edge ca 2 0 3
rotation 0 ab+ ca-
rotation 1 bc+ ab-
rotation 2 ca+ bc-
terminals 0 1
pair 0 1
";

    fn message(e: Error) -> (usize, usize, String) {
        match e {
            Error::Parse { line, column, message } => (line, column, message),
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn minimal_instance_round_trips() {
        let g = parse_instance("multicut 1\nvertices 2\nedge a 0 1 5\nrotation 0 a+\nrotation 1 a-\n").unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.weight(0)), (2, 1, 5));
        assert_eq!(parse_instance(&write_instance(&g)).unwrap(), g);
        let json = serde_json::to_string(&to_file(&g)).unwrap();
        assert_eq!(parse_instance(&json).unwrap(), g);
    }

    #[test]
    fn triangle_parses() {
        let g = parse_instance(TRIANGLE).unwrap();
        assert_eq!(g.pairs(), &[(0, 1)]);
        assert_eq!(crate::trace_faces(&g).unwrap().euler_genus, 0);
    }

    #[test]
    fn dart_listed_twice_is_named() {
        let text = TRIANGLE.replace("rotation 2 ca+ bc-", "rotation 2 ca+ bc- ca+");
        let (line, _, msg) = message(parse_instance(&text).unwrap_err());
        assert_eq!(line, 8);
        assert!(msg.contains("`ca+`") && msg.contains("twice"), "{msg}");
    }

    #[test]
    fn errors_carry_positions() {
        let (line, col, msg) = message(parse_instance(&TRIANGLE.replace("edge bc 1 2 2", "edge bc 1 2 x")).unwrap_err());
        assert_eq!((line, col), (4, 13));
        assert!(msg.contains("weight"), "{msg}");
        let (line, _, msg) = message(parse_instance(&TRIANGLE.replace("rotation 1 bc+ ab-", "rotation 1 bc+")).unwrap_err());
        assert_eq!(line, 3);
        assert!(msg.contains("`ab-`") && msg.contains("missing"), "{msg}");
        let (line, col, _) = message(parse_instance("vertices 2\n").unwrap_err());
        assert_eq!((line, col), (1, 1));
        let (_, _, msg) = message(parse_instance(&TRIANGLE.replace("pair", "pear")).unwrap_err());
        assert!(msg.contains("pear"));
        let (line, _, _) = message(parse_instance("{\"version\": 1,\n \"vertices\": \"x\"}").unwrap_err());
        assert_eq!(line, 2);
    }

    #[test]
    fn dot_marks_cut_edges() {
        let g = parse_instance(TRIANGLE).unwrap();
        let sol = crate::solve::solve_multicut(&g, &Default::default()).unwrap();
        let dot = render_result(&g, &sol, Format::Dot);
        assert_eq!(dot.matches("color=red").count(), 2);
        let json = render_result(&g, &sol, Format::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["weight"], 3);
        assert_eq!(v["edges"], serde_json::json!([0, 1]));
    }
}
