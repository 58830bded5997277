//! Canonical JSON and DOT encodings of [`IodGraph`].
//!
//! Both encodings are deterministic: nodes and edges are written in
//! lexicographic id order, so a graph written, re-read and written again
//! produces identical bytes. The DOT reader accepts exactly the dialect the
//! writer produces.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{GraphDocument, IodGraph, Node, NodeRole, FORMAT_VERSION};

pub fn parse_document(text: &str) -> Result<GraphDocument> {
    Ok(serde_json::from_str(text)?)
}

pub fn from_json(text: &str) -> Result<IodGraph> {
    IodGraph::from_document(&parse_document(text)?)
}

pub fn to_json(graph: &IodGraph) -> String {
    let mut out = serde_json::to_string_pretty(&graph.to_document()).expect("graph serializes");
    out.push('\n');
    out
}

/// Parses either encoding, picking DOT when the text starts with `digraph`.
pub fn parse_any(text: &str) -> Result<GraphDocument> {
    if text.trim_start().starts_with("digraph") {
        parse_dot(text)
    } else {
        parse_document(text)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn shape(role: NodeRole) -> &'static str {
    match role {
        NodeRole::Input => "box",
        NodeRole::Output => "doublecircle",
        NodeRole::Intermediate => "circle",
    }
}

/// Inputs are boxes, outputs double circles and intermediates circles. Tags
/// are carried in the `class` attribute.
pub fn to_dot(graph: &IodGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph iod {{").unwrap();
    writeln!(out, "  format_version={FORMAT_VERSION};").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for node in graph.nodes() {
        write!(out, "  {} [shape={}", quote(&node.id), shape(node.role)).unwrap();
        if let Some(tag) = &node.tag {
            write!(out, ", class={}", quote(tag)).unwrap();
        }
        writeln!(out, "];").unwrap();
    }
    for (s, d) in graph.edge_ids() {
        writeln!(out, "  {} -> {};", quote(s), quote(d)).unwrap();
    }
    out.push_str("}\n");
    out
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Dot {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if let Some(r) = self.rest.strip_prefix(token) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{token}`")))
        }
    }

    fn quoted(&mut self) -> Result<String> {
        self.skip_ws();
        let mut chars = self.rest.char_indices();
        if !matches!(chars.next(), Some((_, '"'))) {
            return Err(self.err("expected quoted identifier"));
        }
        let mut out = String::new();
        let mut escaped = false;
        for (pos, c) in chars {
            if escaped {
                out.push(c);
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                self.rest = &self.rest[pos + 1..];
                return Ok(out);
            } else {
                out.push(c);
            }
        }
        Err(self.err("unterminated string"))
    }

    fn word(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(self.err("expected identifier"));
        }
        let (w, r) = self.rest.split_at(end);
        self.rest = r;
        Ok(w)
    }
}

pub fn parse_dot(text: &str) -> Result<GraphDocument> {
    let mut doc = GraphDocument {
        format_version: FORMAT_VERSION,
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    let mut opened = false;
    let mut closed = false;
    for (n, raw) in text.lines().enumerate() {
        let mut cur = Cursor {
            rest: raw.trim(),
            line: n + 1,
        };
        if cur.rest.is_empty() {
            continue;
        }
        if closed {
            return Err(cur.err("content after closing brace"));
        }
        if !opened {
            cur.expect("digraph")?;
            cur.word()?;
            cur.expect("{")?;
            opened = true;
        } else if cur.eat("}") {
            closed = true;
        } else if cur.eat("format_version=") {
            let v = cur.word()?;
            doc.format_version = v.parse().map_err(|_| cur.err("bad format_version"))?;
            cur.expect(";")?;
        } else if cur.eat("rankdir=") {
            cur.word()?;
            cur.expect(";")?;
        } else {
            let first = cur.quoted()?;
            if cur.eat("->") {
                let second = cur.quoted()?;
                cur.expect(";")?;
                doc.edges.push((first, second));
            } else {
                cur.expect("[")?;
                let mut role = None;
                let mut tag = None;
                loop {
                    let key = cur.word()?;
                    cur.expect("=")?;
                    match key {
                        "shape" => {
                            role = Some(match cur.word()? {
                                "box" => NodeRole::Input,
                                "doublecircle" => NodeRole::Output,
                                "circle" => NodeRole::Intermediate,
                                other => return Err(cur.err(format!("unknown shape `{other}`"))),
                            })
                        }
                        "class" => tag = Some(cur.quoted()?),
                        other => return Err(cur.err(format!("unknown attribute `{other}`"))),
                    }
                    if !cur.eat(",") {
                        break;
                    }
                }
                cur.expect("]")?;
                cur.expect(";")?;
                let role = role.ok_or_else(|| cur.err("node without shape"))?;
                doc.nodes.push(Node {
                    id: first,
                    role,
                    tag,
                });
            }
        }
        cur.skip_ws();
        if !cur.rest.is_empty() {
            return Err(cur.err(format!("unexpected trailing input `{}`", cur.rest)));
        }
    }
    if !closed {
        return Err(Error::Dot {
            line: text.lines().count(),
            message: "missing closing brace".into(),
        });
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> IodGraph {
        IodGraph::builder()
            .input("i")
            .node(Node::new("we\"ird", NodeRole::Intermediate).tagged("water"))
            .output("o")
            .edges([("i", "we\"ird"), ("we\"ird", "o"), ("i", "o")])
            .build()
            .unwrap()
    }

    #[test]
    fn json_round_trip_is_byte_exact() {
        let text = to_json(&sample());
        let again = to_json(&from_json(&text).unwrap());
        assert_eq!(text, again);
    }

    #[test]
    fn dot_round_trip_is_byte_exact() {
        let text = to_dot(&sample());
        let doc = parse_dot(&text).unwrap();
        let g = IodGraph::from_document(&doc).unwrap();
        assert_eq!(g, sample());
        assert_eq!(to_dot(&g), text);
        assert!(text.contains("\"i\" [shape=box];"));
        assert!(text.contains("\"o\" [shape=doublecircle];"));
    }

    #[test]
    fn json_errors_carry_position() {
        let err = parse_document("{\n  \"nodes\": [\n  oops").unwrap_err();
        match err {
            Error::Json { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dot_errors_carry_line() {
        let err = parse_dot("digraph iod {\n  \"a\" [shape=hexagon];\n}\n").unwrap_err();
        assert!(matches!(err, Error::Dot { line: 2, .. }));
    }

    #[test]
    fn version_defaults_when_absent() {
        let doc = parse_document(r#"{"nodes":[{"id":"i","role":"input"}],"edges":[]}"#).unwrap();
        assert_eq!(doc.format_version, FORMAT_VERSION);
    }
}
