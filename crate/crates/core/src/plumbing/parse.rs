//! Text and JSON documents for plumbing graphs.
//!
//! Text, one statement per line, `#` starts a comment:
//!
//! ```text
//! node P genus -3 fibers 1/1
//! node Q genus 1 fibers -1/2, 3/5
//! edge P Q +
//! edge Q R matrix 2 1 3 1
//! ```
//!
//! `edge ... matrix a b c d` is a raw gluing that must go through
//! [`normalize`](super::normalize) before it can be used.

use serde::{Deserialize, Serialize};

use super::{
    CriticalFiber, EdgeSign, Gluing, GluingMatrix, PlumbingError, PlumbingGraph, RawEdge,
    RawGraph, SeifertNode,
};

pub(super) fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| !c.is_whitespace() && c != '#' && c != ',' && c != '"')
}

/// Parses and validates a text document. Raw matrices equal to `±J` are
/// accepted; anything else is rejected.
pub fn parse(text: &str) -> Result<PlumbingGraph, PlumbingError> {
    PlumbingGraph::try_from(parse_raw(text)?)
}

pub fn parse_json(text: &str) -> Result<PlumbingGraph, PlumbingError> {
    PlumbingGraph::try_from(parse_raw_json(text)?)
}

struct Cursor<'a> {
    line: usize,
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, c) in text.char_indices() {
            match (c.is_whitespace(), start) {
                (true, Some(s)) => {
                    tokens.push((s, &text[s..i]));
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            tokens.push((s, &text[s..]));
        }
        Cursor {
            line,
            tokens,
            pos: 0,
        }
    }

    fn error(&self, column: usize, message: impl Into<String>) -> PlumbingError {
        PlumbingError::Syntax {
            line: self.line,
            column: column + 1,
            message: message.into(),
        }
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map_or(0, |(c, t)| c + t.len())
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), PlumbingError> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.error(self.end_column(), format!("expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.1)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), PlumbingError> {
        let (col, tok) = self.next(&format!("`{kw}`"))?;
        if tok != kw {
            return Err(self.error(col, format!("expected `{kw}`, found `{tok}`")));
        }
        Ok(())
    }

    fn label(&mut self) -> Result<String, PlumbingError> {
        let (col, tok) = self.next("a node label")?;
        if !valid_label(tok) {
            return Err(self.error(col, format!("invalid label `{tok}`")));
        }
        Ok(tok.to_string())
    }

    fn integer(&mut self, what: &str) -> Result<i64, PlumbingError> {
        let (col, tok) = self.next(what)?;
        tok.parse()
            .map_err(|_| self.error(col, format!("expected {what}, found `{tok}`")))
    }

    fn finish(&self) -> Result<(), PlumbingError> {
        match self.tokens.get(self.pos) {
            Some(&(col, tok)) => Err(self.error(col, format!("unexpected `{tok}`"))),
            None => Ok(()),
        }
    }
}

fn parse_fiber(cur: &Cursor<'_>, column: usize, text: &str) -> Result<CriticalFiber, PlumbingError> {
    let bad = || cur.error(column, format!("invalid fiber `{text}`, expected b/a"));
    let (b, a) = match text.split_once('/') {
        Some((b, a)) => (b.parse().map_err(|_| bad())?, a.parse().map_err(|_| bad())?),
        None => (text.parse().map_err(|_| bad())?, 1),
    };
    CriticalFiber::new(b, a)
}

/// Syntax only: self-loops and raw gluing matrices survive.
pub fn parse_raw(text: &str) -> Result<RawGraph, PlumbingError> {
    let mut graph = RawGraph::default();
    for (lineno, full) in text.lines().enumerate() {
        let content = full.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(lineno + 1, content);
        let Some(head) = cur.peek() else {
            continue;
        };
        match head {
            "node" => {
                cur.next("node")?;
                let id = cur.label()?;
                cur.keyword("genus")?;
                let genus = cur.integer("an integer genus")?;
                let mut fibers = Vec::new();
                if cur.peek() == Some("fibers") {
                    let (col, _) = cur.next("fibers")?;
                    // Fibers are comma separated; spaces around commas are optional.
                    let start = col + "fibers".len();
                    let rest = &content[start..];
                    let mut offset = start;
                    for piece in rest.split(',') {
                        let trimmed = piece.trim();
                        let lead = piece.len() - piece.trim_start().len();
                        if trimmed.is_empty() {
                            if rest.trim().is_empty() {
                                break;
                            }
                            return Err(cur.error(offset + lead, "empty fiber entry"));
                        }
                        if trimmed.contains(char::is_whitespace) {
                            return Err(cur.error(offset + lead, format!("malformed fiber list near `{trimmed}`")));
                        }
                        fibers.push(parse_fiber(&cur, offset + lead, trimmed)?);
                        offset += piece.len() + 1;
                    }
                    cur.pos = cur.tokens.len();
                }
                cur.finish()?;
                graph.nodes.push(SeifertNode { id, genus, fibers });
            }
            "edge" => {
                cur.next("edge")?;
                let left = cur.label()?;
                let right = cur.label()?;
                let (col, tok) = cur.next("`+`, `-` or `matrix`")?;
                let gluing = match tok {
                    "+" | "+1" => Gluing::Sign(EdgeSign::Plus),
                    "-" | "-1" => Gluing::Sign(EdgeSign::Minus),
                    "matrix" => {
                        let a = cur.integer("matrix entry")?;
                        let b = cur.integer("matrix entry")?;
                        let c = cur.integer("matrix entry")?;
                        let d = cur.integer("matrix entry")?;
                        let m = GluingMatrix::new(a, b, c, d);
                        m.validate()?;
                        match m.as_sign() {
                            Some(s) => Gluing::Sign(s),
                            None => Gluing::Matrix(m),
                        }
                    }
                    other => {
                        return Err(cur.error(col, format!("expected `+`, `-` or `matrix`, found `{other}`")))
                    }
                };
                cur.finish()?;
                graph.edges.push(RawEdge {
                    ends: (left, right),
                    gluing,
                });
            }
            other => {
                return Err(cur.error(cur.tokens[0].0, format!("unknown statement `{other}`")));
            }
        }
    }
    Ok(graph)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: String,
    genus: i64,
    #[serde(default)]
    fibers: Vec<[i64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    ends: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<[[i64; 2]; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    nodes: Vec<JsonNode>,
    #[serde(default)]
    edges: Vec<JsonEdge>,
}

pub fn parse_raw_json(text: &str) -> Result<RawGraph, PlumbingError> {
    let doc: JsonGraph = serde_json::from_str(text).map_err(|e| PlumbingError::Json(e.to_string()))?;
    let mut graph = RawGraph::default();
    for n in doc.nodes {
        let fibers = n
            .fibers
            .iter()
            .map(|&[b, a]| CriticalFiber::new(b, a))
            .collect::<Result<_, _>>()?;
        graph.nodes.push(SeifertNode {
            id: n.id,
            genus: n.genus,
            fibers,
        });
    }
    for e in doc.edges {
        let [left, right] = e.ends;
        let gluing = match (e.sign, e.matrix) {
            (Some(s), None) => Gluing::Sign(
                EdgeSign::from_value(s).ok_or_else(|| PlumbingError::Json(format!("edge sign must be 1 or -1, found {s}")))?,
            ),
            (None, Some([[a, b], [c, d]])) => {
                let m = GluingMatrix::new(a, b, c, d);
                m.validate()?;
                m.as_sign().map_or(Gluing::Matrix(m), Gluing::Sign)
            }
            _ => {
                return Err(PlumbingError::Json(format!(
                    "edge {left}-{right} needs exactly one of `sign` or `matrix`"
                )))
            }
        };
        graph.edges.push(RawEdge {
            ends: (left, right),
            gluing,
        });
    }
    Ok(graph)
}

pub fn to_text(raw: &RawGraph) -> String {
    let mut out = String::new();
    for n in &raw.nodes {
        out.push_str(&format!("node {} genus {}", n.id, n.genus));
        if !n.fibers.is_empty() {
            let fibers: Vec<String> = n.fibers.iter().map(ToString::to_string).collect();
            out.push_str(&format!(" fibers {}", fibers.join(", ")));
        }
        out.push('\n');
    }
    for e in &raw.edges {
        match e.gluing {
            Gluing::Sign(s) => out.push_str(&format!("edge {} {} {}\n", e.ends.0, e.ends.1, s.symbol())),
            Gluing::Matrix(m) => out.push_str(&format!(
                "edge {} {} matrix {} {} {} {}\n",
                e.ends.0, e.ends.1, m.a, m.b, m.c, m.d
            )),
        }
    }
    out
}

pub fn to_json(raw: &RawGraph) -> serde_json::Value {
    let doc = JsonGraph {
        nodes: raw
            .nodes
            .iter()
            .map(|n| JsonNode {
                id: n.id.clone(),
                genus: n.genus,
                fibers: n.fibers.iter().map(|f| [f.b(), f.a()]).collect(),
            })
            .collect(),
        edges: raw
            .edges
            .iter()
            .map(|e| {
                let (sign, matrix) = match e.gluing {
                    Gluing::Sign(s) => (Some(s.value()), None),
                    Gluing::Matrix(m) => (None, Some([[m.a, m.b], [m.c, m.d]])),
                };
                JsonEdge {
                    ends: [e.ends.0.clone(), e.ends.1.clone()],
                    sign,
                    matrix,
                }
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("graph serializes")
}
