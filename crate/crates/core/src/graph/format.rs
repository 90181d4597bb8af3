//! The line-oriented `.ldag` text format.
//!
//! ```text
//! # comment
//! ldag <n> <e> <L>
//! node <id> <level> <label>     (n lines, ids grouped by ascending level)
//! edge <src> <dst>              (e lines)
//! ```

use std::fmt::Write;

use super::{validate_levels_with_map, LevelDag};
use crate::error::{Error, Result};
use crate::label::Label;

struct Header {
    nodes: usize,
    edges: usize,
    levels: usize,
}

fn parse_usize(tok: &str, what: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

pub fn parse_ldag(text: &str) -> Result<LevelDag> {
    let mut header: Option<Header> = None;
    let mut node_lines: Vec<Option<(usize, usize, Label)>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let Some(h) = &header else {
            if toks.len() != 4 || toks[0] != "ldag" {
                return Err(Error::parse(line, "expected header `ldag <n> <e> <L>`"));
            }
            let h = Header {
                nodes: parse_usize(toks[1], "node count", line)?,
                edges: parse_usize(toks[2], "edge count", line)?,
                levels: parse_usize(toks[3], "level count", line)?,
            };
            node_lines = vec![None; h.nodes];
            header = Some(h);
            continue;
        };
        match toks[0] {
            "node" => {
                if toks.len() != 4 {
                    return Err(Error::parse(line, "expected `node <id> <level> <label>`"));
                }
                if !edges.is_empty() {
                    return Err(Error::parse(line, "node line after edge lines"));
                }
                let id = parse_usize(toks[1], "node id", line)?;
                let level = parse_usize(toks[2], "level", line)?;
                let label: Label = toks[3]
                    .parse()
                    .map_err(|e: Error| Error::parse(line, e.to_string()))?;
                if id >= h.nodes {
                    return Err(Error::parse(
                        line,
                        format!("node id {id} out of range for {} nodes", h.nodes),
                    ));
                }
                if node_lines[id].is_some() {
                    return Err(Error::parse(line, format!("duplicate node id {id}")));
                }
                node_lines[id] = Some((line, level, label));
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(Error::parse(line, "expected `edge <src> <dst>`"));
                }
                let s = parse_usize(toks[1], "edge source", line)?;
                let d = parse_usize(toks[2], "edge target", line)?;
                for id in [s, d] {
                    if node_lines.get(id).is_none_or(Option::is_none) {
                        return Err(Error::parse(line, format!("unknown node id {id}")));
                    }
                }
                edges.push((s, d));
            }
            other => return Err(Error::parse(line, format!("unknown record `{other}`"))),
        }
    }

    let h = header.ok_or_else(|| Error::parse(last_line.max(1), "missing header"))?;
    let mut nodes = Vec::with_capacity(h.nodes);
    for (id, n) in node_lines.iter().enumerate() {
        match n {
            Some(n) => nodes.push(*n),
            None => return Err(Error::parse(last_line, format!("node {id} not declared"))),
        }
    }
    if edges.len() != h.edges {
        return Err(Error::parse(
            last_line,
            format!("header declares {} edges, found {}", h.edges, edges.len()),
        ));
    }

    let labels = nodes.iter().map(|n| n.2).collect();
    let (dag, new_of) = validate_levels_with_map(labels, &edges)
        .map_err(|e| Error::parse(last_line, e.to_string()))?;
    for (id, &(line, level, _)) in nodes.iter().enumerate() {
        if dag.level(new_of[id]) != level {
            return Err(Error::parse(
                line,
                format!(
                    "node {id} declared on level {level} but its edges place it on level {}",
                    dag.level(new_of[id])
                ),
            ));
        }
        if new_of[id] != id {
            return Err(Error::parse(
                line,
                "node ids must be grouped by ascending level",
            ));
        }
    }
    if dag.level_count() != h.levels {
        return Err(Error::parse(
            last_line,
            format!(
                "header declares {} levels, found {}",
                h.levels,
                dag.level_count()
            ),
        ));
    }
    Ok(dag)
}

pub fn serialize_ldag(g: &LevelDag) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "ldag {} {} {}",
        g.node_count(),
        g.edge_count(),
        g.level_count()
    );
    for i in 0..g.node_count() {
        let _ = writeln!(out, "node {i} {} {}", g.level(i), g.label(i));
    }
    for (s, d) in g.edges() {
        let _ = writeln!(out, "edge {s} {d}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_chain() {
        let g = parse_ldag("ldag 2 1 2\nnode 0 0 a\nnode 1 1 b\nedge 0 1").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.in_neighbors(1), &[0]);
        assert_eq!(g.label(1), Label::Char(b'b'));
    }

    #[test]
    fn comments_blank_lines_and_int_labels() {
        let text = "# demo\n\nldag 3 2 2\nnode 0 0 int:4\n# mid\nnode 1 0 x\nnode 2 1 int:5\nedge 0 2\nedge 1 2\n";
        let g = parse_ldag(text).unwrap();
        assert_eq!(g.label(0), Label::Int(4));
        assert_eq!(
            serialize_ldag(&g),
            "ldag 3 2 2\nnode 0 0 int:4\nnode 1 0 x\nnode 2 1 int:5\nedge 0 2\nedge 1 2\n"
        );
    }

    #[test]
    fn canonicalizes_edge_order() {
        let text = "ldag 3 2 2\nnode 0 0 a\nnode 1 0 b\nnode 2 1 c\nedge 1 2\nedge 0 2\n";
        let g = parse_ldag(text).unwrap();
        let canon = serialize_ldag(&g);
        assert_eq!(
            canon,
            "ldag 3 2 2\nnode 0 0 a\nnode 1 0 b\nnode 2 1 c\nedge 0 2\nedge 1 2\n"
        );
        assert_eq!(parse_ldag(&canon).unwrap(), g);
    }

    fn line_of(r: Result<LevelDag>) -> usize {
        match r {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(
            line_of(parse_ldag("ldag 2 1 2\nnode 0 0 a\nnode 1 1 b\nedge 0 5")),
            4
        );
        assert_eq!(line_of(parse_ldag("ldag 2 0 1\nnode 0 0 a\nnode 0 0 b")), 3);
        assert_eq!(line_of(parse_ldag("ldag 2 0 1\nnode 0 0 a\nfoo 1")), 3);
        assert_eq!(line_of(parse_ldag("graph 1 0 1")), 1);
        assert_eq!(line_of(parse_ldag("ldag 1 0 1\nnode 0 0 ab")), 2);
        assert_eq!(
            line_of(parse_ldag("ldag 2 1 2\nnode 0 0 a\nnode 1 0 b\nedge 0 1")),
            3
        );
        assert_eq!(
            line_of(parse_ldag("ldag 2 1 2\nnode 0 1 b\nnode 1 0 a\nedge 1 0")),
            2
        );
        assert_eq!(
            line_of(parse_ldag("ldag 2 1 3\nnode 0 0 a\nnode 1 1 b\nedge 0 1")),
            4
        );
        assert!(parse_ldag("").is_err());
    }

    #[test]
    fn rejects_non_level_content() {
        let text = "ldag 3 3 3\nnode 0 0 a\nnode 1 1 b\nnode 2 2 c\nedge 0 1\nedge 1 2\nedge 0 2\n";
        assert!(matches!(parse_ldag(text), Err(Error::Parse { .. })));
    }
}
