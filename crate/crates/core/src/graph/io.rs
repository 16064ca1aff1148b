//! Edge-list text format: a header line `n d`, then one `u v` line per edge.
//! Several graphs may be concatenated, separated by blank lines.

use super::{Edge, GraphError, RegularGraph};

fn parse_error(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_pair(line_no: usize, line: &str) -> Result<(u32, u32), GraphError> {
    let mut fields = line.split_whitespace();
    let mut next = |what: &str| -> Result<u32, GraphError> {
        let tok = fields
            .next()
            .ok_or_else(|| parse_error(line_no, format!("missing {what}")))?;
        tok.parse::<u32>()
            .map_err(|_| parse_error(line_no, format!("{what} `{tok}` is not a non-negative integer")))
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if let Some(extra) = fields.next() {
        return Err(parse_error(line_no, format!("unexpected trailing field `{extra}`")));
    }
    Ok((a, b))
}

/// Parses a single graph. Blank lines are ignored.
pub fn parse_graph(text: &str) -> Result<RegularGraph, GraphError> {
    let mut graphs = parse_graphs(text)?;
    match graphs.len() {
        1 => Ok(graphs.pop().expect("one graph")),
        0 => Err(parse_error(1, "empty input")),
        k => Err(parse_error(1, format!("expected one graph, found {k}"))),
    }
}

/// Parses zero or more blank-line separated graphs.
pub fn parse_graphs(text: &str) -> Result<Vec<RegularGraph>, GraphError> {
    let mut graphs = Vec::new();
    let mut current: Option<(u32, u32, Vec<Edge>)> = None;
    let flush = |current: &mut Option<(u32, u32, Vec<Edge>)>,
                 graphs: &mut Vec<RegularGraph>|
     -> Result<(), GraphError> {
        if let Some((n, d, edges)) = current.take() {
            graphs.push(RegularGraph::new(n, d, edges)?);
        }
        Ok(())
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut current, &mut graphs)?;
            continue;
        }
        let (a, b) = parse_pair(line_no, line)?;
        match current.as_mut() {
            None => current = Some((a, b, Vec::new())),
            Some((n, _, edges)) => {
                for x in [a, b] {
                    if x == 0 || x > *n {
                        return Err(parse_error(line_no, format!("vertex {x} not in 1..={n}")));
                    }
                }
                let e = Edge::new(a, b).map_err(|err| parse_error(line_no, err.to_string()))?;
                edges.push(e);
            }
        }
    }
    flush(&mut current, &mut graphs)?;
    Ok(graphs)
}

/// Canonical serialization: header, then edges sorted lexicographically, LF endings.
pub fn serialize_graph(g: &RegularGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.d());
    for e in g.edges() {
        out.push_str(&format!("{} {}\n", e.u(), e.v()));
    }
    out
}

/// Serializes several graphs separated by blank lines.
pub fn serialize_graphs<'a>(graphs: impl IntoIterator<Item = &'a RegularGraph>) -> String {
    graphs
        .into_iter()
        .map(serialize_graph)
        .collect::<Vec<_>>()
        .join("\n")
}
