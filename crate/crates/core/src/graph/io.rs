use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Graph, NodeId};
use crate::error::{Error, Result};

/// Reads a whitespace-separated edge list (`u v` per line, `#` comments).
///
/// Node ids are compacted to `0..n` in ascending order of their original
/// value, which is kept as the node label. Self-loops and repeated edges
/// are dropped.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path)
}

/// [`load_edge_list`] over any reader; `origin` is only used in messages.
pub fn parse_edge_list(reader: impl BufRead, origin: &Path) -> Result<Graph> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            line: idx + 1,
            message,
        };
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!(
                "expected two node ids, found {trimmed:?}"
            )));
        };
        let parse = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| parse_err(format!("invalid node id {s:?}")))
        };
        raw.push((parse(a)?, parse(b)?));
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if labels.len() > NodeId::MAX as usize {
        return Err(Error::invalid("too many nodes for 32-bit ids"));
    }
    let index = |l: u64| labels.binary_search(&l).expect("label collected above") as NodeId;
    let edges: Vec<(NodeId, NodeId)> = raw.iter().map(|&(a, b)| (index(a), index(b))).collect();
    drop(raw);
    Graph::from_labelled_edges(labels, edges)
}

/// Writes every edge once as `label_u label_v`. Isolated nodes do not
/// appear in the output.
pub fn write_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(
        out,
        "# nodes {} edges {}",
        graph.node_count(),
        graph.edge_count()
    )
    .map_err(|e| Error::io(path, e))?;
    for (u, v) in graph.edges() {
        writeln!(out, "{} {}", graph.label(u), graph.label(v)).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        parse_edge_list(text.as_bytes(), Path::new("mem"))
    }

    #[test]
    fn collapses_multigraph() {
        let g = parse("0 1\n1 0\n1 1\n1 2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn compacts_ids_and_skips_comments() {
        let g = parse("# header\n\n10\t30\n   30  7 \n").unwrap();
        assert_eq!(g.labels(), &[7, 10, 30]);
        assert!(g.has_edge(0, 2));
        assert!(g.has_edge(1, 2));
        assert!(!g.has_edge(0, 1));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse(""), Err(Error::EmptyGraph)));
        assert!(matches!(parse("# only comments\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0 1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("-1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_edge_list("/definitely/not/here.txt"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        let g = parse("5 9\n9 12\n12 5\n").unwrap();
        write_edge_list(&g, &path).unwrap();
        assert_eq!(load_edge_list(&path).unwrap(), g);
    }
}
