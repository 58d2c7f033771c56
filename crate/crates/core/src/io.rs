//! Plain-text dataset formats.
//!
//! * edge list: one `u v` pair per line, 0-based, undirected;
//! * labels: `id color-name` per line, color names numbered in first-seen order;
//! * tags: `id tag1,tag2,...` per line.
//!
//! Blank lines and lines starting with `#` are skipped everywhere.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{FairError, Result};
use crate::model::PartitionedUniverse;
use crate::oracle::{CoverageOracle, TagCoverOracle};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> FairError {
    FairError::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_id(path: &str, line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(path, line, format!("invalid id {tok:?}")))
}

/// Labels with color names, as read from a label file.
#[derive(Debug, Clone)]
pub struct Labels {
    pub universe: PartitionedUniverse,
    pub color_names: Vec<String>,
}

pub fn parse_labels(text: &str, path: &str) -> Result<Labels> {
    let mut entries: Vec<(usize, usize)> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    for (ln, line) in content_lines(text) {
        let mut it = line.split_whitespace();
        let id = parse_id(path, ln, it.next().expect("non-empty line"))?;
        let name = it
            .next()
            .ok_or_else(|| parse_err(path, ln, "missing color name"))?;
        if it.next().is_some() {
            return Err(parse_err(path, ln, "expected `id color-name`"));
        }
        let c = *ids.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        });
        entries.push((id, c));
    }
    let n = entries.len();
    let mut color_of = vec![usize::MAX; n];
    for (idx, &(id, c)) in entries.iter().enumerate() {
        if id >= n {
            return Err(parse_err(
                path,
                idx + 1,
                format!("id {id} out of range; labels must cover 0..{n} densely"),
            ));
        }
        if color_of[id] != usize::MAX {
            return Err(parse_err(path, idx + 1, format!("duplicate label for {id}")));
        }
        color_of[id] = c;
    }
    if names.is_empty() {
        return Err(parse_err(path, 0, "no labels"));
    }
    Ok(Labels {
        universe: PartitionedUniverse::new(color_of, names.len())?,
        color_names: names,
    })
}

/// Parses an edge list over `n` vertices; duplicates are removed.
pub fn parse_edges(text: &str, path: &str, n: usize) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(path, ln, "expected `u v`"));
        }
        let u = parse_id(path, ln, toks[0])?;
        let v = parse_id(path, ln, toks[1])?;
        for x in [u, v] {
            if x >= n {
                return Err(parse_err(path, ln, format!("unknown vertex {x} (n = {n})")));
            }
        }
        edges.push((u.min(v), u.max(v)));
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

/// Parses `id tag1,tag2,...` lines for `n` elements; tag names are
/// numbered in first-seen order. Elements without a line get no tags.
pub fn parse_tags(text: &str, path: &str, n: usize) -> Result<TagCoverOracle> {
    let mut sets: Vec<Option<Vec<u32>>> = vec![None; n];
    let mut ids: HashMap<String, u32> = HashMap::new();
    for (ln, line) in content_lines(text) {
        let (id_tok, rest) = match line.split_once(char::is_whitespace) {
            Some((a, b)) => (a, b.trim()),
            None => (line, ""),
        };
        let id = parse_id(path, ln, id_tok)?;
        if id >= n {
            return Err(parse_err(path, ln, format!("unknown element {id} (n = {n})")));
        }
        if sets[id].is_some() {
            return Err(parse_err(path, ln, format!("duplicate tag line for {id}")));
        }
        let tags = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let next = ids.len() as u32;
                *ids.entry(t.to_string()).or_insert(next)
            })
            .collect();
        sets[id] = Some(tags);
    }
    Ok(TagCoverOracle::new(
        sets.into_iter().map(Option::unwrap_or_default).collect(),
    ))
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

pub fn load_labels(path: &Path) -> Result<Labels> {
    parse_labels(&read(path)?, &path.display().to_string())
}

/// Reads a labelled graph; the label file fixes the vertex count.
pub fn load_graph(edges: &Path, labels: &Path) -> Result<(Labels, CoverageOracle)> {
    let labels = load_labels(labels)?;
    let n = labels.universe.len();
    let e = parse_edges(&read(edges)?, &edges.display().to_string(), n)?;
    let oracle = CoverageOracle::from_edges(n, &e)?;
    Ok((labels, oracle))
}

pub fn load_tagged(tags: &Path, labels: &Path) -> Result<(Labels, TagCoverOracle)> {
    let labels = load_labels(labels)?;
    let n = labels.universe.len();
    let oracle = parse_tags(&read(tags)?, &tags.display().to_string(), n)?;
    Ok((labels, oracle))
}

pub fn write_edges(path: &Path, edges: &[(usize, usize)]) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for (u, v) in edges {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_labels(path: &Path, universe: &PartitionedUniverse, names: &[String]) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for (e, &c) in universe.colors().iter().enumerate() {
        writeln!(out, "{e} {}", names[c])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_tags(path: &Path, oracle: &TagCoverOracle) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for (e, ts) in oracle.as_set_union().sets().iter().enumerate() {
        let joined: Vec<String> = ts.iter().map(|t| format!("t{t}")).collect();
        writeln!(out, "{e} {}", joined.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SubmodularOracle;

    #[test]
    fn labels_first_seen_order() {
        let l = parse_labels("# header\n0 en\n2 de\n1 en\n", "l").unwrap();
        assert_eq!(l.color_names, vec!["en", "de"]);
        assert_eq!(l.universe.colors(), &[0, 0, 1]);
    }

    #[test]
    fn labels_must_be_dense() {
        assert!(parse_labels("0 a\n5 b\n", "l").is_err());
        assert!(parse_labels("0 a\n0 b\n", "l").is_err());
        assert!(parse_labels("0\n", "l").is_err());
    }

    #[test]
    fn edges_dedup_and_comments() {
        let e = parse_edges("0 1\n# c\n1 0\n\n1 2\n", "e", 3).unwrap();
        assert_eq!(e, vec![(0, 1), (1, 2)]);
        let g = CoverageOracle::from_edges(3, &e).unwrap();
        assert_eq!(g.evaluate(&[1]), 2.0);
    }

    #[test]
    fn edge_errors_carry_line() {
        match parse_edges("0 1\n0 9\n", "edges.txt", 3) {
            Err(FairError::Parse { line, path, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(path, "edges.txt");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_edges("0 1 2\n", "e", 3).is_err());
        assert!(parse_edges("a b\n", "e", 3).is_err());
    }

    #[test]
    fn tags_parse() {
        let t = parse_tags("0 A\n1 A,B\n2 C\n3 C, D\n", "t", 5).unwrap();
        assert_eq!(t.evaluate(&[1, 3]), 4.0);
        assert_eq!(t.tags(4), &[] as &[u32]);
        assert!(parse_tags("7 x\n", "t", 3).is_err());
    }
}
