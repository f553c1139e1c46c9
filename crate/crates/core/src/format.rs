//! Plain-text tree and edge-set files.
//!
//! Both formats are one `u v` pair of positive decimal ids per line. Lines
//! starting with `#` and blank lines are skipped. A tree file may open with a
//! `p tree n` header, in which case it must list exactly `n - 1` edges over
//! `n` vertices.

use std::io::{self, BufRead, Write};

use crate::augment::AugmentationSet;
use crate::tree::{Tree, TreeError, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header declares {declared} vertices but the file has {found} edge lines")]
    HeaderMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Contents of a tree file before tree validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeFile {
    pub declared_vertices: Option<usize>,
    pub edges: Vec<(u64, u64)>,
}

/// Why a tree file could not become a [`Tree`].
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("invalid tree: {0}")]
    Tree(#[from] TreeError),
    #[error("header declares {declared} vertices but the edges span {found}")]
    VertexCount { declared: usize, found: usize },
}

impl TreeFile {
    pub fn parse<R: BufRead>(reader: R) -> Result<Self, FormatError> {
        let mut file = TreeFile::default();
        for (k, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            let lineno = k + 1;
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            if let Some(rest) = text.strip_prefix('p') {
                let bad = || syntax(lineno, format!("malformed header `{text}`; expected `p tree n`"));
                let mut fields = rest.split_whitespace();
                if fields.next() != Some("tree") || file.declared_vertices.is_some() || !file.edges.is_empty() {
                    return Err(bad());
                }
                let n = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
                if fields.next().is_some() {
                    return Err(bad());
                }
                file.declared_vertices = Some(n);
                continue;
            }
            file.edges.push(parse_pair(text, lineno)?);
        }
        if let Some(n) = file.declared_vertices {
            if file.edges.len() + 1 != n {
                return Err(FormatError::HeaderMismatch {
                    declared: n,
                    found: file.edges.len(),
                });
            }
        }
        Ok(file)
    }

    pub fn from_tree(tree: &Tree) -> Self {
        Self {
            declared_vertices: Some(tree.vertex_count()),
            edges: tree.edges().into_iter().map(|(u, v)| (u.0, v.0)).collect(),
        }
    }

    pub fn into_tree(self) -> Result<Tree, LoadError> {
        let tree = Tree::from_edges(self.edges)?;
        match self.declared_vertices {
            Some(n) if n != tree.vertex_count() => Err(LoadError::VertexCount {
                declared: n,
                found: tree.vertex_count(),
            }),
            _ => Ok(tree),
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        if let Some(n) = self.declared_vertices {
            writeln!(out, "p tree {n}")?;
        }
        for (u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

pub fn read_tree<R: BufRead>(reader: R) -> Result<Tree, LoadError> {
    TreeFile::parse(reader)?.into_tree()
}

/// Reads an edge-set file. The `# edges=... lower_bound=...` trailer that
/// [`write_edge_set`] emits is an ordinary comment here.
pub fn read_edge_set<R: BufRead>(reader: R) -> Result<AugmentationSet, FormatError> {
    let mut pairs = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (u, v) = parse_pair(text, k + 1)?;
        pairs.push((VertexId(u), VertexId(v)));
    }
    Ok(AugmentationSet::from_pairs(pairs))
}

/// Writes one `u v` line per pair in emission order, then the summary line.
pub fn write_edge_set<W: Write>(mut out: W, set: &AugmentationSet, lower_bound: usize) -> io::Result<()> {
    for (u, v) in set {
        writeln!(out, "{u} {v}")?;
    }
    writeln!(out, "# edges={} lower_bound={lower_bound}", set.len())
}

fn parse_pair(text: &str, line: usize) -> Result<(u64, u64), FormatError> {
    let mut fields = text.split_whitespace();
    let mut id = || -> Result<u64, FormatError> {
        let f = fields
            .next()
            .ok_or_else(|| syntax(line, format!("expected two vertex ids, got `{text}`")))?;
        f.parse().map_err(|_| syntax(line, format!("`{f}` is not a vertex id")))
    };
    let pair = (id()?, id()?);
    if fields.next().is_some() {
        return Err(syntax(line, format!("expected two vertex ids, got `{text}`")));
    }
    Ok(pair)
}

fn syntax(line: usize, message: String) -> FormatError {
    FormatError::Syntax { line, message }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_header() {
        let text = "# a path\np tree 3\n1 2\n\n2 3\n";
        let file = TreeFile::parse(text.as_bytes()).unwrap();
        assert_eq!(file.declared_vertices, Some(3));
        assert_eq!(file.edges, vec![(1, 2), (2, 3)]);
        assert_eq!(file.into_tree().unwrap().leaf_count(), 2);
    }

    #[test]
    fn rejects_bad_token() {
        let err = TreeFile::parse("1 2\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 2, .. }), "{err}");
        assert!(TreeFile::parse("1 2 3\n".as_bytes()).is_err());
        assert!(TreeFile::parse("1\n".as_bytes()).is_err());
        assert!(TreeFile::parse("p graph 3\n".as_bytes()).is_err());
    }

    #[test]
    fn header_must_match() {
        let err = TreeFile::parse("p tree 4\n1 2\n2 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::HeaderMismatch { declared: 4, found: 2 }));
    }

    #[test]
    fn invalid_tree_is_not_a_syntax_error() {
        let err = read_tree("1 2\n2 3\n3 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, LoadError::Tree(TreeError::CycleDetected(..))), "{err}");
    }

    #[test]
    fn edge_set_round_trip() {
        let set = AugmentationSet::from_pairs([(VertexId(3), VertexId(1)), (VertexId(2), VertexId(5))]);
        let mut buf = Vec::new();
        write_edge_set(&mut buf, &set, 2).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "1 3\n2 5\n# edges=2 lower_bound=2\n"
        );
        assert_eq!(read_edge_set(&buf[..]).unwrap(), set);
    }

    #[test]
    fn tree_file_round_trip() {
        let t = Tree::from_edges([(1, 2), (1, 3), (1, 4), (4, 5)]).unwrap();
        let mut buf = Vec::new();
        TreeFile::from_tree(&t).write(&mut buf).unwrap();
        assert_eq!(read_tree(&buf[..]).unwrap(), t);
    }
}
