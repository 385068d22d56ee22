//! On-disk graph format: `meta.json`, `edges.csv`, `features.csv`, `labels.csv`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub num_nodes: usize,
    pub num_classes: usize,
    pub num_features: usize,
}

/// Locations of the four files making up a graph.
#[derive(Clone, Debug)]
pub struct GraphFiles {
    pub edges: PathBuf,
    pub features: PathBuf,
    pub labels: PathBuf,
    pub meta: PathBuf,
}

impl GraphFiles {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        GraphFiles {
            edges: dir.join("edges.csv"),
            features: dir.join("features.csv"),
            labels: dir.join("labels.csv"),
            meta: dir.join("meta.json"),
        }
    }
}

pub fn load_graph_dir(dir: impl AsRef<Path>) -> Result<Graph> {
    let f = GraphFiles::in_dir(dir);
    load_graph(&f.edges, &f.features, &f.labels, &f.meta)
}

/// Reads a graph. Edges are undirected and deduplicated, self-loops are errors.
/// An empty labels file yields a graph without latent labels.
pub fn load_graph(
    edges_path: &Path,
    features_path: &Path,
    labels_path: &Path,
    meta_path: &Path,
) -> Result<Graph> {
    let meta_text = fs::read_to_string(meta_path).map_err(|e| Error::io(meta_path, e))?;
    let meta: GraphMeta = serde_json::from_str(&meta_text).map_err(|e| Error::Parse {
        path: meta_path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    let n = meta.num_nodes;

    let mut edges = Vec::new();
    for (line, row) in read_rows(edges_path, 2)? {
        let src: usize = field(edges_path, line, &row[0], "src")?;
        let dst: usize = field(edges_path, line, &row[1], "dst")?;
        if src >= n || dst >= n {
            return Err(parse_err(edges_path, line, format!("endpoint out of range [0, {n})")));
        }
        if src == dst {
            return Err(parse_err(edges_path, line, "self-loop"));
        }
        edges.push((src, dst));
    }

    let mut features = Array2::<f64>::zeros((n, meta.num_features));
    for (line, row) in read_rows(features_path, 3)? {
        let node: usize = field(features_path, line, &row[0], "node_id")?;
        let col: usize = field(features_path, line, &row[1], "feature_index")?;
        let value: f64 = field(features_path, line, &row[2], "value")?;
        if node >= n || col >= meta.num_features {
            return Err(parse_err(features_path, line, "feature entry out of range"));
        }
        if !value.is_finite() {
            return Err(parse_err(features_path, line, "non-finite feature value"));
        }
        features[[node, col]] = value;
    }

    let mut labels = vec![None; n];
    let mut any = false;
    for (line, row) in read_rows(labels_path, 2)? {
        let node: usize = field(labels_path, line, &row[0], "node_id")?;
        let label: usize = field(labels_path, line, &row[1], "label")?;
        if node >= n {
            return Err(parse_err(labels_path, line, format!("node {node} out of range")));
        }
        if label >= meta.num_classes {
            return Err(parse_err(
                labels_path,
                line,
                format!("label {label} not below num_classes {}", meta.num_classes),
            ));
        }
        labels[node] = Some(label);
        any = true;
    }
    let latent = if any {
        let collected: Option<Vec<usize>> = labels.iter().copied().collect();
        Some(collected.ok_or_else(|| {
            Error::invalid(format!("{} does not label every node", labels_path.display()))
        })?)
    } else {
        None
    };

    Graph::from_edges(meta.num_classes, edges, features, latent)
}

/// Writes a graph in the format read by [`load_graph_dir`].
pub fn save_graph(graph: &Graph, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = GraphFiles::in_dir(dir);
    let meta = GraphMeta {
        num_nodes: graph.num_nodes(),
        num_classes: graph.num_classes(),
        num_features: graph.num_features(),
    };
    write(&files.meta, serde_json::to_string_pretty(&meta)? + "\n")?;

    let mut edges = String::from("src,dst\n");
    for (i, j) in graph.edges() {
        edges.push_str(&format!("{i},{j}\n"));
    }
    write(&files.edges, edges)?;

    let mut feats = String::from("node_id,feature_index,value\n");
    for ((i, j), v) in graph.features().indexed_iter() {
        if *v != 0.0 {
            feats.push_str(&format!("{i},{j},{v}\n"));
        }
    }
    write(&files.features, feats)?;

    let mut labels = String::from("node_id,label\n");
    if let Some(l) = graph.latent_labels() {
        for (i, y) in l.iter().enumerate() {
            labels.push_str(&format!("{i},{y}\n"));
        }
    }
    write(&files.labels, labels)
}

fn write(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn field<T: FromStr>(path: &Path, line: usize, raw: &str, name: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse {name} from {raw:?}")))
}

/// Reads CSV records with exactly `width` fields, returning `(line, fields)`.
/// A first line whose leading field is not numeric is treated as a header.
fn read_rows(path: &Path, width: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_err(path, 0, format!("{other:?}")),
        })?;
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(idx + 1);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if idx == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != width {
            return Err(parse_err(
                path,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_files(dir: &Path, meta: &str, edges: &str, feats: &str, labels: &str) -> GraphFiles {
        let f = GraphFiles::in_dir(dir);
        fs::write(&f.meta, meta).unwrap();
        fs::write(&f.edges, edges).unwrap();
        fs::write(&f.features, feats).unwrap();
        fs::write(&f.labels, labels).unwrap();
        f
    }

    const META3: &str = r#"{"num_nodes": 3, "num_classes": 2, "num_features": 2}"#;

    #[test]
    fn single_node_without_edges() {
        let dir = tempfile::tempdir().unwrap();
        write_files(
            dir.path(),
            r#"{"num_nodes": 1, "num_classes": 2, "num_features": 1}"#,
            "",
            "0,0,1\n",
            "0,1\n",
        );
        let g = load_graph_dir(dir.path()).unwrap();
        assert_eq!(g.num_nodes(), 1);
        assert_eq!(g.num_directed_edges(), 0);
        assert_eq!(g.latent_labels(), Some(&[1][..]));
    }

    #[test]
    fn duplicates_and_crlf() {
        let dir = tempfile::tempdir().unwrap();
        write_files(dir.path(), META3, "src,dst\r\n0,1\r\n1,0\r\n0,1\r\n1,2\r\n", "", "");
        let g = load_graph_dir(dir.path()).unwrap();
        assert_eq!(g.num_directed_edges(), 4);
        assert!(g.latent_labels().is_none());
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        write_files(dir.path(), META3, "0,1\n1,x\n", "", "");
        match load_graph_dir(dir.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn label_and_range_errors() {
        let dir = tempfile::tempdir().unwrap();
        write_files(dir.path(), META3, "0,1\n", "", "0,0\n1,2\n2,1\n");
        assert!(matches!(load_graph_dir(dir.path()), Err(Error::Parse { line: 2, .. })));
        write_files(dir.path(), META3, "0,5\n", "", "");
        assert!(matches!(load_graph_dir(dir.path()), Err(Error::Parse { line: 1, .. })));
        write_files(dir.path(), META3, "1,1\n", "", "");
        assert!(load_graph_dir(dir.path()).is_err());
    }
}
