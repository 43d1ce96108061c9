//! Parsers for lattice specs, defect patterns, and numeric grids.

use std::path::Path;

use dimernet::bounds::Copies;
use dimernet::{DefectPattern, Error, LatticeGraph, LatticeKind, Result};
use serde::Deserialize;

/// JSON document form of a lattice spec:
/// `{"kind": "chain_pbc", "dims": [6]}` or
/// `{"kind": "custom", "dims": [4], "edges": [[0,1],[2,3]]}`.
#[derive(Debug, Deserialize)]
struct LatticeSpecJson {
    kind: String,
    #[serde(default)]
    dims: Vec<usize>,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
}

/// Accepts a compact spec (`chain:6`, `square:2x4`, `complete:4`), inline
/// JSON, or a path to a JSON file.
pub fn parse_lattice(spec: &str, budget: usize) -> Result<LatticeGraph> {
    let trimmed = spec.trim();
    if trimmed.starts_with('{') {
        return lattice_from_json(trimmed, budget);
    }
    if Path::new(trimmed).is_file() {
        let text = std::fs::read_to_string(trimmed)
            .map_err(|e| Error::InvalidLattice(format!("cannot read {trimmed}: {e}")))?;
        return lattice_from_json(&text, budget);
    }
    let (kind, dims) = trimmed.split_once(':').ok_or_else(|| {
        Error::InvalidLattice(format!(
            "expected kind:dims, inline JSON, or a file path, got '{spec}'"
        ))
    })?;
    let kind = parse_kind(kind)?;
    let dims = parse_dims(dims)?;
    if kind == LatticeKind::Custom {
        return Err(Error::InvalidLattice(
            "custom lattices need the JSON form with an edge list".into(),
        ));
    }
    LatticeGraph::build(kind, &dims, budget)
}

fn lattice_from_json(text: &str, budget: usize) -> Result<LatticeGraph> {
    let spec: LatticeSpecJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidLattice(format!("bad lattice JSON: {e}")))?;
    let kind = parse_kind(&spec.kind)?;
    match kind {
        LatticeKind::Custom => {
            let [n] = spec.dims[..] else {
                return Err(Error::InvalidLattice(
                    "custom lattice needs dims: [node_count]".into(),
                ));
            };
            LatticeGraph::custom_with_budget(n, &spec.edges, budget)
        }
        _ => LatticeGraph::build(kind, &spec.dims, budget),
    }
}

fn parse_kind(s: &str) -> Result<LatticeKind> {
    match s.trim() {
        "chain" | "chain_pbc" => Ok(LatticeKind::ChainPbc),
        "square" | "square_pbc" => Ok(LatticeKind::SquarePbc),
        "complete" => Ok(LatticeKind::Complete),
        "custom" => Ok(LatticeKind::Custom),
        other => Err(Error::InvalidLattice(format!("unknown lattice kind '{other}'"))),
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(['x', ','])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidLattice(format!("bad dimension '{t}'")))
        })
        .collect()
}

/// `sym:P`, `fixed:i,j,k`, or a bare count interpreted via `mode`.
pub fn parse_defects(spec: &str, mode: Option<&str>) -> Result<DefectPattern> {
    let trimmed = spec.trim();
    let make_err =
        |msg: &str| Error::InvalidDefects(format!("{msg} (in defect spec '{spec}')"));
    if let Some(p) = trimmed.strip_prefix("sym:") {
        let p = p.parse().map_err(|_| make_err("bad defect count"))?;
        return Ok(DefectPattern::Symmetric(p));
    }
    if let Some(list) = trimmed.strip_prefix("fixed:") {
        let nodes = if list.trim().is_empty() {
            Vec::new()
        } else {
            list.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| make_err("bad node index")))
                .collect::<Result<Vec<usize>>>()?
        };
        return Ok(DefectPattern::Fixed(nodes));
    }
    // bare count; --mode picks the interpretation, symmetric by default
    let p: usize = trimmed.parse().map_err(|_| make_err("expected sym:P or fixed:i,j"))?;
    match mode.unwrap_or("symmetric") {
        "symmetric" | "sym" => Ok(DefectPattern::Symmetric(p)),
        "fixed" => Err(make_err("fixed mode needs explicit nodes, use fixed:i,j")),
        other => Err(make_err(&format!("unknown mode '{other}'"))),
    }
}

/// Comma-separated node list, e.g. `0,1`.
pub fn parse_nodes(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad node index '{t}'")))
        })
        .collect()
}

/// Comma-separated copy counts, e.g. `4,20,100,inf`.
pub fn parse_copies_list(spec: &str) -> Result<Vec<Copies>> {
    spec.split(',').map(|t| t.trim().parse()).collect()
}

/// Inclusive grid `start:end:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, step] = parts[..] else {
        return Err(Error::InvalidArgument(format!(
            "expected start:end:step, got '{spec}'"
        )));
    };
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad grid number '{t}'")))
    };
    let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
    if !(step > 0.0 && end >= start) {
        return Err(Error::InvalidArgument(format!("empty grid '{spec}'")));
    }
    let count = ((end - start) / step).round() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_lattice_specs() {
        assert_eq!(parse_lattice("chain:6", 12).unwrap().node_count(), 6);
        assert_eq!(parse_lattice("square:2x4", 12).unwrap().node_count(), 8);
        assert_eq!(parse_lattice("complete:4", 12).unwrap().edges().len(), 6);
        assert!(parse_lattice("blah:3", 12).is_err());
        assert!(parse_lattice("chain:2", 12).is_err());
    }

    #[test]
    fn json_lattice_specs() {
        let g = parse_lattice(r#"{"kind":"chain_pbc","dims":[4]}"#, 12).unwrap();
        assert_eq!(g.node_count(), 4);
        let g = parse_lattice(r#"{"kind":"custom","dims":[4],"edges":[[0,1],[2,3]]}"#, 12)
            .unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
        assert!(parse_lattice(r#"{"kind":"custom","edges":[[0,1]]}"#, 12).is_err());
    }

    #[test]
    fn defect_specs() {
        assert_eq!(parse_defects("sym:2", None).unwrap(), DefectPattern::Symmetric(2));
        assert_eq!(
            parse_defects("fixed:0,3", None).unwrap(),
            DefectPattern::Fixed(vec![0, 3])
        );
        assert_eq!(parse_defects("2", None).unwrap(), DefectPattern::Symmetric(2));
        assert_eq!(
            parse_defects("fixed:", None).unwrap(),
            DefectPattern::Fixed(vec![])
        );
        assert!(parse_defects("2", Some("fixed")).is_err());
        assert!(parse_defects("sym:x", None).is_err());
    }

    #[test]
    fn grids_and_lists() {
        let g = parse_grid("0.5:1.0:0.25").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[2] - 1.0).abs() < 1e-12);
        assert_eq!(parse_copies_list("4,inf").unwrap().len(), 2);
        assert!(parse_grid("1:0:0.1").is_err());
        assert_eq!(parse_nodes("0, 1").unwrap(), vec![0, 1]);
    }
}
