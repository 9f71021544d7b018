//! Native instance text format and edge-list import.
//!
//! ```text
//! ising-maxcut v1
//! n=4 density=1 seed=0 best_known=none
//! 1 2 3
//! 2 3
//! 3
//!
//! ```
//!
//! Row `m` lists the columns `c > m` with `J_mc = 1`. The header may carry an
//! optional trailing `provenance=<tag>` describing where `best_known` came
//! from.

use std::fmt::Write as _;
use std::path::Path;

use super::{BestKnown, CouplingMatrix, ProblemInstance, Provenance};
use crate::error::{Error, Result};

const MAGIC: &str = "ising-maxcut v1";

pub fn write_instance(p: &ProblemInstance) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let best = match &p.best_known {
        Some(b) => b.cut.to_string(),
        None => "none".to_string(),
    };
    write!(
        out,
        "n={} density={} seed={} best_known={}",
        p.n(),
        p.density,
        p.seed,
        best
    )
    .unwrap();
    if let Some(BestKnown {
        provenance: Some(tag),
        ..
    }) = &p.best_known
    {
        write!(out, " provenance={tag}").unwrap();
    }
    out.push('\n');
    let j = &p.coupling;
    for m in 0..j.n() {
        let mut first = true;
        for &c in j.neighbors(m) {
            if (c as usize) > m {
                if !first {
                    out.push(' ');
                }
                write!(out, "{c}").unwrap();
                first = false;
            }
        }
        out.push('\n');
    }
    out
}

pub fn save_instance(p: &ProblemInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_instance(p)).map_err(|e| Error::io(path, e))
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}:{location}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance> {
    let mut lines = text.lines();
    match lines.next() {
        None => return Err(Error::parse("line 1", "empty file, missing header")),
        Some(l) if l.trim() == MAGIC => {}
        Some(l) => {
            return Err(Error::parse(
                "line 1",
                format!("expected `{MAGIC}`, found `{l}`"),
            ))
        }
    }
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("line 2", "missing parameter line"))?;

    let mut n = None;
    let mut density = None;
    let mut seed = None;
    let mut best = None;
    let mut provenance = None;
    for tok in header.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse("line 2", format!("token `{tok}` is not key=value")))?;
        let bad = |what: &str| Error::parse(format!("line 2, field `{key}`"), format!("invalid {what} `{value}`"));
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad("integer"))?),
            "density" => density = Some(value.parse::<f64>().map_err(|_| bad("float"))?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("u64"))?),
            "best_known" => {
                best = Some(if value == "none" {
                    None
                } else {
                    Some(value.parse::<u64>().map_err(|_| bad("integer"))?)
                })
            }
            "provenance" => provenance = Some(value.parse::<Provenance>().map_err(|_| bad("tag"))?),
            _ => {
                return Err(Error::parse(
                    format!("line 2, field `{key}`"),
                    "unknown field",
                ))
            }
        }
    }
    let missing = |f: &str| Error::parse(format!("line 2, field `{f}`"), "missing");
    let n = n.ok_or_else(|| missing("n"))?;
    let density = density.ok_or_else(|| missing("density"))?;
    let seed = seed.ok_or_else(|| missing("seed"))?;
    let best = best.ok_or_else(|| missing("best_known"))?;
    if n < 2 {
        return Err(Error::parse("line 2, field `n`", format!("need n >= 2, got {n}")));
    }
    if provenance.is_some() && best.is_none() {
        return Err(Error::parse(
            "line 2, field `provenance`",
            "provenance given without best_known",
        ));
    }

    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (row, line) in lines.enumerate() {
        let lineno = row + 3;
        if row >= n {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(
                format!("line {lineno}"),
                format!("row {row} beyond n = {n}"),
            ));
        }
        for tok in line.split_whitespace() {
            let c: usize = tok.parse().map_err(|_| {
                Error::parse(
                    format!("line {lineno}"),
                    format!("invalid column index `{tok}`"),
                )
            })?;
            if c >= n {
                return Err(Error::parse(
                    format!("line {lineno}"),
                    format!("column {c} out of range for n = {n}"),
                ));
            }
            if c == row {
                return Err(Error::Validation(format!("nonzero diagonal at ({row},{row})")));
            }
            if c < row {
                return Err(Error::parse(
                    format!("line {lineno}"),
                    format!("column {c} is not above the diagonal in row {row}"),
                ));
            }
            if !seen.insert((row, c)) {
                return Err(Error::parse(
                    format!("line {lineno}"),
                    format!("duplicate edge ({row},{c})"),
                ));
            }
            edges.push((row, c));
        }
    }

    let coupling = CouplingMatrix::from_edges(n, &edges)?;
    let p = ProblemInstance {
        coupling,
        seed,
        density,
        best_known: best.map(|cut| BestKnown { cut, provenance }),
    };
    p.validate()?;
    Ok(p)
}

/// Import a plain edge list.
///
/// The first non-comment line holds the node count; each following line holds
/// one 0-based edge `u v`. Lines starting with `#` are ignored. Edges may
/// appear in either orientation but only once.
pub fn import_edge_list(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let loc = |i: usize| format!("{}:line {}", path.display(), i + 1);
    let mut body = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (i, first) = body
        .next()
        .ok_or_else(|| Error::parse(loc(0), "empty edge list"))?;
    let n: usize = first
        .trim()
        .parse()
        .map_err(|_| Error::parse(loc(i), format!("expected node count, found `{first}`")))?;
    let mut edges = Vec::new();
    for (i, line) in body {
        let mut it = line.split_whitespace();
        let mut next = || -> Result<usize> {
            it.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(loc(i), format!("expected `u v`, found `{line}`")))
        };
        let (u, v) = (next()?, next()?);
        edges.push((u.min(v), u.max(v)));
    }
    let coupling = CouplingMatrix::from_edges(n, &edges)?;
    let pairs = (n * (n - 1) / 2) as f64;
    let density = coupling.edge_count() as f64 / pairs;
    Ok(ProblemInstance::new(coupling, 0, density))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::random_graph;

    #[test]
    fn round_trip_generated_instance() {
        let mut p = random_graph(25, 0.37, 12345).unwrap();
        assert_eq!(parse_instance(&write_instance(&p)).unwrap(), p);
        p.offer_best_known(100, Provenance::LocalSearch { restarts: 1000 })
            .unwrap();
        let text = write_instance(&p);
        assert!(text.contains("provenance=local-search(restarts=1000)"));
        assert_eq!(parse_instance(&text).unwrap(), p);
    }

    #[test]
    fn k4_text_is_exact() {
        let p = random_graph(4, 1.0, 0).unwrap();
        assert_eq!(
            write_instance(&p),
            "ising-maxcut v1\nn=4 density=1 seed=0 best_known=none\n1 2 3\n2 3\n3\n\n"
        );
    }

    #[test]
    fn empty_file_is_parse_error() {
        assert!(matches!(parse_instance(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn rejects_duplicate_and_out_of_range() {
        let dup = "ising-maxcut v1\nn=3 density=0.5 seed=1 best_known=none\n1 1\n\n\n";
        let err = parse_instance(dup).unwrap_err().to_string();
        assert!(err.contains("duplicate edge (0,1)") && err.contains("line 3"), "{err}");

        let oor = "ising-maxcut v1\nn=3 density=0.5 seed=1 best_known=none\n5\n\n\n";
        let err = parse_instance(oor).unwrap_err().to_string();
        assert!(err.contains("out of range"), "{err}");
    }

    #[test]
    fn rejects_malformed_header() {
        let text = "ising-maxcut v1\nn=3 density=abc seed=1 best_known=none\n";
        let err = parse_instance(text).unwrap_err().to_string();
        assert!(err.contains("density"), "{err}");
        let text = "ising-maxcut v1\nn=3 seed=1 best_known=none\n";
        assert!(parse_instance(text).unwrap_err().to_string().contains("missing"));
    }

    #[test]
    fn rejects_best_known_above_edge_count() {
        let text = "ising-maxcut v1\nn=3 density=0.5 seed=1 best_known=5\n1\n\n\n";
        assert!(matches!(parse_instance(text), Err(Error::Validation(_))));
    }

    #[test]
    fn trailing_empty_rows_may_be_omitted() {
        let text = "ising-maxcut v1\nn=3 density=0.5 seed=1 best_known=none\n1 2";
        assert_eq!(parse_instance(text).unwrap().coupling.edge_count(), 2);
    }

    #[test]
    fn edge_list_import() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, "# square\n4\n0 1\n2 1\n2 3\n3 0\n").unwrap();
        let p = import_edge_list(&path).unwrap();
        assert_eq!(p.coupling.edge_count(), 4);
        assert_eq!(p.coupling.get(1, 2), 1);
        std::fs::write(&path, "3\n0 1\n1 0\n").unwrap();
        assert!(import_edge_list(&path).is_err());
    }
}
