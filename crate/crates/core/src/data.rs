//! Dataset generation, plain-text loading, and query withholding.
//!
//! Vector files hold one object per line as whitespace-separated decimals;
//! string files hold one object per line as raw bytes. Blank lines, ragged
//! rows and empty files are errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::metric::{Dataset, MetricKind, Object};
use crate::rng::rng_from_seed;

/// `n` vectors in `[0,1)^d`, coordinates drawn in row-major order from one
/// ChaCha8 stream seeded with `seed`.
pub fn gen_uniform_vectors(n: usize, d: usize, seed: u64, metric: MetricKind) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if d == 0 {
        return Err(Error::DimensionMismatch { left: 0, right: 1 });
    }
    let mut rng = rng_from_seed(seed);
    let objects = (0..n)
        .map(|_| Object::Vector((0..d).map(|_| rng.gen::<f64>()).collect()))
        .collect();
    Dataset::new(objects, metric)
}

pub fn parse_vectors(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: format!("not a finite number: `{tok}`"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "empty line".into(),
            });
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::RaggedDimensions {
                    line: line_no,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(rows)
}

pub fn load_vectors(path: impl AsRef<Path>, metric: MetricKind) -> Result<Dataset> {
    let rows = parse_vectors(&fs::read_to_string(path)?)?;
    Dataset::new(rows.into_iter().map(Object::Vector).collect(), metric)
}

/// Splits on `\n`; a trailing `\r` is kept as part of the string.
pub fn parse_strings(bytes: &[u8]) -> Result<Vec<Vec<u8>>> {
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    if body.is_empty() {
        return Err(Error::EmptyDataset);
    }
    body.split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, line)| {
            if line.is_empty() {
                Err(Error::Parse {
                    line: i + 1,
                    msg: "empty line".into(),
                })
            } else {
                Ok(line.to_vec())
            }
        })
        .collect()
}

pub fn load_strings(path: impl AsRef<Path>) -> Result<Dataset> {
    let lines = parse_strings(&fs::read(path)?)?;
    Dataset::new(
        lines.into_iter().map(Object::Text).collect(),
        MetricKind::Levenshtein,
    )
}

/// Writes a vector or string dataset in the loader's format. Floats use the
/// shortest representation that parses back to the same value.
pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = Vec::new();
    for o in ds.objects() {
        match o {
            Object::Vector(v) => {
                let fields: Vec<String> = v.iter().map(f64::to_string).collect();
                writeln!(out, "{}", fields.join(" "))?;
            }
            Object::Text(t) => {
                if t.is_empty() || t.contains(&b'\n') {
                    return Err(Error::InvalidSpec(
                        "strings must be non-empty and free of newlines".into(),
                    ));
                }
                out.extend_from_slice(t);
                out.push(b'\n');
            }
            Object::Point(_) => {
                return Err(Error::InvalidSpec(
                    "explicit-metric datasets have no text format".into(),
                ))
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// How queries are chosen from a dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuerySelection {
    /// `count` distinct indices sampled without replacement.
    Sample {
        count: usize,
        seed: u64,
    },
    Indices(Vec<usize>),
}

/// A dataset with its queries removed.
#[derive(Clone, Debug)]
pub struct Withheld {
    pub dataset: Dataset,
    pub queries: Vec<Object>,
    /// Original index of each query, in query order.
    pub query_indices: Vec<usize>,
    /// Original index of each remaining object, ascending.
    pub kept: Vec<usize>,
}

pub fn withhold_queries(ds: Dataset, sel: &QuerySelection) -> Result<Withheld> {
    let n = ds.len();
    let picked: Vec<usize> = match sel {
        QuerySelection::Sample { count, seed } => {
            if *count >= n {
                return Err(Error::InvalidQuery(format!(
                    "cannot withhold {count} of {n} objects"
                )));
            }
            let mut rng = rng_from_seed(*seed);
            rand::seq::index::sample(&mut rng, n, *count).into_vec()
        }
        QuerySelection::Indices(idx) => {
            let mut seen = BTreeSet::new();
            for &i in idx {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, len: n });
                }
                if !seen.insert(i) {
                    return Err(Error::InvalidQuery(format!("duplicate query index {i}")));
                }
            }
            if idx.len() >= n {
                return Err(Error::InvalidQuery(format!(
                    "cannot withhold {} of {n} objects",
                    idx.len()
                )));
            }
            idx.clone()
        }
    };
    let mut is_query = vec![false; n];
    for &i in &picked {
        is_query[i] = true;
    }
    let (objects, metric) = ds.into_parts();
    let queries = picked.iter().map(|&i| objects[i].clone()).collect();
    let mut kept = Vec::with_capacity(n - picked.len());
    let mut rest = Vec::with_capacity(n - picked.len());
    for (i, o) in objects.into_iter().enumerate() {
        if !is_query[i] {
            kept.push(i);
            rest.push(o);
        }
    }
    Ok(Withheld {
        dataset: Dataset::new(rest, metric)?,
        queries,
        query_indices: picked,
        kept,
    })
}
